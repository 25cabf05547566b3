#pragma once

#include "gaplab/util.hpp"

#include <algorithm>
#include <vector>

namespace gaplab {

/// Nonnegative 1-periodic weight B(x), not identically zero.
struct PeriodicWeight {
  enum class Family { constant, one_plus_cos, table };

  Family family = Family::constant;
  double value = 1.0;             // constant family
  std::vector<double> raw_table;  // table family

  static PeriodicWeight constant(double v = 1.0) {
    if (v < 0) throw Error("weight", "weight must be nonnegative");
    if (v == 0) throw Error("weight", "weight must not vanish identically");
    PeriodicWeight w;
    w.value = v;
    return w;
  }

  /// B(x) = 1 + cos(2 pi x): nonnegative, one zero per cell.
  static PeriodicWeight one_plus_cos() {
    PeriodicWeight w;
    w.family = Family::one_plus_cos;
    return w;
  }

  static PeriodicWeight from_table(std::vector<double> values) {
    if (values.empty()) throw Error("weight", "empty weight table");
    double mx = 0;
    for (double v : values) {
      if (v < 0) throw Error("weight", "weight must be nonnegative");
      mx = std::max(mx, v);
    }
    if (mx == 0) throw Error("weight", "weight must not vanish identically");
    PeriodicWeight w;
    w.family = Family::table;
    w.raw_table = std::move(values);
    return w;
  }

  std::vector<double> cell_table(int m) const {
    std::vector<double> t(m);
    switch (family) {
      case Family::constant:
        std::fill(t.begin(), t.end(), value);
        break;
      case Family::one_plus_cos:
        for (int p = 0; p < m; ++p) t[p] = 1.0 + std::cos(2.0 * kPi * p / m);
        break;
      case Family::table:
        if (int(raw_table.size()) != m)
          throw Error("weight", "weight table size does not match the grid");
        t = raw_table;
        break;
    }
    return t;
  }

  double at(double x) const {
    double r = x - std::floor(x);
    switch (family) {
      case Family::constant: return value;
      case Family::one_plus_cos: return 1.0 + std::cos(2.0 * kPi * r);
      case Family::table: {
        int m = int(raw_table.size());
        return raw_table[std::min(int(r * m), m - 1)];
      }
    }
    return 0.0;
  }

  double max() const {
    switch (family) {
      case Family::constant: return value;
      case Family::one_plus_cos: return 2.0;
      case Family::table: return *std::max_element(raw_table.begin(), raw_table.end());
    }
    return 0.0;
  }

  double min() const {
    switch (family) {
      case Family::constant: return value;
      case Family::one_plus_cos: return 0.0;
      case Family::table: return *std::min_element(raw_table.begin(), raw_table.end());
    }
    return 0.0;
  }
};

}  // namespace gaplab
