#pragma once

#include "gaplab/grid.hpp"
#include "gaplab/util.hpp"

#include <algorithm>
#include <vector>

namespace gaplab {

/// Bounded 1-periodic potential, as a closed-form descriptor plus an
/// additive spectral shift. Sampling goes through a per-cell table so that
/// periodic wraparound on the grid is exact, not just up to rounding.
struct PeriodicPotential {
  enum class Family { zero, constant, mathieu, table };

  int dimension = 1;
  Family family = Family::zero;
  double q = 0.0;      // mathieu: V(x) = 2 q cos(2 pi x)
  double value = 0.0;  // constant: V(x) = value
  double shift = 0.0;  // added to V (moves the spectrum rigidly)
  std::vector<double> raw_table;  // family == table only

  static PeriodicPotential zero() { return PeriodicPotential{}; }

  static PeriodicPotential constant(double c) {
    PeriodicPotential p;
    p.family = Family::constant;
    p.value = c;
    return p;
  }

  static PeriodicPotential mathieu(double q) {
    PeriodicPotential p;
    p.family = Family::mathieu;
    p.q = q;
    return p;
  }

  static PeriodicPotential from_table(std::vector<double> values) {
    if (values.empty()) throw Error("potential", "empty potential table");
    PeriodicPotential p;
    p.family = Family::table;
    p.raw_table = std::move(values);
    return p;
  }

  /// V + shift sampled at cell offsets p/m, p = 0..m-1.
  std::vector<double> cell_table(int m) const {
    std::vector<double> t(m);
    switch (family) {
      case Family::zero:
        std::fill(t.begin(), t.end(), shift);
        break;
      case Family::constant:
        std::fill(t.begin(), t.end(), value + shift);
        break;
      case Family::mathieu:
        for (int p = 0; p < m; ++p)
          t[p] = 2.0 * q * std::cos(2.0 * kPi * p / m) + shift;
        break;
      case Family::table:
        if (int(raw_table.size()) != m)
          throw Error("potential",
                      "tabulated potential has " + std::to_string(raw_table.size()) +
                          " samples per cell, grid wants " + std::to_string(m));
        for (int p = 0; p < m; ++p) t[p] = raw_table[p] + shift;
        break;
    }
    return t;
  }

  /// Pointwise evaluation with exact 1-periodicity (closed forms only).
  double at(double x) const {
    double r = x - std::floor(x);
    switch (family) {
      case Family::zero: return shift;
      case Family::constant: return value + shift;
      case Family::mathieu: return 2.0 * q * std::cos(2.0 * kPi * r) + shift;
      case Family::table: {
        int m = int(raw_table.size());
        int p = std::min(int(r * m), m - 1);
        return raw_table[p] + shift;
      }
    }
    return 0.0;
  }

  double max_abs() const {
    switch (family) {
      case Family::zero: return std::abs(shift);
      case Family::constant: return std::abs(value + shift);
      case Family::mathieu: return 2.0 * std::abs(q) + std::abs(shift);
      case Family::table: {
        double m = 0;
        for (double v : raw_table) m = std::max(m, std::abs(v + shift));
        return m;
      }
    }
    return 0.0;
  }

  PeriodicPotential shifted_by(double s) const {
    PeriodicPotential p = *this;
    p.shift += s;
    return p;
  }
};

}  // namespace gaplab
