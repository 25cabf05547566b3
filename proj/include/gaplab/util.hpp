#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace gaplab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

constexpr double kPi = 3.14159265358979323846;

/// Runtime error with a short machine-readable tag ("gap-margin",
/// "converged-to-trivial", ...) next to the human message.
class Error : public std::runtime_error {
 public:
  Error(std::string tag, const std::string& msg)
      : std::runtime_error(msg), tag_(std::move(tag)) {}
  const std::string& tag() const { return tag_; }

 private:
  std::string tag_;
};

/// Deterministic RNG used everywhere; all randomness flows from one seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double a, double b) {
    std::uniform_real_distribution<double> d(a, b);
    return d(engine_);
  }
  double normal() {
    std::normal_distribution<double> d(0.0, 1.0);
    return d(engine_);
  }
  int index(int n) {
    std::uniform_int_distribution<int> d(0, n - 1);
    return d(engine_);
  }
  Vector gaussian_vector(int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = normal();
    return v;
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Doubles are printed with 17 significant digits so that rereading them
/// reproduces the exact bit pattern.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i)
    v[i] = (n == 1) ? a : a + (b - a) * double(i) / double(n - 1);
  return v;
}

/// n geometrically spaced values from a down to/up to b (a, b > 0).
inline std::vector<double> geomspace(double a, double b, int n) {
  std::vector<double> v(n);
  const double la = std::log(a), lb = std::log(b);
  for (int i = 0; i < n; ++i)
    v[i] = (n == 1) ? a : std::exp(la + (lb - la) * double(i) / double(n - 1));
  return v;
}

/// max/min ratio of the last `window` entries of a positive sequence;
/// the desk-scale proxy for "this quantity stays bounded".
inline double tail_ratio(const std::vector<double>& values, int window = 3) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  int start = std::max<int>(0, int(values.size()) - window);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (size_t i = start; i < values.size(); ++i) {
    double a = std::abs(values[i]);
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  return lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
}

/// Chunked parallel loop. Results must be written to preassigned slots so
/// the outcome does not depend on the number of workers.
inline void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w]() {
      for (int i = w; i < n; i += jobs) fn(i);
    });
  }
  for (auto& t : workers) t.join();
}

}  // namespace gaplab
