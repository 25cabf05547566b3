#pragma once

#include "gaplab/grid.hpp"
#include "gaplab/minorant.hpp"
#include "gaplab/report.hpp"
#include "gaplab/util.hpp"
#include "gaplab/weight.hpp"

#include <functional>
#include <optional>
#include <utility>

namespace gaplab {

/// Superquadratic, subcritical nonlinearity f(x, u) with primitive
/// F(x, u) = int_0^u f(x, v) dv. Built-in families:
///   pure_power: F = B(x) |u|^beta            (alpha = p = beta)
///   minorant:   F = B(x) H(u), f = B(x) h(u) (H the convex minorant)
/// The weight B is nonnegative, 1-periodic and not identically zero.
class Nonlinearity {
 public:
  enum class Family { pure_power, minorant, custom };

  static Nonlinearity pure_power(double beta, PeriodicWeight B, int dimension = 1) {
    check_exponent_window(beta, beta, dimension);
    Nonlinearity nl;
    nl.family_ = Family::pure_power;
    nl.alpha_ = nl.beta_ = nl.p_ = beta;
    nl.weight_ = std::move(B);
    nl.growth_c_ = beta * nl.weight_.max();
    return nl;
  }

  static Nonlinearity minorant(double alpha, double beta, PeriodicWeight B,
                               int dimension = 1) {
    check_exponent_window(alpha, beta, dimension);
    Nonlinearity nl;
    nl.family_ = Family::minorant;
    nl.alpha_ = alpha;
    nl.beta_ = beta;
    nl.p_ = beta;
    nl.weight_ = std::move(B);
    nl.minorant_.emplace(alpha, beta);
    nl.growth_c_ = beta * nl.weight_.max();
    return nl;
  }

  /// Test hook: arbitrary evaluators on (x mod 1, u). No derivative; the
  /// solver falls back to a one-sided difference linearization.
  static Nonlinearity custom(double alpha, double beta, double p,
                             std::function<double(double, double)> f,
                             std::function<double(double, double)> F,
                             PeriodicWeight B = PeriodicWeight::constant(1.0)) {
    Nonlinearity nl;
    nl.family_ = Family::custom;
    nl.alpha_ = alpha;
    nl.beta_ = beta;
    nl.p_ = p;
    nl.weight_ = std::move(B);
    nl.custom_f_ = std::move(f);
    nl.custom_F_ = std::move(F);
    nl.growth_c_ = 1.0;
    return nl;
  }

  Family family() const { return family_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double p() const { return p_; }
  double growth_constant() const { return growth_c_; }
  const PeriodicWeight& weight() const { return weight_; }
  bool analytic_derivative() const { return family_ != Family::custom; }

  /// Pointwise evaluation on the grid: the weight value comes from the exact
  /// cell table, xfrac = (cell offset)/m covers custom evaluators. The quartic
  /// default runs hot inside the solvers, so it skips pow().
  double f_at(double B, double xfrac, double u) const {
    switch (family_) {
      case Family::pure_power:
        if (beta_ == 4.0) return B * 4.0 * u * u * u;
        return B * beta_ * std::pow(std::abs(u), beta_ - 2.0) * u;
      case Family::minorant:
        return B * minorant_->slope(u);
      case Family::custom:
        return custom_f_(xfrac, u);
    }
    return 0;
  }
  double F_at(double B, double xfrac, double u) const {
    switch (family_) {
      case Family::pure_power:
        if (beta_ == 4.0) {
          const double u2 = u * u;
          return B * u2 * u2;
        }
        return B * std::pow(std::abs(u), beta_);
      case Family::minorant:
        return B * minorant_->value(u);
      case Family::custom:
        return custom_F_(xfrac, u);
    }
    return 0;
  }
  double fu_at(double B, double xfrac, double u) const {
    switch (family_) {
      case Family::pure_power:
        if (beta_ == 4.0) return B * 12.0 * u * u;
        return B * beta_ * (beta_ - 1.0) * std::pow(std::abs(u), beta_ - 2.0);
      case Family::minorant:
        return B * minorant_->slope_derivative(u);
      case Family::custom: {
        // only continuity is assumed: one-sided difference linearization
        const double step = 1e-7 * (1.0 + std::abs(u));
        return (custom_f_(xfrac, u + step) - custom_f_(xfrac, u)) / step;
      }
    }
    return 0;
  }

  // pointwise by coordinate (sampling/assumption checks)
  double f(double x, double u) const {
    const double xfrac = x - std::floor(x);
    return f_at(weight_.at(x), xfrac, u);
  }
  double F(double x, double u) const {
    const double xfrac = x - std::floor(x);
    return F_at(weight_.at(x), xfrac, u);
  }

  std::vector<double> weight_table(int m) const { return weight_.cell_table(m); }

  const ConvexMinorant* minorant_core() const {
    return minorant_ ? &*minorant_ : nullptr;
  }

 private:
  static void check_exponent_window(double alpha, double beta, int dimension) {
    if (!(2.0 < alpha && alpha <= beta))
      throw Error("exponent", "need 2 < alpha <= beta");
    const double critical = dimension >= 3 ? 2.0 * dimension / (dimension - 2.0) : 6.0;
    if (!(beta < critical))
      throw Error("exponent", "beta = " + format_double(beta) +
                                  " outside the subcritical window (2, " +
                                  format_double(critical) + ") for N = " +
                                  std::to_string(dimension));
  }

  Family family_ = Family::pure_power;
  double alpha_ = 4, beta_ = 4, p_ = 4, growth_c_ = 1;
  PeriodicWeight weight_;
  std::optional<ConvexMinorant> minorant_;
  std::function<double(double, double)> custom_f_, custom_F_;
};

// --- assumption checks -------------------------------------------------------

struct AssumptionEntry {
  std::string key;          // short name of the structural assumption
  std::string description;
  bool pass = false;
  bool required = true;     // whether the family advertises this assumption
  double worst = 0;
  double worst_x = 0;
  double worst_u = 0;
  std::string window;
};

struct AssumptionReport {
  std::vector<AssumptionEntry> entries;

  const AssumptionEntry& entry(const std::string& key) const {
    for (const auto& e : entries)
      if (e.key == key) return e;
    throw Error("report", "no assumption entry " + key);
  }
  bool passes_required() const {
    for (const auto& e : entries)
      if (e.required && !e.pass) return false;
    return true;
  }
  bool passes_all() const {
    for (const auto& e : entries)
      if (!e.pass) return false;
    return true;
  }
};

struct AssumptionCheckOptions {
  int x_samples = 64;
  int u_samples = 160;   // log-spaced per sign
  double u_max = 1e3;
  double u_min = 1e-6;
  double tol = 1e-12;
};

/// Numeric certification of the structural assumptions on finite sample
/// windows (the windows are recorded in each entry):
///   primitive-consistency: F(x,u) = int_0^u f on sampled pairs,
///   growth_bound:          |f| <= c (1 + |u|^{p-1}),
///   vanishing_slope:       f(x,u)/u -> 0 as u -> 0,
///   superquadraticity:     0 <= alpha F <= f u,
///   positivity_at_infinity: min_x F(x, +-U) > 0 at U = u_max,
///   lower_pinching:        F >= B(x) |u|^beta near u = 0.
/// positivity_at_infinity is advertised only when the weight is bounded away
/// from zero; a vanishing weight makes min_x F vanish identically for the
/// built-in families, which the report states rather than hides.
inline AssumptionReport check_assumptions(const Nonlinearity& nl,
                                          const AssumptionCheckOptions& opt = {}) {
  AssumptionReport rep;
  std::vector<double> xs = linspace(0.0, 1.0 - 1.0 / opt.x_samples, opt.x_samples);
  std::vector<double> us;
  for (double u : geomspace(opt.u_min, opt.u_max, opt.u_samples)) {
    us.push_back(u);
    us.push_back(-u);
  }
  us.push_back(0.0);

  // primitive consistency, by Simpson on f per sampled (x, u)
  {
    AssumptionEntry e;
    e.key = "primitive_consistency";
    e.description = "F(x,u) equals the integral of f(x,.) from 0 to u";
    e.window = "|u| <= " + format_double(opt.u_max);
    double worst = 0;
    for (double x : xs) {
      for (double u : {0.3, -0.7, 1.5, -2.5, 8.0}) {
        const double acc =
            adaptive_integral([&](double v) { return nl.f(x, v); }, 0.0, u, 1e-12);
        worst = std::max(worst, std::abs(acc - nl.F(x, u)) /
                                    std::max(1.0, std::abs(nl.F(x, u))));
      }
    }
    e.worst = worst;
    e.pass = worst <= 1e-8;
    rep.entries.push_back(e);
  }

  {
    AssumptionEntry e;
    e.key = "growth_bound";
    e.description = "|f(x,u)| <= c (1 + |u|^{p-1}) with c = " +
                    format_double(nl.growth_constant()) +
                    ", p = " + format_double(nl.p());
    e.window = "|u| <= " + format_double(opt.u_max);
    double worst = 0;
    for (double x : xs)
      for (double u : us) {
        double bound = nl.growth_constant() * (1.0 + std::pow(std::abs(u), nl.p() - 1.0));
        double excess = (std::abs(nl.f(x, u)) - bound) / std::max(1.0, bound);
        if (excess > worst) { worst = excess; e.worst_x = x; e.worst_u = u; }
      }
    e.worst = worst;
    e.pass = worst <= opt.tol;
    rep.entries.push_back(e);
  }

  {
    AssumptionEntry e;
    e.key = "vanishing_slope";
    e.description = "f(x,u) = o(|u|) near u = 0";
    // for eps in {1e-2, 1e-4}: some sampled delta must give sup |f|/|u| <= eps
    bool ok = true;
    std::string windows;
    for (double eps : {1e-2, 1e-4}) {
      double delta = 0;
      // the |u|-grid ascends; find the largest delta whose prefix stays below eps
      std::vector<double> grid = geomspace(opt.u_min, 1.0, 80);
      double runmax = 0;
      for (double u : grid) {
        double ratio = 0;
        for (double x : xs)
          ratio = std::max({ratio, std::abs(nl.f(x, u)) / u,
                            std::abs(nl.f(x, -u)) / u});
        runmax = std::max(runmax, ratio);
        if (runmax <= eps) delta = u;
        else break;
      }
      if (delta <= 0) ok = false;
      windows += "eps=" + format_double(eps) + ":delta=" + format_double(delta) + " ";
    }
    e.window = windows;
    e.pass = ok;
    rep.entries.push_back(e);
  }

  {
    AssumptionEntry e;
    e.key = "superquadraticity";
    e.description = "0 <= alpha F(x,u) <= f(x,u) u with alpha = " +
                    format_double(nl.alpha());
    e.window = "|u| <= " + format_double(opt.u_max);
    double worst = 0;
    for (double x : xs)
      for (double u : us) {
        double Fv = nl.F(x, u), fu = nl.f(x, u) * u;
        double scale = std::max(1.0, std::abs(fu));
        double excess = std::max(-Fv / std::max(1.0, std::abs(Fv)),
                                 (nl.alpha() * Fv - fu) / scale);
        if (excess > worst) { worst = excess; e.worst_x = x; e.worst_u = u; }
      }
    e.worst = worst;
    e.pass = worst <= opt.tol;
    rep.entries.push_back(e);
  }

  {
    AssumptionEntry e;
    e.key = "positivity_at_infinity";
    e.description = "min over x of F(x, +-U) stays positive for large U";
    e.window = "U = " + format_double(opt.u_max);
    e.required = nl.weight().min() > 0 || nl.family() == Nonlinearity::Family::custom;
    double m = std::numeric_limits<double>::infinity();
    for (double x : xs)
      m = std::min({m, nl.F(x, opt.u_max), nl.F(x, -opt.u_max)});
    e.worst = m;
    e.pass = m > 0;
    if (!e.required)
      e.window += " (not advertised: weight vanishes somewhere in the cell)";
    rep.entries.push_back(e);
  }

  {
    AssumptionEntry e;
    e.key = "lower_pinching";
    e.description = "F(x,u) >= B(x) |u|^beta near u = 0, beta = " +
                    format_double(nl.beta());
    const ConvexMinorant* mc = nl.minorant_core();
    const double r = mc ? mc->rho : 1.0;
    e.window = "|u| <= " + format_double(r);
    std::vector<double> Bt = nl.weight_table(opt.x_samples);
    double worst = 0;
    for (int ix = 0; ix < opt.x_samples; ++ix) {
      const double x = double(ix) / opt.x_samples;
      for (double u : us) {
        if (std::abs(u) > r) continue;
        double lhs = Bt[ix] * std::pow(std::abs(u), nl.beta());
        double excess = (lhs - nl.F(x, u)) / std::max(1.0, lhs);
        if (excess > worst) { worst = excess; e.worst_x = x; e.worst_u = u; }
      }
    }
    e.worst = worst;
    e.pass = worst <= opt.tol;
    e.required = nl.family() != Nonlinearity::Family::custom;
    rep.entries.push_back(e);
  }
  return rep;
}

/// Largest c1 > 0 with F(x,u) >= c1 |u|^alpha - delta u^2 on the sample grid.
inline double lower_bound_c1(const Nonlinearity& nl, double delta,
                             const AssumptionCheckOptions& opt = {}) {
  if (!(delta > 0)) throw Error("domain", "delta must be positive");
  std::vector<double> xs = linspace(0.0, 1.0 - 1.0 / opt.x_samples, opt.x_samples);
  double c1 = std::numeric_limits<double>::infinity();
  for (double x : xs)
    for (double u : geomspace(opt.u_min, opt.u_max, opt.u_samples)) {
      for (double su : {u, -u}) {
        double ratio = (nl.F(x, su) + delta * su * su) / std::pow(std::abs(su), nl.alpha());
        c1 = std::min(c1, ratio);
      }
    }
  if (!(c1 > 0))
    throw Error("assumption-violation",
                "no positive c1: the superquadratic lower bound fails on the window");
  return c1;
}

}  // namespace gaplab
