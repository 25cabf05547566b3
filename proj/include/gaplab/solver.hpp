#pragma once

#include "gaplab/bloch_wave.hpp"
#include "gaplab/energy.hpp"
#include "gaplab/split.hpp"
#include "gaplab/util.hpp"

#include <Eigen/SparseLU>

#include <optional>

namespace gaplab {

inline std::pair<double, double> golden_section_max(
    const std::function<double(double)>& f, double lo, double hi, int iters = 120) {
  const double gr = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters && (b - a) > 1e-15 * (1.0 + std::abs(a) + std::abs(b)); ++i) {
    if (f1 < f2) {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + gr * (b - a); f2 = f(x2);
    } else {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - gr * (b - a); f1 = f(x1);
    }
  }
  return f1 > f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

// --- fiber maximization ------------------------------------------------------

struct FiberResult {
  double s_star = 0;
  double e_star = 0;
};

/// max over s >= 0 of E_lambda(s zeta): 1/2 s^2 Q_lambda(zeta) minus the
/// superquadratic part. Coarse geometric scan brackets the single interior
/// maximum, golden section refines it.
inline FiberResult fiber_maximize(const EnergyModel& model, double lambda,
                                  const Vector& zeta) {
  const double q = model.op().quadratic_form(zeta, lambda);
  auto phi = [&](double s) { return 0.5 * s * s * q - model.nonlinear_sum(s * zeta); };

  if (q <= 0)
    throw Error("linking-geometry",
                "fiber map is nonpositive: Q_lambda(zeta) = " + format_double(q));

  double s_up = 1.0;
  int guard = 0;
  while (phi(s_up) > 0 && guard++ < 200) s_up *= 2.0;

  double best_s = 0, best_v = 0;
  double s = s_up;
  for (int j = 0; j <= 120; ++j, s *= 0.5) {
    const double v = phi(s);
    if (v > best_v) { best_v = v; best_s = s; }
  }
  if (best_v <= 0)
    throw Error("linking-geometry", "fiber map nonpositive for all sampled s");
  auto [sm, vm] = golden_section_max(phi, 0.5 * best_s, 2.0 * best_s);
  FiberResult r;
  r.s_star = sm;
  r.e_star = vm;
  return r;
}

inline Vector initial_guess(const EnergyModel& model, double lambda, const Vector& zeta) {
  return fiber_maximize(model, lambda, zeta).s_star * zeta;
}

// --- linking set and its upper bound -----------------------------------------

/// Half-cylinder {y + s zeta : y in Y, s >= 0, |y + s zeta| <= rho} whose
/// boundary carries negative energy. rho starts at 10 |s* zeta| and doubles
/// until sampling finds no nonnegative boundary value.
struct LinkingProblem {
  double lambda = 0;
  double rho = 0;
  int boundary_samples = 0;
  double boundary_max = 0;  // largest sampled boundary energy (must be < 0)
  bool boundary_negative = false;
};

inline LinkingProblem make_linking_problem(const EnergyModel& model, double lambda,
                                           const SpectralSplit& split, const Vector& zeta,
                                           const FiberResult& fiber, Rng& rng,
                                           int samples = 200) {
  LinkingProblem lp;
  lp.lambda = lambda;
  lp.boundary_samples = samples;
  const DiscreteOperator& op = model.op();
  double rho = 10.0 * fiber.s_star * op.h1_norm(zeta);
  for (int doubling = 0; doubling < 40; ++doubling) {
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < samples; ++k) {
      Vector c = rng.gaussian_vector(split.dim_Y());
      double s = std::abs(rng.normal());
      if (k == 0) { c.setZero(); s = 1.0; }   // pure fiber direction
      if (k == 1) s = 0.0;                    // base disc
      Vector u = split.y_basis() * c + s * zeta;
      double norm = op.h1_norm(u);
      if (norm == 0) continue;
      u *= rho / norm;
      worst = std::max(worst, model.value(u, lambda));
    }
    lp.boundary_max = worst;
    if (worst < 0) {
      lp.rho = rho;
      lp.boundary_negative = true;
      return lp;
    }
    rho *= 2.0;
  }
  lp.rho = rho;
  return lp;  // boundary_negative stays false; caller decides how loud to be
}

struct LinkingBound {
  double value = 0;        // best energy found on the half-cylinder
  bool converged = false;  // joint stationarity reached
  int iterations = 0;
  double s = 0;
  double y_norm = 0;       // H1 norm of the maximizing y
};

LinkingBound linking_upper_bound(const EnergyModel& model, double lambda,
                                 const SpectralSplit& split, const Vector& zeta,
                                 int ascent_iters);

// --- Newton solve of the Euler-Lagrange equation ------------------------------

struct SolverConfig {
  double tol = 1e-9;               // residual, relative to |u|_H1
  int max_iter = 50;
  double damping_min = 1e-4;
  double trivial_threshold = 1e-6; // H1 norm below this is the zero solution
  int dimension = 1;
};

struct CriticalPoint {
  double lambda = 0;
  Vector u;
  double energy = 0;
  double residual = 0;      // |grad E|_2
  double h1_norm = 0;
  double y_norm = 0;
  double z_norm = 0;
  int iterations = 0;
};

/// Damped Newton on grad E_lambda(u) = 0 from the supplied guess. Errors:
/// "converged-to-trivial" (landed on u = 0), "max-iterations",
/// "jacobian-singular" (lambda resonant at the discrete level). The solution
/// is recentered by whole cells so its |u| maximum sits at the domain center
/// (leftmost maximum on ties).
inline CriticalPoint solve_critical_point(const EnergyModel& model, double lambda,
                                          Vector u, const SpectralSplit& split,
                                          const SolverConfig& cfg = {}) {
  const DiscreteOperator& op = model.op();
  const Grid1D& g = op.grid();

  double res = op.l2_norm(model.gradient(u, lambda));
  bool converged = false;
  int it = 0;
  int stalls = 0;
  for (; it < cfg.max_iter; ++it) {
    const double scale = std::max(op.h1_norm(u), 1e-12);
    if (res <= cfg.tol * scale) {
      converged = true;
      break;
    }
    Eigen::SparseMatrix<double> J = model.hessian(u, lambda);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(J);
    if (lu.info() != Eigen::Success)
      throw Error("jacobian-singular",
                  "Jacobian factorization failed at lambda = " + format_double(lambda) +
                      "; the value may be resonant at the discrete level");
    Vector grad = model.gradient(u, lambda);
    Vector delta = lu.solve(-grad);
    if (!delta.allFinite())
      throw Error("jacobian-singular", "Newton step is not finite");

    double t = 1.0;
    double best_res = std::numeric_limits<double>::infinity();
    Vector best_u;
    while (t >= cfg.damping_min) {
      Vector trial = u + t * delta;
      double r = op.l2_norm(model.gradient(trial, lambda));
      if (r < best_res) {
        best_res = r;
        best_u = trial;
      }
      if (r <= (1.0 - 0.25 * t) * res) break;
      t *= 0.5;
    }
    if (best_res >= res) {
      if (++stalls >= 2)
        throw Error("max-iterations", "Newton stalled at residual " + format_double(res));
    } else {
      stalls = 0;
    }
    u = best_u;
    res = best_res;
  }
  if (!converged) {
    const double scale = std::max(op.h1_norm(u), 1e-12);
    if (res <= cfg.tol * scale) converged = true;
  }
  if (!converged)
    throw Error("max-iterations", "no convergence in " + std::to_string(cfg.max_iter) +
                                      " iterations, residual " + format_double(res));

  // nontriviality; near the edge the genuine branch shrinks, so the floor
  // follows the expected bifurcation scale when that is smaller
  const double d = split.b_edge() - lambda;
  const double expo = 1.0 / (model.nl().beta() - 2.0) - cfg.dimension / 4.0;
  double threshold = cfg.trivial_threshold;
  if (d > 0 && expo > 0)
    threshold = std::min(threshold, std::pow(d, expo) / 10.0);
  const double h1 = op.h1_norm(u);
  if (h1 < threshold)
    throw Error("converged-to-trivial", "Newton landed on the zero solution");

  // translation pinning by whole cells
  int imax = 0;
  double amax = 0;
  for (int i = 0; i < g.n; ++i)
    if (std::abs(u[i]) > amax) { amax = std::abs(u[i]); imax = i; }
  const double tie = amax - 1e-10 * std::max(1.0, amax);
  for (int i = 0; i < g.n; ++i)
    if (std::abs(u[i]) >= tie) { imax = i; break; }
  const int m = g.points_per_cell;
  int delta_cells = int(std::lround(double(imax - g.center) / m));
  if (delta_cells != 0) {
    Vector shifted(g.n);
    const int shift = g.wrap(-delta_cells * m);
    for (int i = 0; i < g.n; ++i) shifted[(i + shift) % g.n] = u[i];
    u = shifted;
  }

  CriticalPoint cp;
  cp.lambda = lambda;
  cp.u = u;
  cp.energy = model.value(u, lambda);
  cp.residual = op.l2_norm(model.gradient(u, lambda));
  cp.h1_norm = op.h1_norm(u);
  Vector y = split.apply_P(u);
  cp.y_norm = op.h1_norm(y);
  cp.z_norm = op.h1_norm(u - y);
  cp.iterations = it;
  return cp;
}

/// Norm-level ratio N_lambda |u|^2 / c_ub; the sweep asserts boundedness.
inline double verify_norm_estimate(const CriticalPoint& cp, double c_ub,
                                   const GapCoercivity& coer) {
  if (!(c_ub > 0)) throw Error("domain", "c_ub must be positive");
  return coer.N * cp.h1_norm * cp.h1_norm / c_ub;
}

/// Fraction of the peak amplitude still present at the domain ends; the
/// localization check that separates decaying solutions from the periodic
/// truncation artifacts.
inline double tail_over_max(const Grid1D& g, const Vector& u) {
  const int edge = std::max(1, g.points_per_cell);
  double tail = 0;
  for (int i = 0; i < edge; ++i) {
    tail = std::max(tail, std::abs(u[i]));
    tail = std::max(tail, std::abs(u[g.n - 1 - i]));
  }
  const double mx = u.cwiseAbs().maxCoeff();
  return mx > 0 ? tail / mx : 0.0;
}

// --- localized solve by the minimax principle ----------------------------------

/// Exact maximization of E over span(Y) + s z for a fixed direction z.
/// The quadratic part is diagonal in the Y eigenbasis and decoupled from z,
/// so every line evaluation costs O(n) after one basis product per step.
class FiberMaximizer {
 public:
  FiberMaximizer(const EnergyModel& model, double lambda, const SpectralSplit& split)
      : model_(&model), op_(&model.op()), split_(&split), lambda_(lambda) {}

  struct State {
    Vector c;      // Y coordinates
    double s = 0;  // coordinate along z
    Vector u;      // assembled point
    double value = -std::numeric_limits<double>::infinity();
  };

  /// z must be L2(h)-normalized and lie in Z.
  State maximize(const Vector& z, const State* warm = nullptr, int rounds = 8,
                 int golden_iters = 48, int y_iters = 25) const {
    const Matrix& Y = split_->y_basis();
    const Vector& mu = split_->y_eigenvalues();
    const int dy = split_->dim_Y();
    const double qz = op_->quadratic_form(z, lambda_);

    Vector c = (warm && warm->c.size() == dy) ? warm->c : Vector::Zero(dy);
    double s = (warm && warm->s > 0) ? warm->s : 1.0;
    Vector w = Y * c;  // kept in sync with c

    auto quad_c = [&](const Vector& cc) {
      double q = 0;
      for (int i = 0; i < dy; ++i) q += (mu[i] - lambda_) * cc[i] * cc[i];
      return 0.5 * q;
    };
    auto value_at = [&](const Vector& cc, const Vector& ww, double ss) {
      Vector u = ww + ss * z;
      double nl = 0;
      for (int i = 0; i < op_->grid().n; ++i) nl += model_->F_at(i, u[i]);
      return quad_c(cc) + 0.5 * ss * ss * qz - op_->grid().h * nl;
    };

    double cur = value_at(c, w, s);
    for (int round = 0; round < rounds; ++round) {
      // exact in s by golden section (single interior maximum)
      auto phi = [&](double ss) { return value_at(c, w, ss); };
      double hi = std::max(4.0 * s, 1e-8);
      while (phi(hi) > phi(0.75 * hi) && hi < 1e9) hi *= 2.0;
      auto [sm, vm] = golden_section_max(phi, 0.0, hi, golden_iters);
      if (vm > cur) {
        s = sm;
        cur = vm;
      }

      // concave ascent in y, preconditioned by the diagonal (lambda - mu)
      double moved = 0;
      for (int yit = 0; yit < y_iters; ++yit) {
        Vector u = w + s * z;
        Vector g = model_->gradient(u, lambda_);
        Vector gy = op_->grid().h * (Y.transpose() * g);
        if (gy.cwiseAbs().maxCoeff() < 1e-12 * (1.0 + std::abs(cur))) break;
        Vector step(dy);
        for (int i = 0; i < dy; ++i) step[i] = gy[i] / (lambda_ - mu[i]);
        Vector v = Y * step;
        double t = 1.0;
        bool ok = false;
        while (t > 1e-12) {
          double trial = value_at(c + t * step, w + t * v, s);
          if (trial > cur) {
            c += t * step;
            w += t * v;
            moved = std::max(moved, t * step.cwiseAbs().maxCoeff());
            cur = trial;
            ok = true;
            break;
          }
          t *= 0.5;
        }
        if (!ok) break;
      }
      if (moved < 1e-13 * (1.0 + c.cwiseAbs().maxCoeff()) && round > 0) break;
    }
    State st;
    st.c = c;
    st.s = s;
    st.u = w + s * z;
    st.value = cur;
    return st;
  }

 private:
  const EnergyModel* model_;
  const DiscreteOperator* op_;
  const SpectralSplit* split_;
  double lambda_;
};

/// max of E_lambda(y + s zeta) over Y x [0, inf): exact alternate
/// maximization on the half-cylinder. The quadratic part is negative definite
/// on Y and the nonlinear part is concave, so the y-subproblem has a unique
/// maximum; every alternation only raises the value, which keeps the returned
/// bound above the fiber value.
inline LinkingBound linking_upper_bound(const EnergyModel& model, double lambda,
                                        const SpectralSplit& split, const Vector& zeta,
                                        int ascent_iters = 40) {
  const DiscreteOperator& op = model.op();
  const double zn = op.l2_norm(zeta);
  if (!(zn > 0)) throw Error("domain", "zero linking direction");
  Vector z = zeta / zn;  // direction normalization is absorbed into s

  FiberResult fiber = fiber_maximize(model, lambda, zeta);
  FiberMaximizer fm(model, lambda, split);
  FiberMaximizer::State st;
  st.s = fiber.s_star * zn;
  st.c = Vector::Zero(split.dim_Y());
  st = fm.maximize(z, &st, std::max(2, ascent_iters / 4), 60, 30);

  LinkingBound out;
  out.value = std::max(st.value, fiber.e_star);
  out.s = st.s / zn;
  out.y_norm = op.h1_norm(split.y_basis() * st.c);
  out.iterations = ascent_iters;
  Vector g = model.gradient(st.u, lambda);
  const double gy = (op.grid().h * (split.y_basis().transpose() * g)).cwiseAbs().maxCoeff();
  const double gs = std::abs(op.dot(g, z));
  out.converged = gy + gs < 1e-7 * (1.0 + std::abs(out.value));
  return out;
}

struct MinimaxOptions {
  int max_outer = 500;
  double newton_enter_scale = 0.02;  // enter Newton at |g|_2 <= scale*(b-lambda)*|u|
  double tail_limit = 0.05;          // accepted localization after Newton
  int newton_rounds = 3;             // re-entries with tightened threshold
};

/// Localized critical point by the local minimax principle: minimize, over
/// unit directions z in Z, the exact maximum of E on span(Y) + R+ z. The
/// minimizing fiber maximum is the ground-state level and its maximizer is a
/// decaying solution, which plain Newton then polishes. Plain Newton alone
/// drifts to delocalized truncation artifacts here: the linearization is
/// nearly singular along the band-edge modes, so residual-size corrections
/// acquire O(1/(b-lambda)) delocalized components.
inline CriticalPoint solve_localized(const EnergyModel& model, double lambda,
                                     const SpectralSplit& split, Vector z_seed,
                                     const SolverConfig& newton_cfg = {},
                                     const MinimaxOptions& opts = {},
                                     int* outer_used = nullptr) {
  const DiscreteOperator& op = model.op();
  Vector z = split.apply_Q(z_seed);
  const double zn = op.l2_norm(z);
  if (!(zn > 0)) throw Error("domain", "seed direction has no Z component");
  z /= zn;

  FiberMaximizer fm(model, lambda, split);
  FiberMaximizer::State st = fm.maximize(z);
  const double d = split.b_edge() - lambda;

  double enter = opts.newton_enter_scale;
  int outer = 0;
  for (int round = 0; round < opts.newton_rounds; ++round) {
    double tau = 0.5 / std::max(1.0, std::abs(st.s));
    for (; outer < opts.max_outer; ++outer) {
      Vector g = model.gradient(st.u, lambda);
      const double gn = op.l2_norm(g);
      const double target = std::max(enter * d * std::max(op.h1_norm(st.u), 1e-12),
                                     0.3 * newton_cfg.tol * op.h1_norm(st.u));
      if (gn <= target) break;
      Vector gz = split.apply_Q(g);
      Vector gt = gz - op.dot(gz, z) * z;  // tangent to the unit sphere in Z
      if (op.l2_norm(gt) < 1e-14) break;
      bool moved = false;
      for (int back = 0; back < 8; ++back) {
        Vector zt = z - tau * gt;
        zt /= op.l2_norm(zt);
        FiberMaximizer::State trial = fm.maximize(zt, &st);
        if (trial.value < st.value - 1e-15 * std::abs(st.value)) {
          z = zt;
          st = trial;
          moved = true;
          tau = std::min(tau * 1.4, 1e3);
          break;
        }
        tau *= 0.25;
      }
      if (!moved) break;  // descent exhausted at this resolution
    }
    try {
      CriticalPoint cp = solve_critical_point(model, lambda, st.u, split, newton_cfg);
      if (tail_over_max(op.grid(), cp.u) <= opts.tail_limit) {
        if (outer_used) *outer_used = outer;
        return cp;
      }
    } catch (const Error&) {
      // fall through: descend further before retrying
    }
    enter *= 0.1;
  }
  throw Error("minimax", "no localized critical point within the iteration budget");
}

}  // namespace gaplab
