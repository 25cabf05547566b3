#pragma once

#include "gaplab/gap_problem.hpp"
#include "gaplab/nonlinearity.hpp"
#include "gaplab/report.hpp"
#include "gaplab/solver.hpp"

#include <optional>

namespace gaplab {

/// One sample of the bifurcation branch at distance d = b - lambda from the
/// upper gap edge.
struct BranchPoint {
  double lambda = 0;
  double d = 0;
  double h1_norm = 0;
  double l2_norm = 0;
  double linf_norm = 0;
  double energy = 0;
  double c_ub = 0;       // linking upper bound for the minimax level
  double N_lambda = 0;
  bool converged = false;
  bool linking_converged = false;
  int newton_iterations = 0;
  std::string failure;
  // diagnostics recorded while the point's workspace is alive
  double y_h1 = 0, z_h1 = 0;          // H1 norms of the split components
  double form_y = 0, form_z = 0;      // Q_lambda on the split components
  double alpha_lambda = 0, beta_lambda = 0;
  double tail = 0;                    // boundary amplitude fraction
  int cells = 0;
};

struct SweepConfig {
  int points = 12;
  double d0_frac = 0.2;      // first distance, as a fraction of the gap width
  double dmin_frac = 1e-3;   // last distance; below this truncation dominates
  int ascent_iters = 40;
  int boundary_samples = 200;
  double tail_lengths = 5.0;  // solver domain: decay lengths kept on each side
  double tail_limit = 0.05;   // accepted boundary amplitude fraction
  SolverConfig solver;
};

/// Reference rate exponents for the branch observables as lambda -> b.
inline double norm_rate_reference(double beta, int N) {
  return 1.0 / (beta - 2.0) - N / 4.0;
}
inline double energy_rate_reference(double beta, int N) {
  return beta / (beta - 2.0) - N / 2.0;
}

/// Sweep lambda -> b on a geometric distance schedule. Each point rebuilds
/// the domain (sized so the decaying branch solution fits with room for its
/// tails), predicts from the previous solution rescaled by the expected norm
/// ratio, and accepts a plain Newton solve only when it stays localized;
/// otherwise the point is recomputed by the minimax solve. Failures are
/// recorded as data, not raised.
inline std::vector<BranchPoint> sweep(const GapProblem& prob, const Nonlinearity& nl,
                                      const SweepConfig& cfg, Rng& rng,
                                      std::vector<CriticalPoint>* solutions = nullptr) {
  const double width = prob.gap.width();
  const double b = prob.gap.b;
  const std::vector<double> d_list =
      geomspace(cfg.d0_frac * width, cfg.dmin_frac * width, cfg.points);
  const double predictor_expo = norm_rate_reference(nl.beta(), cfg.solver.dimension);

  std::vector<BranchPoint> points;
  struct Prev {
    Vector u;
    int cells;
    double d;
  };
  std::optional<Prev> prev;

  for (double d : d_list) {
    const double lambda = b - d;
    BranchPoint bp;
    bp.lambda = lambda;
    bp.d = d;
    int cells = prob.cells_for_solve(d, cfg.tail_lengths);
    for (int attempt = 0;; ++attempt) {
    try {
      const auto& ws = prob.workspace(cells);
      const SpectralSplit& split = ws.split(prob.jobs);
      EnergyModel model(ws.op, nl);
      GapDirection zeta = gap_direction(lambda, split, prob.wave, prob.eta, ws.op);

      MinimaxOptions mm;
      mm.tail_limit = cfg.tail_limit;
      std::optional<CriticalPoint> cp;
      if (prev) {
        // embed the previous solution centered into the (never smaller) domain
        const Grid1D& g = ws.grid;
        const int m = g.points_per_cell;
        const int off = (g.cells - prev->cells) / 2;
        Vector guess = Vector::Zero(g.n);
        for (int i = 0; i < prev->cells * m; ++i) guess[off * m + i] = prev->u[i];
        guess *= std::pow(d / prev->d, predictor_expo);
        try {
          CriticalPoint trial =
              solve_critical_point(model, lambda, guess, split, cfg.solver);
          if (tail_over_max(ws.grid, trial.u) <= cfg.tail_limit) cp = std::move(trial);
        } catch (const Error&) {
          // fall through to the minimax solve
        }
        if (!cp)
          cp = solve_localized(model, lambda, split, guess, cfg.solver, mm);
      } else {
        cp = solve_localized(model, lambda, split, prob.localized_seed(ws.grid, d),
                             cfg.solver, mm);
      }

      LinkingBound lb = linking_upper_bound(model, lambda, split, zeta.zeta,
                                            cfg.ascent_iters);
      (void)make_linking_problem(model, lambda, split, zeta.zeta,
                                 fiber_maximize(model, lambda, zeta.zeta), rng,
                                 cfg.boundary_samples);
      GapCoercivity coer = coercivity(lambda, split);

      bp.h1_norm = cp->h1_norm;
      bp.l2_norm = ws.op.l2_norm(cp->u);
      bp.linf_norm = cp->u.cwiseAbs().maxCoeff();
      bp.energy = cp->energy;
      bp.c_ub = lb.value;
      bp.N_lambda = coer.N;
      bp.converged = true;
      bp.linking_converged = lb.converged;
      bp.newton_iterations = cp->iterations;
      {
        Vector y = split.apply_P(cp->u);
        Vector z = cp->u - y;
        bp.y_h1 = ws.op.h1_norm(y);
        bp.z_h1 = ws.op.h1_norm(z);
        bp.form_y = ws.op.quadratic_form(y, lambda);
        bp.form_z = ws.op.quadratic_form(z, lambda);
      }
      bp.alpha_lambda = coer.alpha;
      bp.beta_lambda = coer.beta;
      bp.tail = tail_over_max(ws.grid, cp->u);
      bp.cells = ws.grid.cells;
      prev = Prev{cp->u, ws.grid.cells, d};
      if (solutions) solutions->push_back(*cp);
      break;
    } catch (const Error& e) {
      if (e.tag() == "minimax" && attempt == 0) {
        // tails did not fit; give the solution more room and try once more
        cells += cells / 2;
        if (cells % 2) ++cells;
        continue;
      }
      bp.failure = e.tag();
      bp.h1_norm = bp.l2_norm = bp.linf_norm = bp.energy = bp.c_ub = bp.N_lambda =
          std::numeric_limits<double>::quiet_NaN();
      prev.reset();  // reseed the next point from the asymptotic profile
      break;
    }
    }
    points.push_back(std::move(bp));
    prob.evict_workspaces_except(cells);
  }

  int ok = 0;
  for (const auto& p : points) ok += p.converged ? 1 : 0;
  if (ok < 4)
    throw Error("sweep-failed", "only " + std::to_string(ok) + " of " +
                                    std::to_string(cfg.points) + " points converged");
  return points;
}

// --- rate fitting --------------------------------------------------------------

struct RateFit {
  std::string observable;
  double theta = 0;      // fitted log-log slope
  double intercept = 0;
  double r2 = 0;
  int n_used = 0;
  double d_max = 0;      // fit window: converged points with d <= d_max
};

template <typename Selector>
RateFit fit_rate(const std::vector<BranchPoint>& points, Selector select,
                 const std::string& name, double d_max) {
  std::vector<double> xs, ys;
  for (const auto& p : points) {
    if (!p.converged || p.d > d_max) continue;
    const double v = select(p);
    if (!(v > 0) || !std::isfinite(v)) continue;
    xs.push_back(std::log(p.d));
    ys.push_back(std::log(v));
  }
  if (xs.size() < 4)
    throw Error("fit", "rate fit for " + name + " needs at least 4 converged points, has " +
                           std::to_string(xs.size()));
  const int n = int(xs.size());
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) { mx += xs[i]; my += ys[i]; }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx <= 0) throw Error("fit", "degenerate window: no spread in d");
  RateFit f;
  f.observable = name;
  f.theta = sxy / sxx;
  f.intercept = my - f.theta * mx;
  f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  f.n_used = n;
  f.d_max = d_max;
  return f;
}

// --- rate verdicts --------------------------------------------------------------

/// Fitted exponents against the closed-form references. The proved statements
/// are upper bounds, so the pass criterion is one-sided (theta_fit >=
/// theta_ref - tol); the pure-power default is expected to be sharp, which is
/// reported as a separate flag.
struct RateCheckReport {
  bool norm_claim_applicable = false;  // beta < 2 + 4/N
  RateFit norm_fit, energy_fit, c_fit;
  double norm_reference = 0, energy_reference = 0;
  double ratio_tail_maxmin = 0;  // N_lambda |u|^2 / c_ub over the converged tail
  std::vector<Verdict> verdicts;
  bool pass() const {
    for (const auto& v : verdicts)
      if (!v.pass) return false;
    return true;
  }
};

inline RateCheckReport check_rates(const std::vector<BranchPoint>& points, double beta,
                                   int N, double d_max, double tol = 0.10,
                                   double energy_tol = 0.20) {
  RateCheckReport rep;
  rep.norm_claim_applicable = beta < 2.0 + 4.0 / N;
  rep.norm_reference = norm_rate_reference(beta, N);
  rep.energy_reference = energy_rate_reference(beta, N);

  rep.energy_fit =
      fit_rate(points, [](const BranchPoint& p) { return p.energy; }, "energy", d_max);
  rep.c_fit =
      fit_rate(points, [](const BranchPoint& p) { return p.c_ub; }, "c_ub", d_max);
  rep.verdicts.push_back(lower_bound_verdict("energy rate (one-sided)", rep.energy_fit.theta,
                                             rep.energy_reference - energy_tol));
  {
    Verdict v = lower_bound_verdict("level bound rate (one-sided)", rep.c_fit.theta,
                                    rep.energy_reference - energy_tol);
    v.note = "the cylinder bound rides the cutoff-packet leakage, whose constant is "
             "still settling across this window; see README";
    rep.verdicts.push_back(v);
  }
  {
    Verdict v = lower_bound_verdict("level rate tracks energy rate", rep.c_fit.theta,
                                    rep.energy_fit.theta - 0.3);
    v.note = "same transient as the level bound rate";
    rep.verdicts.push_back(v);
  }

  if (rep.norm_claim_applicable) {
    rep.norm_fit =
        fit_rate(points, [](const BranchPoint& p) { return p.h1_norm; }, "h1_norm", d_max);
    rep.verdicts.push_back(lower_bound_verdict("norm rate (one-sided)", rep.norm_fit.theta,
                                               rep.norm_reference - tol));
  }

  std::vector<double> ratios;
  for (const auto& p : points)
    if (p.converged && p.c_ub > 0)
      ratios.push_back(p.N_lambda * p.h1_norm * p.h1_norm / p.c_ub);
  rep.ratio_tail_maxmin = tail_ratio(ratios, 5);
  rep.verdicts.push_back(Verdict{"norm-level ratio bounded", "bounded-window",
                                 rep.ratio_tail_maxmin, 10.0,
                                 std::isfinite(rep.ratio_tail_maxmin) &&
                                     rep.ratio_tail_maxmin < 10.0,
                                 "N_lambda |u|^2 / c_ub over the converged tail"});
  return rep;
}

}  // namespace gaplab
