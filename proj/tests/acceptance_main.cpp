// Acceptance harness: runs every headline criterion at its pinned tolerance
// and prints one PASS/FAIL line per criterion. Exit code 0 only if all pass.

#include "gaplab/campaign.hpp"
#include "gaplab/config.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace gaplab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Check {
  std::string name;
  double time_limit_s;
  std::function<Outcome()> run;
};

std::string cli_path;
std::string config_path = "configs/default.cfg";

RunConfig default_config() {
  RunConfig cfg =
      fs::exists(config_path) ? RunConfig::from_file(config_path) : RunConfig{};
  return cfg;
}

Outcome check_minorant() {
  Rng rng(2024);
  double worst = 0;
  for (int pair = 0; pair < 10; ++pair) {
    const double a = rng.uniform(2.0 + 1e-3, 5.99);
    const double b = rng.uniform(a, 5.999);
    ConvexMinorant m(a, b);
    PropertyReport rep = check_minorant_properties(m, 10000, rng, 1e-12);
    if (!rep.pass()) return {false, "sandwich violated at alpha=" + format_double(a) +
                                        " beta=" + format_double(b)};
  }
  ConvexMinorant m(3.0, 4.0);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform(-10.0, 10.0);
    worst = std::max(worst, std::abs(m.value(u) - minorant_value_by_quadrature(m, u)) /
                                std::max(1.0, m.value(u)));
  }
  if (worst > 1e-10)
    return {false, "quadrature disagreement " + format_double(worst)};
  return {true, "10 exponent pairs x 10^4 samples, quadrature gap " + format_double(worst)};
}

Outcome check_spectral() {
  RunConfig cfg = default_config();
  // shift identity
  BandStructure b0 = bloch_bands(PeriodicPotential::zero(), 4, cfg.n_k, cfg.points_per_cell);
  BandStructure bc =
      bloch_bands(PeriodicPotential::constant(2.5), 4, cfg.n_k, cfg.points_per_cell);
  double shift_err = 0;
  for (int i = 0; i < b0.n_k(); ++i)
    for (int j = 0; j < b0.n_bands(); ++j)
      shift_err = std::max(shift_err, std::abs(bc.energies(i, j) - b0.energies(i, j) - 2.5));
  if (shift_err > 1e-12) return {false, "shift identity error " + format_double(shift_err)};

  // first-gap edges against the 4x-resolution dense solve
  BandStructure bs =
      bloch_bands(PeriodicPotential::mathieu(1.0), 4, cfg.n_k, cfg.points_per_cell);
  BandStructure fine =
      bloch_bands(PeriodicPotential::mathieu(1.0), 4, 4 * cfg.n_k, cfg.points_per_cell);
  auto gaps = find_gaps(bs, 1e-8), fine_gaps = find_gaps(fine, 1e-8);
  if (gaps.empty() || fine_gaps.empty()) return {false, "no gap found"};
  const double edge_err =
      std::max(std::abs(gaps[0].a - fine_gaps[0].a) / std::abs(fine_gaps[0].a),
               std::abs(gaps[0].b - fine_gaps[0].b) / std::abs(fine_gaps[0].b));
  if (edge_err > 1e-6) return {false, "edge disagreement " + format_double(edge_err)};

  // coercivity inequalities: 100 samples x 9 lambda, slack 1e-8
  GapProblem prob = cfg.make_problem();
  const auto& ws = prob.workspace(cfg.cells);
  const SpectralSplit& sp = ws.split();
  Rng rng(515);
  double worst = -1e300;
  for (int i = 1; i <= 9; ++i) {
    const double lam = sp.a_edge() + 0.1 * i * (sp.b_edge() - sp.a_edge());
    GapCoercivity c = coercivity(lam, sp);
    for (int k = 0; k < 100; ++k) {
      Vector y = sp.random_Y(rng);
      y /= ws.op.h1_norm(y);
      Vector z = sp.apply_Q(rng.gaussian_vector(ws.grid.n));
      z /= ws.op.h1_norm(z);
      worst = std::max(worst, ws.op.quadratic_form(y, lam) + c.alpha);
      worst = std::max(worst, c.beta - ws.op.quadratic_form(z, lam));
      Vector s = y + z;
      worst = std::max(worst, c.N * ws.op.h1_norm2(s) -
                                  (ws.op.quadratic_form(z, lam) -
                                   ws.op.quadratic_form(y, lam)));
    }
  }
  if (worst > 1e-8) return {false, "coercivity slack exceeded: " + format_double(worst)};
  return {true, "edges rel " + format_double(edge_err) + ", coercivity slack " +
                    format_double(worst)};
}

Outcome check_bloch() {
  RunConfig cfg = default_config();
  GapProblem prob = cfg.make_problem();
  PropertyReport rep =
      verify_bloch_properties(prob, {8, 16, 32, 64}, cfg.make_weight(), {2.0, 4.0});
  bool ok = true;
  std::string detail;
  for (const std::string col :
       {"R2_edge_form", "R2_residual2", "scaled_sup", "scaled_weight_integral_g2",
        "scaled_weight_integral_g4"}) {
    const double ratio = tail_ratio(rep.column(col), 3);
    ok = ok && std::isfinite(ratio) && ratio < 10.0;
    detail += col + " ratio " + format_double(ratio) + "; ";
  }
  for (const std::string col :
       {"scaled_weight_integral_g2", "scaled_weight_integral_g4"}) {
    for (double v : rep.column(col)) ok = ok && v >= 1e-3;
  }
  return {ok, detail};
}

Outcome check_zeta() {
  RunConfig cfg = default_config();
  GapProblem prob = cfg.make_problem();
  PropertyReport rep = verify_zeta_estimates(prob, {1e-1, std::pow(10.0, -1.5), 1e-2,
                                                    std::pow(10.0, -2.5), 1e-3},
                                             cfg.make_weight(), {2.0, 4.0});
  bool ok = true;
  std::string detail;
  for (const std::string col : {"h1_norm", "form_over_d", "scaled_sup", "leak_over_d"}) {
    const double ratio = tail_ratio(rep.column(col), 3);
    ok = ok && std::isfinite(ratio) && ratio < 10.0;
    detail += col + " ratio " + format_double(ratio) + "; ";
  }
  double g4min = 1e300;
  for (double v : rep.column("scaled_weight_integral_g4")) g4min = std::min(g4min, v);
  ok = ok && g4min >= 1e-3;
  detail += "g4 min " + format_double(g4min);
  return {ok, detail};
}

Outcome check_rates() {
  RunConfig cfg = default_config();
  GapProblem prob = cfg.make_problem();
  Nonlinearity nl = cfg.make_nonlinearity();
  SweepConfig sc;
  sc.points = cfg.sweep_points;
  sc.d0_frac = cfg.sweep_d0_frac;
  sc.dmin_frac = cfg.sweep_dmin_frac;
  sc.ascent_iters = cfg.ascent_iters;
  sc.boundary_samples = cfg.boundary_samples;
  sc.solver = cfg.make_solver_config();
  Rng rng(cfg.seed);
  std::vector<BranchPoint> pts = sweep(prob, nl, sc, rng);

  const double dmax = cfg.fit_dmax_frac * prob.gap.width();
  RateFit fn = fit_rate(pts, [](const BranchPoint& p) { return p.h1_norm; }, "h1", dmax);
  RateFit fe = fit_rate(pts, [](const BranchPoint& p) { return p.energy; }, "energy", dmax);
  RateFit fc = fit_rate(pts, [](const BranchPoint& p) { return p.c_ub; }, "c_ub", dmax);

  bool ok = true;
  std::string detail = "theta_norm " + format_double(fn.theta) + ", theta_energy " +
                       format_double(fe.theta) + ", theta_c " + format_double(fc.theta);
  ok = ok && std::abs(fn.theta - 0.25) <= 0.10;
  ok = ok && std::abs(fe.theta - 1.5) <= 0.20;
  ok = ok && std::abs(fc.theta - 1.5) <= 0.20;

  std::vector<double> ratios;
  for (const auto& p : pts) {
    if (!p.converged) continue;
    if (p.energy < -1e-8 || p.energy > p.c_ub + 1e-6) {
      ok = false;
      detail += "; level bound violated at d=" + format_double(p.d);
    }
    if (p.c_ub > 0) ratios.push_back(p.N_lambda * p.h1_norm * p.h1_norm / p.c_ub);
  }
  const double rt = tail_ratio(ratios, 5);
  ok = ok && std::isfinite(rt) && rt < 10.0;
  detail += ", ratio tail " + format_double(rt);
  return {ok, detail};
}

Outcome check_lp() {
  RunConfig cfg = default_config();
  GapProblem prob = cfg.make_problem();
  LpProbeSet probes = LpProbeSet::make(cfg.seed ^ 0x70726f62ull, prob.wave.k_star);
  PropertyReport scan = lp_continuity_scan(prob.potential, cfg.points_per_cell, cfg.lp_cells,
                                           probes, cfg.lp_p_list);
  if (!scan.pass()) {
    for (const auto& v : scan.verdicts)
      if (!v.pass) return {false, "scan: " + v.name + " = " + format_double(v.value)};
  }

  const auto& ws = prob.workspace(cfg.lp_cells);
  const SpectralSplit& sp = ws.split();
  Rng rng(cfg.seed ^ 0x6c70ull);
  Matrix U(ws.grid.n, 20);
  for (int c = 0; c < 20; ++c) U.col(c) = rng.gaussian_vector(ws.grid.n);
  auto riesz_err = [&](int nodes) {
    Matrix PU = riesz_apply(ws.op, make_contour(sp, nodes), U);
    double worst = 0;
    for (int c = 0; c < 20; ++c)
      worst = std::max(worst, ws.op.l2_norm(Vector(PU.col(c) - sp.apply_P(U.col(c)))) /
                                  ws.op.l2_norm(U.col(c)));
    return worst;
  };
  const double e_full = riesz_err(cfg.riesz_nodes_per_side);
  const double e_coarse = riesz_err(cfg.riesz_nodes_per_side / 4);
  const double e_half = riesz_err(cfg.riesz_nodes_per_side / 2);
  bool ok = e_full <= 1e-8 && e_half < e_coarse;

  double recon = 0;
  for (double p : cfg.lp_p_list) {
    SumReport s = lp_direct_sum_check(sp, ws.op, probes, p, rng);
    recon = std::max(recon, s.reconstruction_max);
  }
  ok = ok && recon <= 1e-10;
  return {ok, "riesz " + format_double(e_full) + " (coarse " + format_double(e_coarse) +
                  " -> half " + format_double(e_half) + "), reconstruction " +
                  format_double(recon)};
}

Outcome check_gradient() {
  RunConfig cfg = default_config();
  GapProblem prob = cfg.make_problem();
  const auto& ws = prob.workspace(cfg.cells);
  Nonlinearity nl = cfg.make_nonlinearity();
  EnergyModel model(ws.op, nl);
  Rng rng(cfg.seed ^ 0x67ull);
  const double lambda = prob.gap.a + 0.6 * prob.gap.width();
  const double eps = 1e-5;
  double worst = 0;
  for (int k = 0; k < 20; ++k) {
    Vector u = 0.5 * rng.gaussian_vector(ws.grid.n);
    Vector v = rng.gaussian_vector(ws.grid.n);
    v /= ws.op.l2_norm(v);
    const double fd = (model.value(u + eps * v, lambda) - model.value(u - eps * v, lambda)) /
                      (2.0 * eps);
    const double ip = ws.op.dot(model.gradient(u, lambda), v);
    worst = std::max(worst, std::abs(fd - ip) / std::max(1.0, std::abs(ip)));
  }
  return {worst < 1e-6, "worst relative error " + format_double(worst)};
}

Outcome check_end_to_end() {
  if (cli_path.empty()) return {false, "no --cli path supplied"};
  const fs::path base = fs::temp_directory_path() / "gaplab_acceptance";
  fs::remove_all(base);
  fs::create_directories(base);
  auto run = [&](const std::string& tag) {
    const fs::path out = base / tag;
    std::ostringstream cmd;
    cmd << "\"" << cli_path << "\" --config \"" << config_path << "\" --out \""
        << out.string() << "\" --seed 12345 full-report > \"" << (base / (tag + ".log")).string()
        << "\" 2>&1";
    int rc = std::system(cmd.str().c_str());
    if (rc != -1 && WIFEXITED(rc)) rc = WEXITSTATUS(rc);
    return std::make_pair(rc, out);
  };
  auto [rc1, out1] = run("run1");
  auto [rc2, out2] = run("run2");

  bool identical = true;
  std::string first_diff;
  for (const auto& entry : fs::directory_iterator(out1)) {
    if (entry.path().extension() != ".csv") continue;
    std::ifstream a(entry.path(), std::ios::binary);
    std::ifstream b(out2 / entry.path().filename(), std::ios::binary);
    std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    if (sa != sb || sa.empty()) {
      identical = false;
      first_diff = entry.path().filename().string();
    }
  }
  const bool exit_ok = rc1 == 0 && rc2 == 0;
  std::string detail = "exit codes " + std::to_string(rc1) + "/" + std::to_string(rc2) +
                       ", csv byte-identical: " + (identical ? "yes" : ("no (" + first_diff + ")"));
  if (!exit_ok)
    detail += "; full-report fails because the fitted level-bound exponent misses its "
              "reference band at the default resolution (see rate_fits.json)";
  return {exit_ok && identical, detail};
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--cli") cli_path = argv[i + 1];
    else if (flag == "--config") config_path = argv[i + 1];
  }
  if (!fs::exists(config_path)) {
    // fall back to the source-tree default when run from the build directory
    for (const char* probe : {"../configs/default.cfg", "../../configs/default.cfg"})
      if (fs::exists(probe)) config_path = probe;
  }

  std::vector<Check> checks = {
      {"convex minorant sandwich and quadrature agreement", 5.0, check_minorant},
      {"spectral gap edges, shift identity, coercivity inequalities", 30.0, check_spectral},
      {"concentrating packet scaling window", 60.0, check_bloch},
      {"gap-direction estimates near the edge", 120.0, check_zeta},
      {"bifurcation rate fits and level bounds", 600.0, check_rates},
      {"Lp projector continuity, contour projector, direct sum", 120.0, check_lp},
      {"energy gradient vs central differences", 60.0, check_gradient},
      {"end-to-end full report determinism", 600.0, check_end_to_end},
  };

  int failures = 0;
  for (size_t i = 0; i < checks.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome oc;
    try {
      oc = checks[i].run();
    } catch (const std::exception& e) {
      oc = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < checks[i].time_limit_s;
    const bool pass = oc.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("[%s] %zu. %s (%.1f s%s)\n        %s\n", pass ? "PASS" : "FAIL", i + 1,
                checks[i].name.c_str(), secs, in_time ? "" : ", over time limit",
                oc.detail.c_str());
  }
  std::printf("%d/%zu criteria pass\n", int(checks.size()) - failures, checks.size());
  return failures == 0 ? 0 : 1;
}
