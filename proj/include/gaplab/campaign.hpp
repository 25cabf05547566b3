#pragma once

#include "gaplab/branch.hpp"
#include "gaplab/config.hpp"
#include "gaplab/gap_problem.hpp"
#include "gaplab/lp_check.hpp"
#include "gaplab/minorant.hpp"
#include "gaplab/nonlinearity.hpp"
#include "gaplab/report.hpp"
#include "gaplab/solver.hpp"
#include "gaplab/svg.hpp"

#include <chrono>
#include <filesystem>
#include <optional>

namespace gaplab {

struct SuiteResult {
  std::string name;
  bool pass = false;
  std::vector<Verdict> verdicts;
  std::vector<std::string> notes;
  double seconds = 0;

  void add(const Verdict& v) { verdicts.push_back(v); }
  void add_all(const std::vector<Verdict>& vs) {
    verdicts.insert(verdicts.end(), vs.begin(), vs.end());
  }
  void finish() {
    pass = true;
    for (const auto& v : verdicts) pass = pass && v.pass;
  }
  nlohmann::json to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["pass"] = pass;
    j["seconds"] = seconds;
    j["notes"] = notes;
    j["verdicts"] = nlohmann::json::array();
    for (const auto& v : verdicts) j["verdicts"].push_back(verdict_to_json(v));
    return j;
  }
};

/// Runs the verification suites for one configuration and writes their
/// artifacts. The gap problem (bands, shifted potential, edge wave, cached
/// per-domain splits) is shared across suites.
class Campaign {
 public:
  Campaign(RunConfig cfg, std::filesystem::path out, int jobs = 1)
      : cfg_(std::move(cfg)), out_(std::move(out)), jobs_(std::max(1, jobs)) {
    std::filesystem::create_directories(out_);
  }

  const RunConfig& config() const { return cfg_; }

  const GapProblem& problem() {
    if (!prob_) {
      prob_ = cfg_.make_problem(jobs_);
      prob_->jobs = jobs_;
    }
    return *prob_;
  }

  // --- suites -----------------------------------------------------------------

  SuiteResult run_suite(const std::string& name) {
    const auto t0 = std::chrono::steady_clock::now();
    SuiteResult r;
    if (name == "minorant") r = suite_minorant();
    else if (name == "spectral") r = suite_spectral();
    else if (name == "bloch") r = suite_bloch();
    else if (name == "zeta") r = suite_zeta();
    else if (name == "rates") r = suite_rates();
    else if (name == "lp") r = suite_lp();
    else if (name == "gradient") r = suite_gradient();
    else throw Error("config", "unknown suite '" + name + "'");
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  }

  /// All requested suites; writes summary.json and summary.txt.
  std::pair<bool, nlohmann::json> run_full_report() {
    nlohmann::json j;
    j["seed"] = cfg_.seed;
    j["config"] = {{"potential", cfg_.potential_name},
                   {"q", cfg_.potential_q},
                   {"cells", cfg_.cells},
                   {"points_per_cell", cfg_.points_per_cell},
                   {"gap_index", cfg_.gap_index},
                   {"gap_shift", cfg_.gap_shift},
                   {"family", cfg_.family},
                   {"alpha", cfg_.alpha},
                   {"beta", cfg_.beta},
                   {"weight", cfg_.weight_name}};
    j["suites"] = nlohmann::json::array();
    bool all = true;
    std::vector<SuiteResult> results;
    for (const auto& s : cfg_.suites) {
      SuiteResult r = run_suite(s);
      all = all && r.pass;
      j["suites"].push_back(r.to_json());
      results.push_back(std::move(r));
    }
    // the assumption report is informational: the per-entry verdicts say
    // which structural assumptions the configured family certifies
    AssumptionReport ar = check_assumptions(cfg_.make_nonlinearity());
    nlohmann::json ja = nlohmann::json::array();
    for (const auto& e : ar.entries)
      ja.push_back({{"key", e.key},
                    {"description", e.description},
                    {"pass", e.pass},
                    {"required", e.required},
                    {"worst", e.worst},
                    {"window", e.window}});
    j["assumptions"] = ja;
    j["assumptions_pass_required"] = ar.passes_required();
    all = all && ar.passes_required();
    j["pass"] = all;
    write_json(out_ / "full_report.json", j);

    std::ofstream txt(out_ / "summary.txt");
    txt << "seed " << cfg_.seed << "\n";
    for (const auto& r : results) {
      txt << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  ("
          << format_double(r.seconds) << " s)\n";
      for (const auto& v : r.verdicts)
        if (!v.pass)
          txt << "      failed: " << v.name << "  value " << format_double(v.value)
              << " vs " << v.kind << " " << format_double(v.threshold) << "\n";
    }
    txt << (all ? "PASS" : "FAIL") << "  overall\n";
    return {all, j};
  }

  // --- individual commands ------------------------------------------------------

  void cmd_bands() {
    const GapProblem& p = problem();
    std::vector<std::string> header = {"k"};
    for (int j = 0; j < p.bands.n_bands(); ++j) header.push_back("E_" + std::to_string(j));
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < p.bands.n_k(); ++i) {
      std::vector<double> row = {p.bands.k[i]};
      for (int j = 0; j < p.bands.n_bands(); ++j) row.push_back(p.bands.energies(i, j));
      rows.push_back(std::move(row));
    }
    write_csv(out_ / "bands.csv", cfg_.seed, header, rows);
    SvgPlot plot("band functions (shifted potential)", "k", "E_j(k)", false);
    for (int j = 0; j < p.bands.n_bands(); ++j) {
      std::vector<double> xs(p.bands.n_k()), ys(p.bands.n_k());
      for (int i = 0; i < p.bands.n_k(); ++i) {
        xs[i] = p.bands.k[i];
        ys[i] = p.bands.energies(i, j);
      }
      plot.add_series("E_" + std::to_string(j), xs, ys);
    }
    plot.write(out_ / "bands.svg", cfg_.seed);
  }

  void cmd_split() {
    const GapProblem& p = problem();
    const auto& ws = p.workspace(cfg_.cells);
    const SpectralSplit& sp = ws.split(jobs_);
    nlohmann::json j;
    j["seed"] = cfg_.seed;
    j["gap"] = {{"a", sp.a_edge()}, {"b", sp.b_edge()}, {"width", sp.b_edge() - sp.a_edge()},
                {"band_below", p.gap.band_below}, {"band_above", p.gap.band_above}};
    j["alpha0"] = sp.alpha0();
    j["beta0"] = sp.beta0();
    j["dim_Y"] = sp.dim_Y();
    j["dim_Z"] = sp.dim_Z();
    j["cells"] = ws.grid.cells;
    j["points_per_cell"] = ws.grid.points_per_cell;
    write_json(out_ / "split.json", j);

    std::vector<std::vector<double>> rows;
    const double a = sp.a_edge(), b = sp.b_edge();
    for (int i = 1; i <= 9; ++i) {
      const double lam = a + 0.1 * i * (b - a);
      GapCoercivity c = coercivity(lam, sp);
      rows.push_back({lam, c.alpha, c.beta, c.N});
    }
    write_csv(out_ / "coercivity.csv", cfg_.seed,
              {"lambda", "alpha_lambda", "beta_lambda", "N_lambda"}, rows);
  }

  void cmd_solve(double lambda) {
    const GapProblem& p = problem();
    if (!p.gap.contains(lambda))
      throw Error("config", "lambda not in gap (" + format_double(p.gap.a) + ", " +
                                format_double(p.gap.b) + ")");
    const double d = p.gap.b - lambda;
    const auto& ws = p.workspace(p.cells_for_solve(d));
    const SpectralSplit& sp = ws.split(jobs_);
    Nonlinearity nl = cfg_.make_nonlinearity();
    EnergyModel model(ws.op, nl);
    GapDirection zeta = gap_direction(lambda, sp, p.wave, p.eta, ws.op);
    CriticalPoint cp = solve_localized(model, lambda, sp, p.localized_seed(ws.grid, d),
                                       cfg_.make_solver_config());
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < ws.grid.n; ++i) rows.push_back({ws.grid.x(i), cp.u[i]});
    write_csv(out_ / "solution.csv", cfg_.seed, {"x", "u"}, rows);
    LinkingBound lb = linking_upper_bound(model, lambda, sp, zeta.zeta, cfg_.ascent_iters);
    nlohmann::json j;
    j["seed"] = cfg_.seed;
    j["lambda"] = lambda;
    j["h1_norm"] = cp.h1_norm;
    j["l2_norm"] = ws.op.l2_norm(cp.u);
    j["linf_norm"] = cp.u.cwiseAbs().maxCoeff();
    j["energy"] = cp.energy;
    j["residual"] = cp.residual;
    j["iterations"] = cp.iterations;
    j["y_norm"] = cp.y_norm;
    j["z_norm"] = cp.z_norm;
    j["c_ub"] = lb.value;
    j["cells"] = ws.grid.cells;
    write_json(out_ / "solution.json", j);
  }

 private:
  // convex minorant: sandwich/convexity/asymptotics/pseudo-homogeneity on
  // random exponent pairs, plus closed form against quadrature
  SuiteResult suite_minorant() {
    SuiteResult r;
    r.name = "minorant";
    Rng rng(cfg_.seed ^ 0x6d696eull);
    std::vector<std::pair<double, double>> pairs;
    if (cfg_.family == "minorant") pairs.push_back({cfg_.alpha, cfg_.beta});
    pairs.push_back({cfg_.beta, cfg_.beta});
    pairs.push_back({3.0, 4.0});
    for (int i = 0; i < 10; ++i) {
      double a = rng.uniform(2.05, 5.6);
      double b = rng.uniform(a, 5.95);
      pairs.push_back({a, b});
    }
    for (auto [a, b] : pairs) {
      ConvexMinorant m(a, b);
      PropertyReport rep = check_minorant_properties(m, 10000, rng, 1e-12);
      for (auto v : rep.verdicts) {
        v.note = "alpha=" + format_double(a) + " beta=" + format_double(b);
        r.add(v);
      }
    }
    // closed form vs quadrature of the slope
    double worst = 0;
    for (auto [a, b] : {std::pair{3.0, 4.0}, std::pair{2.5, 5.5}, std::pair{4.0, 4.0}}) {
      ConvexMinorant m(a, b);
      for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform(-10.0, 10.0);
        const double exact = m.value(u);
        const double quad = minorant_value_by_quadrature(m, u);
        worst = std::max(worst, std::abs(exact - quad) / std::max(1.0, exact));
      }
    }
    r.add(upper_bound_verdict("closed form matches slope quadrature", worst, 1e-10));
    r.finish();

    nlohmann::json j;
    j["seed"] = cfg_.seed;
    j["pass"] = r.pass;
    j["verdicts"] = nlohmann::json::array();
    for (const auto& v : r.verdicts) j["verdicts"].push_back(verdict_to_json(v));
    write_json(out_ / "minorant_check.json", j);
    return r;
  }

  SuiteResult suite_spectral() {
    SuiteResult r;
    r.name = "spectral";
    Rng rng(cfg_.seed ^ 0x73706563ull);
    const GapProblem& p = problem();

    // constant shift identity
    {
      BandStructure b0 = bloch_bands(PeriodicPotential::zero(), cfg_.n_bands, cfg_.n_k,
                                     cfg_.points_per_cell, jobs_);
      BandStructure bc = bloch_bands(PeriodicPotential::constant(2.5), cfg_.n_bands,
                                     cfg_.n_k, cfg_.points_per_cell, jobs_);
      double worst = 0;
      for (int i = 0; i < b0.n_k(); ++i)
        for (int j = 0; j < b0.n_bands(); ++j)
          worst = std::max(worst, std::abs(bc.energies(i, j) - b0.energies(i, j) - 2.5));
      r.add(upper_bound_verdict("constant shift moves bands rigidly", worst, 1e-12));
    }

    // gap edges against a denser Brillouin sampling (4x), dense eigensolve
    {
      BandStructure fine = bloch_bands(p.potential, cfg_.n_bands, 4 * cfg_.n_k,
                                       cfg_.points_per_cell, jobs_);
      std::vector<SpectralGap> gaps = find_gaps(fine, 1e-6);
      double rel = 1.0;
      for (const auto& g : gaps)
        if (g.band_below == p.gap.band_below)
          rel = std::max(std::abs(g.a - p.gap.a) / std::max(1.0, std::abs(p.gap.a)),
                         std::abs(g.b - p.gap.b) / std::max(1.0, std::abs(p.gap.b)));
      r.add(upper_bound_verdict("gap edges stable under 4x momentum refinement", rel, 1e-6));
    }
    {
      BandStructure twice = bloch_bands(p.potential, cfg_.n_bands, 2 * cfg_.n_k,
                                        cfg_.points_per_cell, jobs_);
      std::vector<SpectralGap> gaps = find_gaps(twice, 1e-6);
      double drift = 1.0;
      for (const auto& g : gaps)
        if (g.band_below == p.gap.band_below)
          drift = std::max(std::abs(g.a - p.gap.a), std::abs(g.b - p.gap.b));
      r.add(upper_bound_verdict("gap edges stable under momentum doubling", drift, 1e-6));
    }

    // coercivity of the quadratic form on the splitting
    {
      const auto& ws = p.workspace(cfg_.cells);
      const SpectralSplit& sp = ws.split(jobs_);
      const double a = sp.a_edge(), b = sp.b_edge();
      double worst_y = -1e300, worst_z = -1e300, worst_n = -1e300, worst_add = 0;
      for (int i = 1; i <= 9; ++i) {
        const double lam = a + 0.1 * i * (b - a);
        GapCoercivity c = coercivity(lam, sp);
        for (int k = 0; k < 100; ++k) {
          Vector y = sp.random_Y(rng);
          y /= ws.op.h1_norm(y);
          Vector z = sp.apply_Q(rng.gaussian_vector(ws.grid.n));
          z /= ws.op.h1_norm(z);
          const double qy = ws.op.quadratic_form(y, lam);
          const double qz = ws.op.quadratic_form(z, lam);
          worst_y = std::max(worst_y, qy + c.alpha);
          worst_z = std::max(worst_z, c.beta - qz);
          Vector s = y + z;
          worst_n = std::max(worst_n, c.N * ws.op.h1_norm2(s) - (qz - qy));
          if (i == 1 && k < 50) {
            const double q0 =
                std::abs(ws.op.quadratic_form(s, 0.0) - ws.op.quadratic_form(y, 0.0) -
                         ws.op.quadratic_form(z, 0.0));
            worst_add = std::max(worst_add, q0);
          }
        }
      }
      r.add(upper_bound_verdict("form negative on Y with margin alpha_lambda", worst_y, 1e-8));
      r.add(upper_bound_verdict("form positive on Z with margin beta_lambda", worst_z, 1e-8));
      r.add(upper_bound_verdict("splitting inequality with margin N_lambda", worst_n, 1e-8));
      r.add(upper_bound_verdict("form additive across the splitting", worst_add, 1e-10));
    }
    r.finish();
    cmd_bands();
    cmd_split();
    return r;
  }

  SuiteResult suite_bloch() {
    SuiteResult r;
    r.name = "bloch";
    const GapProblem& p = problem();
    const auto& ws = p.workspace(cfg_.cells);
    r.add(upper_bound_verdict("edge wave residual", bloch_wave_residual(p.wave, ws.op), 1e-6));
    double ms = 0;
    for (int q = 0; q < p.points_per_cell; ++q)
      ms += std::norm(p.wave.cell_profile[q]) / p.points_per_cell;
    r.add(upper_bound_verdict("edge wave cell normalization", std::abs(ms - 1.0), 1e-10));
    if (!p.wave.lattice_momentum)
      r.notes.push_back("edge momentum off the lattice: real part used, k* = " +
                        format_double(p.wave.k_star));

    PropertyReport rep =
        verify_bloch_properties(p, cfg_.bloch_r_list, cfg_.make_weight(), cfg_.gamma_list);
    r.add_all(rep.verdicts);
    r.finish();
    write_report(out_, "bloch_properties", cfg_.seed, rep);
    SvgPlot plot("packet scaling at the gap edge", "R", "scaled quantity", true);
    auto rs = rep.column("R");
    for (size_t c = 1; c < rep.columns.size(); ++c)
      plot.add_series(rep.columns[c], rs, rep.column(rep.columns[c]));
    plot.write(out_ / "bloch_properties.svg", cfg_.seed);
    return r;
  }

  SuiteResult suite_zeta() {
    SuiteResult r;
    r.name = "zeta";
    const GapProblem& p = problem();
    PropertyReport rep =
        verify_zeta_estimates(p, cfg_.zeta_d_list(), cfg_.make_weight(), cfg_.gamma_list);
    r.add_all(rep.verdicts);
    r.finish();
    write_report(out_, "zeta_estimates", cfg_.seed, rep);
    SvgPlot plot("gap direction estimates", "b - lambda", "scaled quantity", true);
    auto ds = rep.column("d");
    for (size_t c = 2; c < rep.columns.size(); ++c)
      plot.add_series(rep.columns[c], ds, rep.column(rep.columns[c]));
    plot.write(out_ / "zeta_estimates.svg", cfg_.seed);
    return r;
  }

  SuiteResult suite_rates() {
    SuiteResult r;
    r.name = "rates";
    Rng rng(cfg_.seed ^ 0x72617465ull);
    const GapProblem& p = problem();
    Nonlinearity nl = cfg_.make_nonlinearity();
    SweepConfig sc;
    sc.points = cfg_.sweep_points;
    sc.d0_frac = cfg_.sweep_d0_frac;
    sc.dmin_frac = cfg_.sweep_dmin_frac;
    sc.ascent_iters = cfg_.ascent_iters;
    sc.boundary_samples = cfg_.boundary_samples;
    sc.solver = cfg_.make_solver_config();

    std::vector<CriticalPoint> sols;
    std::vector<BranchPoint> pts = sweep(p, nl, sc, rng, &sols);

    // branch CSV
    {
      std::vector<std::vector<double>> rows;
      for (const auto& b : pts)
        rows.push_back({b.lambda, b.d, b.h1_norm, b.l2_norm, b.linf_norm, b.energy, b.c_ub,
                        b.N_lambda, b.converged ? 1.0 : 0.0});
      write_csv(out_ / "branch.csv", cfg_.seed,
                {"lambda", "d", "h1_norm", "l2_norm", "linf_norm", "energy", "c_ub",
                 "N_lambda", "converged"},
                rows);
    }

    const double dmax = cfg_.fit_dmax_frac * p.gap.width();
    RateCheckReport tr = check_rates(pts, nl.beta(), cfg_.dimension, dmax);
    r.add_all(tr.verdicts);

    // pointwise level bounds and sign
    double worst_low = -1e300, worst_high = -1e300;
    for (const auto& b : pts) {
      if (!b.converged) continue;
      worst_low = std::max(worst_low, -b.energy);
      worst_high = std::max(worst_high, b.energy - b.c_ub);
    }
    r.add(upper_bound_verdict("critical level nonnegative", worst_low, 1e-8));
    r.add(upper_bound_verdict("critical level below the linking bound", worst_high, 1e-6));

    // monotone vanishing over the converged tail (5% slack per step)
    {
      std::vector<const BranchPoint*> conv;
      for (const auto& b : pts)
        if (b.converged) conv.push_back(&b);
      double worst = 0;
      const size_t start = conv.size() > 5 ? conv.size() - 5 : 0;
      for (size_t i = start + 1; i < conv.size(); ++i) {
        worst = std::max(worst, conv[i]->h1_norm / conv[i - 1]->h1_norm - 1.05);
        worst = std::max(worst, conv[i]->energy / conv[i - 1]->energy - 1.05);
      }
      r.add(upper_bound_verdict("norm and energy vanish monotonically on the tail", worst,
                                0.0));
    }

    // splitting inequality at the computed solutions (recorded in-sweep)
    {
      double worst = -1e300;
      for (const auto& bpt : pts) {
        if (!bpt.converged) continue;
        const double lhs = bpt.beta_lambda * bpt.z_h1 * bpt.z_h1 +
                           bpt.alpha_lambda * bpt.y_h1 * bpt.y_h1;
        const double rhs = bpt.form_z - bpt.form_y;
        worst = std::max(worst, lhs - rhs);
      }
      r.add(upper_bound_verdict("splitting inequality at the solutions", worst, 1e-6));
    }

    // independent residual: rebuilt operator, plain algebra
    {
      double worst = 0;
      for (const auto& cp : sols) {
        const int cells = int(cp.u.size()) / cfg_.points_per_cell;
        Grid1D g = Grid1D::make(cells, cfg_.points_per_cell);
        DiscreteOperator rebuilt(g, p.potential);
        EnergyModel model(rebuilt, nl);
        worst = std::max(worst, rebuilt.l2_norm(model.gradient(cp.u, cp.lambda)));
      }
      r.add(upper_bound_verdict("residual under a rebuilt operator", worst, 1e-8));
    }
    r.finish();

    // fits JSON
    nlohmann::json j;
    j["seed"] = cfg_.seed;
    j["d_max"] = dmax;
    auto fit_json = [](const RateFit& f) {
      return nlohmann::json{{"observable", f.observable}, {"theta", f.theta},
                            {"intercept", f.intercept},   {"r2", f.r2},
                            {"n_used", f.n_used},         {"d_max", f.d_max}};
    };
    j["fits"] = {fit_json(tr.norm_fit), fit_json(tr.energy_fit), fit_json(tr.c_fit)};
    j["norm_reference"] = tr.norm_reference;
    j["energy_reference"] = tr.energy_reference;
    j["norm_claim_applicable"] = tr.norm_claim_applicable;
    j["ratio_tail_maxmin"] = tr.ratio_tail_maxmin;
    j["verdicts"] = nlohmann::json::array();
    for (const auto& v : r.verdicts) j["verdicts"].push_back(verdict_to_json(v));
    write_json(out_ / "rate_fits.json", j);

    // plots with reference-slope guides
    std::vector<double> ds, h1s, es, cs;
    for (const auto& b : pts)
      if (b.converged) {
        ds.push_back(b.d);
        h1s.push_back(b.h1_norm);
        es.push_back(b.energy);
        cs.push_back(b.c_ub);
      }
    SvgPlot pn("branch norm vs gap distance", "b - lambda", "|u|_H1", true);
    pn.add_series("h1_norm", ds, h1s);
    pn.add_guide("reference slope " + format_double(tr.norm_reference), tr.norm_reference);
    pn.write(out_ / "branch_norm.svg", cfg_.seed);
    SvgPlot pe("branch energy vs gap distance", "b - lambda", "energy", true);
    pe.add_series("energy", ds, es);
    pe.add_series("c_ub", ds, cs);
    pe.add_guide("reference slope " + format_double(tr.energy_reference),
                 tr.energy_reference);
    pe.write(out_ / "branch_energy.svg", cfg_.seed);
    return r;
  }

  SuiteResult suite_lp() {
    SuiteResult r;
    r.name = "lp";
    Rng rng(cfg_.seed ^ 0x6c70ull);
    const GapProblem& p = problem();
    LpProbeSet probes = LpProbeSet::make(cfg_.seed ^ 0x70726f62ull, p.wave.k_star);

    PropertyReport scan = lp_continuity_scan(p.potential, cfg_.points_per_cell,
                                             cfg_.lp_cells, probes, cfg_.lp_p_list, jobs_);
    r.add_all(scan.verdicts);
    write_report(out_, "lp_scan", cfg_.seed, scan);

    // Riesz contour projector against the eigenbasis projector
    const auto& ws = p.workspace(cfg_.lp_cells);
    const SpectralSplit& sp = ws.split(jobs_);
    Matrix U(ws.grid.n, 20);
    for (int c = 0; c < U.cols(); ++c) U.col(c) = rng.gaussian_vector(ws.grid.n);
    auto riesz_error = [&](int nodes) {
      ContourSpec contour = make_contour(sp, nodes);
      Matrix PU = riesz_apply(ws.op, contour, U, jobs_);
      double worst = 0;
      for (int c = 0; c < U.cols(); ++c) {
        Vector diff = PU.col(c) - sp.apply_P(U.col(c));
        worst = std::max(worst, ws.op.l2_norm(diff) / ws.op.l2_norm(U.col(c)));
      }
      return worst;
    };
    const double err_full = riesz_error(cfg_.riesz_nodes_per_side);
    r.add(upper_bound_verdict("contour projector matches the eigenbasis projector",
                              err_full, 1e-8));
    const double err_coarse = riesz_error(std::max(4, cfg_.riesz_nodes_per_side / 4));
    const double err_half = riesz_error(std::max(8, cfg_.riesz_nodes_per_side / 2));
    r.add(upper_bound_verdict("contour error drops when nodes double",
                              err_half / err_coarse, 1.0));
    {
      ContourSpec contour = make_contour(sp, cfg_.riesz_nodes_per_side);
      Matrix V5 = U.leftCols(5);
      Matrix P1 = riesz_apply(ws.op, contour, V5, jobs_);
      Matrix P2 = riesz_apply(ws.op, contour, P1, jobs_);
      double worst = 0;
      for (int c = 0; c < 5; ++c)
        worst = std::max(worst, ws.op.l2_norm(Vector(P2.col(c) - P1.col(c))) /
                                    ws.op.l2_norm(Vector(P1.col(c))));
      r.add(upper_bound_verdict("contour projector idempotent", worst, 1e-8));
    }

    // direct sum in Lp: reconstruction + transversality, stable under refinement
    nlohmann::json sums = nlohmann::json::array();
    for (double pp : cfg_.lp_p_list) {
      SumReport s = lp_direct_sum_check(sp, ws.op, probes, pp, rng);
      r.add(upper_bound_verdict("reconstruction in p=" + format_double(pp),
                                s.reconstruction_max, 1e-10));
      r.add(lower_bound_verdict("transversality margin in p=" + format_double(pp),
                                s.margin, 1e-6));
      if (pp == 2.0)
        r.add(upper_bound_verdict("orthonormal margin is sqrt(2)",
                                  std::abs(s.margin - std::sqrt(2.0)), 1e-8));
      // refinement stability of the margin
      Grid1D g2 = Grid1D::make(cfg_.lp_cells, 2 * cfg_.points_per_cell);
      DiscreteOperator op2(g2, p.potential);
      SpectralSplit sp2 = SpectralSplit::from_operator(op2, jobs_);
      Rng rng2(cfg_.seed ^ 0x6d726566ull);
      SumReport s2 = lp_direct_sum_check(sp2, op2, probes, pp, rng2);
      r.add(lower_bound_verdict("margin stable under refinement in p=" + format_double(pp),
                                s2.margin, s.margin / 1.5));
      sums.push_back({{"p", pp},
                      {"reconstruction_max", s.reconstruction_max},
                      {"margin", s.margin},
                      {"margin_refined", s2.margin}});
    }
    r.finish();
    nlohmann::json j;
    j["seed"] = cfg_.seed;
    j["riesz_error"] = err_full;
    j["riesz_error_coarse"] = err_coarse;
    j["riesz_error_half"] = err_half;
    j["direct_sum"] = sums;
    j["pass"] = r.pass;
    write_json(out_ / "lp_checks.json", j);
    return r;
  }

  SuiteResult suite_gradient() {
    SuiteResult r;
    r.name = "gradient";
    Rng rng(cfg_.seed ^ 0x67726164ull);
    const GapProblem& p = problem();
    const auto& ws = p.workspace(cfg_.cells);
    Nonlinearity nl = cfg_.make_nonlinearity();
    EnergyModel model(ws.op, nl);
    const double lambda = p.gap.a + 0.6 * p.gap.width();
    const double eps = 1e-5;
    double worst = 0;
    for (int k = 0; k < 20; ++k) {
      Vector u = 0.5 * rng.gaussian_vector(ws.grid.n);
      Vector v = rng.gaussian_vector(ws.grid.n);
      v /= ws.op.l2_norm(v);
      const double fd =
          (model.value(u + eps * v, lambda) - model.value(u - eps * v, lambda)) /
          (2.0 * eps);
      const double ip = ws.op.dot(model.gradient(u, lambda), v);
      worst = std::max(worst, std::abs(fd - ip) / std::max(1.0, std::abs(ip)));
    }
    r.add(upper_bound_verdict("gradient matches central differences", worst, 1e-6));
    r.finish();
    nlohmann::json j;
    j["seed"] = cfg_.seed;
    j["worst_relative_error"] = worst;
    j["pass"] = r.pass;
    write_json(out_ / "gradient_check.json", j);
    return r;
  }

  RunConfig cfg_;
  std::filesystem::path out_;
  int jobs_;
  std::optional<GapProblem> prob_;
};

}  // namespace gaplab
