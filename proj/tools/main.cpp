// Command-line driver: wires a config file to the verification suites and
// writes CSV/JSON/SVG artifacts. Exit codes: 0 success, 1 suite failure,
// 2 config/usage error, 3 runtime failure.

#include "gaplab/campaign.hpp"
#include "gaplab/config.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

using namespace gaplab;

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string out_dir;
  long long seed = -1;
  int jobs = 1;
  double lambda = std::numeric_limits<double>::quiet_NaN();
};

RunConfig load_config(const GlobalArgs& g) {
  RunConfig cfg = g.config_path.empty() ? RunConfig{} : RunConfig::from_file(g.config_path);
  if (!g.out_dir.empty()) cfg.output_dir = g.out_dir;
  if (g.seed >= 0) cfg.seed = std::uint64_t(g.seed);
  cfg.validate();
  return cfg;
}

int run_suites(Campaign& campaign, const std::vector<std::string>& names) {
  bool all = true;
  for (const auto& n : names) {
    SuiteResult r = campaign.run_suite(n);
    std::printf("%s  %s  (%.2f s)\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.seconds);
    for (const auto& v : r.verdicts)
      if (!v.pass)
        std::printf("      failed: %s  value %s vs %s %s\n", v.name.c_str(),
                    format_double(v.value).c_str(), v.kind.c_str(),
                    format_double(v.threshold).c_str());
    for (const auto& note : r.notes) std::printf("      note: %s\n", note.c_str());
    all = all && r.pass;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral-gap bifurcation laboratory"};
  app.require_subcommand(1);

  GlobalArgs g;
  app.add_option("--config", g.config_path, "config file (flat key = value)");
  app.add_option("--out", g.out_dir, "output directory (overrides output.dir)");
  app.add_option("--seed", g.seed, "random seed (overrides random.seed)");
  app.add_option("--jobs", g.jobs, "worker threads for independent computations");

  auto* c_bands = app.add_subcommand("bands", "band functions as CSV + SVG");
  auto* c_split = app.add_subcommand("split", "gap edges, projector data, coercivity table");
  auto* c_bloch = app.add_subcommand("bloch-check", "packet scaling report");
  auto* c_zeta = app.add_subcommand("zeta-check", "gap-direction estimates report");
  auto* c_minorant = app.add_subcommand("minorant-check", "convex minorant report");
  auto* c_solve = app.add_subcommand("solve", "one nontrivial solution at --lambda");
  c_solve->add_option("--lambda", g.lambda, "spectral parameter inside the gap")->required();
  auto* c_sweep = app.add_subcommand("sweep", "branch sweep, rate fits, plots");
  auto* c_lp = app.add_subcommand("lp-check", "projector Lp continuity and contour checks");
  auto* c_full = app.add_subcommand("full-report", "all configured suites + summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 2 : 0;
  }

  try {
    RunConfig cfg = load_config(g);
    Campaign campaign(cfg, cfg.output_dir, g.jobs);

    if (c_bands->parsed()) {
      campaign.cmd_bands();
      std::printf("wrote %s/bands.csv and bands.svg\n", cfg.output_dir.c_str());
      return 0;
    }
    if (c_split->parsed()) {
      campaign.cmd_split();
      std::printf("wrote %s/split.json and coercivity.csv\n", cfg.output_dir.c_str());
      return 0;
    }
    if (c_solve->parsed()) {
      campaign.cmd_solve(g.lambda);
      std::printf("wrote %s/solution.csv and solution.json\n", cfg.output_dir.c_str());
      return 0;
    }
    if (c_bloch->parsed()) return run_suites(campaign, {"bloch"});
    if (c_zeta->parsed()) return run_suites(campaign, {"zeta"});
    if (c_minorant->parsed()) return run_suites(campaign, {"minorant"});
    if (c_sweep->parsed()) return run_suites(campaign, {"rates"});
    if (c_lp->parsed()) return run_suites(campaign, {"lp"});
    if (c_full->parsed()) {
      auto [pass, json] = campaign.run_full_report();
      (void)json;
      for (const auto& s : cfg.suites) (void)s;
      std::ifstream summary(std::filesystem::path(cfg.output_dir) / "summary.txt");
      std::cout << summary.rdbuf();
      return pass ? 0 : 1;
    }
  } catch (const Error& e) {
    if (e.tag() == "config" || e.tag() == "domain" || e.tag() == "gap") {
      std::fprintf(stderr, "config error: %s\n", e.what());
      return 2;
    }
    std::fprintf(stderr, "error [%s]: %s\n", e.tag().c_str(), e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 2;
}
