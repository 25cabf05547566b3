#include "gaplab/campaign.hpp"
#include "gaplab/config.hpp"
#include "gaplab/report.hpp"
#include "gaplab/svg.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

using namespace gaplab;

namespace {
std::filesystem::path write_tmp(const std::string& name, const std::string& body) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream out(p);
  out << body;
  return p;
}
}  // namespace

TEST_CASE("config parses keys, comments and lists") {
  auto p = write_tmp("gaplab_cfg_ok.cfg",
                     "# comment\n"
                     "potential.name = mathieu\n"
                     "potential.q = 0.5   # inline comment\n"
                     "grid.cells = 12\n"
                     "bloch.r_list = 4, 8, 16\n"
                     "lp.p_list = 2, 4, inf\n"
                     "random.seed = 777\n");
  RunConfig cfg = RunConfig::from_file(p);
  CHECK(cfg.potential_q == 0.5);
  CHECK(cfg.cells == 12);
  CHECK(cfg.bloch_r_list == std::vector<double>{4, 8, 16});
  CHECK(std::isinf(cfg.lp_p_list.back()));
  CHECK(cfg.seed == 777);
}

TEST_CASE("unknown keys are rejected with location") {
  auto p = write_tmp("gaplab_cfg_bad.cfg", "grid.cellz = 12\n");
  try {
    RunConfig::from_file(p);
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(e.tag() == "config");
    CHECK(std::string(e.what()).find("grid.cellz") != std::string::npos);
    CHECK(std::string(e.what()).find(":1") != std::string::npos);
  }
}

TEST_CASE("validation rejects out-of-range values") {
  RunConfig cfg;
  cfg.dimension = 2;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = RunConfig{};
  cfg.gap_shift = 1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = RunConfig{};
  cfg.beta = 7.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = RunConfig{};
  cfg.suites = {"nonsense"};
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = RunConfig{};
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("malformed numbers are reported with the key") {
  auto p = write_tmp("gaplab_cfg_num.cfg", "potential.q = fast\n");
  try {
    RunConfig::from_file(p);
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("potential.q") != std::string::npos);
  }
}

TEST_CASE("csv writer: seed header and 17-digit round trip") {
  auto dir = std::filesystem::temp_directory_path();
  auto p = dir / "gaplab_report.csv";
  const double v = 0.1 + 0.2;  // not representable exactly
  write_csv(p, 42, {"a", "b"}, {{v, 1.0 / 3.0}});
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  CHECK(line == "# seed=42");
  std::getline(in, line);
  CHECK(line == "a,b");
  std::getline(in, line);
  auto comma = line.find(',');
  CHECK(std::stod(line.substr(0, comma)) == v);
  CHECK(std::stod(line.substr(comma + 1)) == 1.0 / 3.0);
}

TEST_CASE("verdict helpers") {
  Verdict v = bounded_window_verdict("w", {1.0, 2.0, 3.0, 4.0}, 10.0, 3);
  CHECK(v.value == Catch::Approx(2.0));
  CHECK(v.pass);
  Verdict bad = bounded_window_verdict("w", {1.0, 1.0, 1.0, 100.0}, 10.0, 3);
  CHECK_FALSE(bad.pass);
  CHECK(lower_bound_verdict("l", 2.0, 1.0).pass);
  CHECK_FALSE(lower_bound_verdict("l", 0.5, 1.0).pass);
  CHECK(upper_bound_verdict("u", 0.5, 1.0).pass);
}

TEST_CASE("property report columns and json") {
  PropertyReport r;
  r.title = "t";
  r.columns = {"x", "y"};
  r.rows = {{1.0, 2.0}, {3.0, 4.0}};
  r.verdicts.push_back(upper_bound_verdict("ok", 0.0, 1.0));
  CHECK(r.column("y") == std::vector<double>{2.0, 4.0});
  CHECK_THROWS_AS(r.column("z"), Error);
  auto j = report_to_json(r, 7);
  CHECK(j["pass"] == true);
  CHECK(j["seed"] == 7);
}

TEST_CASE("svg plot writes finite geometry") {
  SvgPlot plot("demo", "x", "y", true);
  plot.add_series("s", {1e-3, 1e-2, 1e-1}, {2e-3, 6e-3, 2e-2});
  plot.add_guide("slope 0.5", 0.5);
  auto p = std::filesystem::temp_directory_path() / "gaplab_plot.svg";
  plot.write(p, 9);
  std::ifstream in(p);
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(all.find("<svg") != std::string::npos);
  CHECK(all.find("seed=9") != std::string::npos);
  CHECK(all.find("nan") == std::string::npos);
}

TEST_CASE("solve command validates lambda and writes artifacts") {
  RunConfig cfg;
  cfg.cells = 8;
  auto out = std::filesystem::temp_directory_path() / "gaplab_solve_test";
  std::filesystem::remove_all(out);
  {
    Campaign campaign(cfg, out);
    try {
      campaign.cmd_solve(5.0);
      FAIL("expected a validation error");
    } catch (const Error& e) {
      CHECK(e.tag() == "config");
      CHECK(std::string(e.what()).find("lambda not in gap") != std::string::npos);
    }
  }
  {
    Campaign campaign(cfg, out);
    const double lambda = campaign.problem().gap.b - 0.05;
    campaign.cmd_solve(lambda);
    CHECK(std::filesystem::exists(out / "solution.csv"));
    CHECK(std::filesystem::exists(out / "solution.json"));
    std::ifstream in(out / "solution.json");
    nlohmann::json j = nlohmann::json::parse(in);
    CHECK(j["lambda"].get<double>() == Catch::Approx(lambda));
    CHECK(j["residual"].get<double>() < 1e-8);
    CHECK(j["h1_norm"].get<double>() > 1e-6);
    CHECK(j["energy"].get<double>() > 0.0);
  }
}

TEST_CASE("light campaign suites pass on the default configuration") {
  RunConfig cfg;
  auto out = std::filesystem::temp_directory_path() / "gaplab_suite_test";
  std::filesystem::remove_all(out);
  Campaign campaign(cfg, out);
  for (const std::string name : {"minorant", "gradient", "spectral"}) {
    SuiteResult r = campaign.run_suite(name);
    INFO(name);
    CHECK(r.pass);
  }
  CHECK(std::filesystem::exists(out / "minorant_check.json"));
  CHECK(std::filesystem::exists(out / "bands.csv"));
  CHECK(std::filesystem::exists(out / "coercivity.csv"));
}
