#pragma once

#include "gaplab/gap_problem.hpp"
#include "gaplab/nonlinearity.hpp"
#include "gaplab/solver.hpp"
#include "gaplab/util.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace gaplab {

/// Run configuration, read from a flat key = value file. Unknown keys are
/// rejected; every output file records the seed. The full key schema is
/// listed in the README and in `RunConfig::schema()`.
struct RunConfig {
  // potential
  std::string potential_name = "mathieu";
  double potential_q = 1.0;
  double potential_value = 0.0;
  int dimension = 1;
  // grid / bands
  int cells = 16;
  int points_per_cell = 32;
  int n_bands = 6;
  int n_k = 64;
  // gap
  int gap_index = 0;
  double gap_shift = 0.5;
  // nonlinearity
  std::string family = "pure_power";
  double alpha = 4.0;
  double beta = 4.0;
  std::string weight_name = "one_plus_cos";
  double weight_value = 1.0;
  // solver
  double solver_tol = 1e-9;
  int solver_max_iter = 50;
  double solver_damping = 1e-4;
  // linking
  int ascent_iters = 40;
  int boundary_samples = 200;
  // sweep + fits
  int sweep_points = 12;
  double sweep_d0_frac = 0.2;
  double sweep_dmin_frac = 1e-3;
  double fit_dmax_frac = 0.1;
  // scale lists
  std::vector<double> bloch_r_list = {8, 16, 32, 64};
  std::vector<double> zeta_d_exponents = {-1.0, -1.5, -2.0, -2.5, -3.0};
  std::vector<double> gamma_list = {2, 4};
  // Lp suite
  std::vector<double> lp_p_list = {2, 3, 4, 6,
                                   std::numeric_limits<double>::infinity()};
  int lp_cells = 16;
  int riesz_nodes_per_side = 128;
  // campaign
  std::vector<std::string> suites = {"minorant", "spectral", "bloch", "zeta",
                                     "rates",    "lp",       "gradient"};
  std::string output_dir = "out";
  std::uint64_t seed = 12345;

  struct KeyDoc {
    std::string key;
    std::string type;
    std::string doc;
  };
  static const std::vector<KeyDoc>& schema();

  static RunConfig from_file(const std::filesystem::path& path);
  void apply(const std::string& key, const std::string& value);
  void validate() const;

  PeriodicPotential make_potential() const {
    if (potential_name == "mathieu") return PeriodicPotential::mathieu(potential_q);
    if (potential_name == "constant") return PeriodicPotential::constant(potential_value);
    if (potential_name == "zero") return PeriodicPotential::zero();
    throw Error("config", "unknown potential.name '" + potential_name + "'");
  }

  PeriodicWeight make_weight() const {
    if (weight_name == "one_plus_cos") return PeriodicWeight::one_plus_cos();
    if (weight_name == "constant") return PeriodicWeight::constant(weight_value);
    throw Error("config", "unknown weight.name '" + weight_name + "'");
  }

  Nonlinearity make_nonlinearity() const {
    if (family == "pure_power")
      return Nonlinearity::pure_power(beta, make_weight(), dimension);
    if (family == "minorant")
      return Nonlinearity::minorant(alpha, beta, make_weight(), dimension);
    throw Error("config", "unknown nonlinearity.family '" + family + "'");
  }

  GapProblem make_problem(int jobs = 1) const {
    return make_gap_problem(make_potential(), points_per_cell, n_k, gap_index,
                            gap_shift, cells, 1e-6, n_bands, jobs);
  }

  SolverConfig make_solver_config() const {
    SolverConfig s;
    s.tol = solver_tol;
    s.max_iter = solver_max_iter;
    s.damping_min = solver_damping;
    s.dimension = dimension;
    return s;
  }

  std::vector<double> zeta_d_list() const {
    std::vector<double> d;
    for (double e : zeta_d_exponents) d.push_back(std::pow(10.0, e));
    return d;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  size_t b = s.find_last_not_of(" \t\r\n");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  if (v == "inf") return std::numeric_limits<double>::infinity();
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw Error("config", "key '" + key + "': cannot parse '" + v + "' as a number");
  }
}

inline int parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    long n = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return int(n);
  } catch (const std::exception&) {
    throw Error("config", "key '" + key + "': cannot parse '" + v + "' as an integer");
  }
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split_list(v)) out.push_back(parse_double(key, s));
  return out;
}

}  // namespace detail

inline const std::vector<RunConfig::KeyDoc>& RunConfig::schema() {
  static const std::vector<KeyDoc> s = {
      {"potential.name", "string", "mathieu | constant | zero"},
      {"potential.q", "real", "mathieu amplitude: V(x) = 2 q cos(2 pi x)"},
      {"potential.value", "real", "constant potential value"},
      {"potential.dimension", "int", "spatial dimension (this build: 1)"},
      {"grid.cells", "int", "minimum domain length in period cells"},
      {"grid.points_per_cell", "int", "grid points per period cell"},
      {"bands.count", "int", "number of bands to compute"},
      {"bands.n_k", "int", "quasi-momentum samples over the Brillouin zone"},
      {"gap.index", "int", "which gap to study, 0 = first"},
      {"gap.shift", "real", "where 0 lands across the gap, in (0,1); 0.5 = midpoint"},
      {"nonlinearity.family", "string", "pure_power | minorant"},
      {"nonlinearity.alpha", "real", "superquadraticity exponent (minorant family)"},
      {"nonlinearity.beta", "real", "pinching/growth exponent"},
      {"weight.name", "string", "one_plus_cos | constant"},
      {"weight.value", "real", "constant weight value"},
      {"solver.tol", "real", "Newton residual tolerance, relative to |u|_H1"},
      {"solver.max_iter", "int", "Newton iteration cap"},
      {"solver.damping", "real", "smallest Newton damping factor"},
      {"linking.ascent_iters", "int", "ascent iterations for the level upper bound"},
      {"linking.boundary_samples", "int", "boundary samples for the linking set"},
      {"sweep.points", "int", "number of sweep points"},
      {"sweep.d0_frac", "real", "first gap distance / gap width"},
      {"sweep.dmin_frac", "real", "last gap distance / gap width"},
      {"fit.dmax_frac", "real", "rate-fit window: d <= dmax_frac * gap width"},
      {"bloch.r_list", "list", "packet scales R"},
      {"zeta.d_exponents", "list", "gap distances 10^e for the edge-direction suite"},
      {"gamma.list", "list", "weighted-integral exponents"},
      {"lp.p_list", "list", "Lebesgue exponents (inf = max norm)"},
      {"lp.cells", "int", "domain cells for the Lp suite"},
      {"riesz.nodes_per_side", "int", "contour quadrature nodes per rectangle side"},
      {"checks.suites", "list", "suites run by full-report"},
      {"output.dir", "string", "artifact directory"},
      {"random.seed", "int", "seed recorded in every output header"},
  };
  return s;
}

inline void RunConfig::apply(const std::string& key, const std::string& value) {
  using detail::parse_double;
  using detail::parse_double_list;
  using detail::parse_int;
  if (key == "potential.name") potential_name = value;
  else if (key == "potential.q") potential_q = parse_double(key, value);
  else if (key == "potential.value") potential_value = parse_double(key, value);
  else if (key == "potential.dimension") dimension = parse_int(key, value);
  else if (key == "grid.cells") cells = parse_int(key, value);
  else if (key == "grid.points_per_cell") points_per_cell = parse_int(key, value);
  else if (key == "bands.count") n_bands = parse_int(key, value);
  else if (key == "bands.n_k") n_k = parse_int(key, value);
  else if (key == "gap.index") gap_index = parse_int(key, value);
  else if (key == "gap.shift") gap_shift = parse_double(key, value);
  else if (key == "nonlinearity.family") family = value;
  else if (key == "nonlinearity.alpha") alpha = parse_double(key, value);
  else if (key == "nonlinearity.beta") beta = parse_double(key, value);
  else if (key == "weight.name") weight_name = value;
  else if (key == "weight.value") weight_value = parse_double(key, value);
  else if (key == "solver.tol") solver_tol = parse_double(key, value);
  else if (key == "solver.max_iter") solver_max_iter = parse_int(key, value);
  else if (key == "solver.damping") solver_damping = parse_double(key, value);
  else if (key == "linking.ascent_iters") ascent_iters = parse_int(key, value);
  else if (key == "linking.boundary_samples") boundary_samples = parse_int(key, value);
  else if (key == "sweep.points") sweep_points = parse_int(key, value);
  else if (key == "sweep.d0_frac") sweep_d0_frac = parse_double(key, value);
  else if (key == "sweep.dmin_frac") sweep_dmin_frac = parse_double(key, value);
  else if (key == "fit.dmax_frac") fit_dmax_frac = parse_double(key, value);
  else if (key == "bloch.r_list") bloch_r_list = parse_double_list(key, value);
  else if (key == "zeta.d_exponents") zeta_d_exponents = parse_double_list(key, value);
  else if (key == "gamma.list") gamma_list = parse_double_list(key, value);
  else if (key == "lp.p_list") lp_p_list = parse_double_list(key, value);
  else if (key == "lp.cells") lp_cells = parse_int(key, value);
  else if (key == "riesz.nodes_per_side") riesz_nodes_per_side = parse_int(key, value);
  else if (key == "checks.suites") {
    suites.clear();
    for (const auto& s : detail::split_list(value)) suites.push_back(s);
  } else if (key == "output.dir") output_dir = value;
  else if (key == "random.seed") seed = std::stoull(value);
  else throw Error("config", "unknown key '" + key + "'");
}

inline RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("config", "cannot open config file " + path.string());
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("config", path.string() + ":" + std::to_string(lineno) +
                                ": expected 'key = value'");
    std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    try {
      cfg.apply(key, value);
    } catch (const Error& e) {
      throw Error("config",
                  path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

inline void RunConfig::validate() const {
  if (dimension == 2)
    throw Error("config",
                "potential.dimension = 2 (separable) is not built here; use dimension = 1");
  if (dimension != 1) throw Error("config", "potential.dimension must be 1");
  if (potential_name != "mathieu" && potential_name != "constant" &&
      potential_name != "zero")
    throw Error("config", "unknown potential.name '" + potential_name + "'");
  if (family != "pure_power" && family != "minorant")
    throw Error("config", "unknown nonlinearity.family '" + family + "'");
  if (weight_name != "one_plus_cos" && weight_name != "constant")
    throw Error("config", "unknown weight.name '" + weight_name + "'");
  if (cells < 4) throw Error("config", "grid.cells must be at least 4");
  if (points_per_cell < 8) throw Error("config", "grid.points_per_cell must be at least 8");
  if (n_bands < 2) throw Error("config", "bands.count must be at least 2");
  if (n_k < 8) throw Error("config", "bands.n_k must be at least 8");
  if (!(gap_shift > 0 && gap_shift < 1))
    throw Error("config", "gap.shift must lie strictly between 0 and 1");
  if (gap_index < 0) throw Error("config", "gap.index must be nonnegative");
  if (!(sweep_d0_frac > sweep_dmin_frac && sweep_dmin_frac > 0 && sweep_d0_frac < 0.5))
    throw Error("config", "sweep fractions need 0 < dmin_frac < d0_frac < 0.5");
  if (sweep_points < 4) throw Error("config", "sweep.points must be at least 4");
  if (riesz_nodes_per_side < 4)
    throw Error("config", "riesz.nodes_per_side must be at least 4");
  (void)make_nonlinearity();  // exponent window checks
  static const std::set<std::string> known = {"minorant", "spectral", "bloch", "zeta",
                                              "rates",    "lp",       "gradient"};
  for (const auto& s : suites)
    if (!known.count(s)) throw Error("config", "unknown suite '" + s + "' in checks.suites");
}

}  // namespace gaplab
