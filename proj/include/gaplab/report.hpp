#pragma once

#include "gaplab/util.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace gaplab {

/// One checked claim: a scalar against a threshold.
/// kind: "bounded-window" (tail max/min ratio below threshold),
///       "lower-bound" (value >= threshold),
///       "upper-bound" (value <= threshold),
///       "flag" (value != 0 required).
struct Verdict {
  std::string name;
  std::string kind;
  double value = 0;
  double threshold = 0;
  bool pass = false;
  std::string note;
};

inline Verdict bounded_window_verdict(const std::string& name,
                                      const std::vector<double>& series,
                                      double threshold = 10.0, int window = 3) {
  Verdict v;
  v.name = name;
  v.kind = "bounded-window";
  v.value = tail_ratio(series, window);
  v.threshold = threshold;
  v.pass = std::isfinite(v.value) && v.value < threshold;
  return v;
}

inline Verdict lower_bound_verdict(const std::string& name, double value,
                                   double threshold) {
  return Verdict{name, "lower-bound", value, threshold, value >= threshold, ""};
}

inline Verdict upper_bound_verdict(const std::string& name, double value,
                                   double threshold) {
  return Verdict{name, "upper-bound", value, threshold, value <= threshold, ""};
}

/// Tabular report: one row per scale/sample, one column per quantity,
/// plus the verdicts drawn from the table.
struct PropertyReport {
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<Verdict> verdicts;

  bool pass() const {
    for (const auto& v : verdicts)
      if (!v.pass) return false;
    return true;
  }

  std::vector<double> column(const std::string& name) const {
    for (size_t c = 0; c < columns.size(); ++c) {
      if (columns[c] == name) {
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r[c]);
        return out;
      }
    }
    throw Error("report", "no column named " + name);
  }

  const Verdict& verdict(const std::string& name) const {
    for (const auto& v : verdicts)
      if (v.name == name) return v;
    throw Error("report", "no verdict named " + name);
  }
};

// --- file output -----------------------------------------------------------

inline void write_csv(const std::filesystem::path& path, std::uint64_t seed,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("io", "cannot write " + path.string());
  out << "# seed=" << seed << "\n";
  for (size_t c = 0; c < header.size(); ++c)
    out << header[c] << (c + 1 < header.size() ? "," : "\n");
  for (const auto& r : rows) {
    for (size_t c = 0; c < r.size(); ++c)
      out << format_double(r[c]) << (c + 1 < r.size() ? "," : "\n");
  }
}

inline nlohmann::json verdict_to_json(const Verdict& v) {
  return nlohmann::json{{"name", v.name},     {"kind", v.kind},
                        {"value", v.value},   {"threshold", v.threshold},
                        {"pass", v.pass},     {"note", v.note}};
}

inline nlohmann::json report_to_json(const PropertyReport& r, std::uint64_t seed) {
  nlohmann::json j;
  j["title"] = r.title;
  j["seed"] = seed;
  j["pass"] = r.pass();
  j["verdicts"] = nlohmann::json::array();
  for (const auto& v : r.verdicts) j["verdicts"].push_back(verdict_to_json(v));
  return j;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error("io", "cannot write " + path.string());
  out << j.dump(2) << "\n";
}

inline void write_report(const std::filesystem::path& dir, const std::string& stem,
                         std::uint64_t seed, const PropertyReport& r) {
  write_csv(dir / (stem + ".csv"), seed, r.columns, r.rows);
  write_json(dir / (stem + ".json"), report_to_json(r, seed));
}

}  // namespace gaplab
