#pragma once

#include "gaplab/util.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace gaplab {

/// Minimal static SVG line plot: linear or log-log axes, decade ticks,
/// optional reference-slope guide lines. Output is deterministic.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string xlabel, std::string ylabel, bool loglog)
      : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)),
        loglog_(loglog) {}

  void add_series(const std::string& name, const std::vector<double>& x,
                  const std::vector<double>& y) {
    Series s;
    s.name = name;
    for (size_t i = 0; i < x.size() && i < y.size(); ++i) {
      if (loglog_ && (!(x[i] > 0) || !(y[i] > 0))) continue;
      if (!std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
      s.x.push_back(loglog_ ? std::log10(x[i]) : x[i]);
      s.y.push_back(loglog_ ? std::log10(y[i]) : y[i]);
    }
    series_.push_back(std::move(s));
  }

  /// Dashed guide y = c * x^slope anchored at the last point of the first series.
  void add_guide(const std::string& name, double slope) {
    guides_.push_back({name, slope});
  }

  void write(const std::filesystem::path& path, std::uint64_t seed) const {
    const double W = 640, H = 440, ml = 70, mr = 160, mt = 40, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series_)
      for (size_t i = 0; i < s.x.size(); ++i) {
        xmin = std::min(xmin, s.x[i]);
        xmax = std::max(xmax, s.x[i]);
        ymin = std::min(ymin, s.y[i]);
        ymax = std::max(ymax, s.y[i]);
      }
    if (xmin > xmax) { xmin = 0; xmax = 1; ymin = 0; ymax = 1; }
    if (xmax - xmin < 1e-12) { xmax += 0.5; xmin -= 0.5; }
    if (ymax - ymin < 1e-12) { ymax += 0.5; ymin -= 0.5; }
    const double px = (W - ml - mr) / (xmax - xmin);
    const double py = (H - mt - mb) / (ymax - ymin);
    auto X = [&](double v) { return ml + (v - xmin) * px; };
    auto Y = [&](double v) { return H - mb - (v - ymin) * py; };

    std::ofstream out(path);
    if (!out) throw Error("io", "cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
        << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<!-- seed=" << seed << " -->\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << title_ << "</text>\n";

    // frame and decade ticks
    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << (W - ml - mr)
        << "\" height=\"" << (H - mt - mb)
        << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    auto tick_label = [&](double v) {
      if (!loglog_) return format_double(v);
      return "1e" + format_double(v);
    };
    const int nx = 5, ny = 5;
    for (int i = 0; i <= nx; ++i) {
      double v = xmin + (xmax - xmin) * i / nx;
      out << "<line x1=\"" << X(v) << "\" y1=\"" << H - mb << "\" x2=\"" << X(v)
          << "\" y2=\"" << H - mb + 5 << "\" stroke=\"black\"/>\n";
      out << "<text x=\"" << X(v) << "\" y=\"" << H - mb + 18
          << "\" text-anchor=\"middle\" font-size=\"10\">" << tick_label(v) << "</text>\n";
    }
    for (int i = 0; i <= ny; ++i) {
      double v = ymin + (ymax - ymin) * i / ny;
      out << "<line x1=\"" << ml - 5 << "\" y1=\"" << Y(v) << "\" x2=\"" << ml
          << "\" y2=\"" << Y(v) << "\" stroke=\"black\"/>\n";
      out << "<text x=\"" << ml - 8 << "\" y=\"" << Y(v) + 3
          << "\" text-anchor=\"end\" font-size=\"10\">" << tick_label(v) << "</text>\n";
    }
    out << "<text x=\"" << (ml + (W - mr)) / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel_ << "</text>\n";
    out << "<text x=\"16\" y=\"" << (mt + (H - mb)) / 2
        << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
        << (mt + (H - mb)) / 2 << ")\">" << ylabel_ << "</text>\n";

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    int ci = 0;
    double legend_y = mt + 12;
    for (const auto& s : series_) {
      const char* col = colors[ci++ % 8];
      out << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
      for (size_t i = 0; i < s.x.size(); ++i)
        out << X(s.x[i]) << "," << Y(s.y[i]) << " ";
      out << "\"/>\n";
      for (size_t i = 0; i < s.x.size(); ++i)
        out << "<circle cx=\"" << X(s.x[i]) << "\" cy=\"" << Y(s.y[i])
            << "\" r=\"2.5\" fill=\"" << col << "\"/>\n";
      out << "<text x=\"" << W - mr + 10 << "\" y=\"" << legend_y
          << "\" font-size=\"11\" fill=\"" << col << "\">" << s.name << "</text>\n";
      legend_y += 16;
    }
    if (!series_.empty() && !series_[0].x.empty()) {
      for (const auto& g : guides_) {
        const char* col = colors[ci++ % 8];
        const double x1 = xmin, x2 = xmax;
        const double xa = series_[0].x.back(), ya = series_[0].y.back();
        auto yline = [&](double xv) { return ya + g.slope * (xv - xa); };
        out << "<line x1=\"" << X(x1) << "\" y1=\"" << Y(yline(x1)) << "\" x2=\"" << X(x2)
            << "\" y2=\"" << Y(yline(x2)) << "\" stroke=\"" << col
            << "\" stroke-dasharray=\"6 4\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << W - mr + 10 << "\" y=\"" << legend_y
            << "\" font-size=\"11\" fill=\"" << col << "\">" << g.name << "</text>\n";
        legend_y += 16;
      }
    }
    out << "</svg>\n";
  }

 private:
  struct Series {
    std::string name;
    std::vector<double> x, y;
  };
  struct Guide {
    std::string name;
    double slope;
  };
  std::string title_, xlabel_, ylabel_;
  bool loglog_;
  std::vector<Series> series_;
  std::vector<Guide> guides_;
};

}  // namespace gaplab
