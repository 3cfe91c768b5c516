#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "omo/core.hpp"

namespace omo {

struct PlotSeries {
  std::string label;
  std::string color;
  std::vector<double> y;  // one value per round, x runs 1..n
};

/// Minimal self-contained line plot: axes, ticks, legend, one polyline per
/// series. No dependencies, deterministic output.
inline void write_line_plot_svg(std::ostream& os, const std::string& title,
                                const std::vector<PlotSeries>& series) {
  const double width = 860.0, height = 520.0;
  const double ml = 70.0, mr = 20.0, mt = 44.0, mb = 48.0;
  const double pw = width - ml - mr, ph = height - mt - mb;

  std::size_t n = 0;
  double ymin = 0.0, ymax = 1.0;
  bool any = false;
  for (const PlotSeries& s : series) {
    n = std::max(n, s.y.size());
    for (double v : s.y) {
      if (!std::isfinite(v)) continue;
      if (!any) {
        ymin = ymax = v;
        any = true;
      } else {
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
      }
    }
  }
  if (!any || ymin == ymax) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  const double xmax = n > 1 ? static_cast<double>(n) : 2.0;

  auto fx = [&](double t) { return ml + (t - 1.0) / (xmax - 1.0) * pw; };
  auto fy = [&](double v) { return mt + (ymax - v) / (ymax - ymin) * ph; };
  auto fmt = [](double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::string(buf);
  };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" "
        "text-anchor=\"middle\">"
     << title << "</text>\n";
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"#333\"/>\n";

  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    double frac = static_cast<double>(i) / ticks;
    double tx = ml + frac * pw;
    double tv = 1.0 + frac * (xmax - 1.0);
    os << "<line x1=\"" << tx << "\" y1=\"" << mt + ph << "\" x2=\"" << tx << "\" y2=\""
       << mt + ph + 5 << "\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << tx << "\" y=\"" << mt + ph + 20
       << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
       << fmt(std::round(tv)) << "</text>\n";
    double ty = mt + ph - frac * ph;
    double yv = ymin + frac * (ymax - ymin);
    os << "<line x1=\"" << ml - 5 << "\" y1=\"" << ty << "\" x2=\"" << ml << "\" y2=\"" << ty
       << "\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << ml - 8 << "\" y=\"" << ty + 4
       << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << fmt(yv)
       << "</text>\n";
  }
  os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 10
     << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">t</text>\n";

  double ly = mt + 14.0;
  for (const PlotSeries& s : series) {
    if (s.y.size() >= 2) {
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.y.size(); ++i) {
        if (!std::isfinite(s.y[i])) continue;
        os << fmt(fx(static_cast<double>(i + 1))) << "," << fmt(fy(s.y[i]));
        if (i + 1 < s.y.size()) os << " ";
      }
      os << "\"/>\n";
    }
    os << "<line x1=\"" << ml + pw - 150 << "\" y1=\"" << ly << "\" x2=\"" << ml + pw - 126
       << "\" y2=\"" << ly << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << ml + pw - 120 << "\" y=\"" << ly + 4
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
    ly += 18.0;
  }
  os << "</svg>\n";
}

}  // namespace omo
