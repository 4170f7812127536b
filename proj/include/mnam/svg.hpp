#pragma once

#include <algorithm>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "mnam/errors.hpp"
#include "mnam/io.hpp"

namespace mnam {

struct SvgSeries {
  std::string label;
  std::string color = "#1f6fb2";
  std::vector<std::pair<double, double>> points;
};

// Minimal line chart: frame, four tick labels, one polyline per series,
// legend in the top-left. CSV is the canonical output; this is a quick look.
inline std::string svg_line_chart(const std::string& title,
                                  const std::vector<SvgSeries>& series,
                                  int width = 640, int height = 420) {
  if (series.empty()) throw SpecError("svg chart needs at least one series");
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
  }
  if (!(xhi > xlo)) xhi = xlo + 1.0;
  if (!(yhi > ylo)) yhi = ylo + 1.0;
  const double ml = 60, mr = 20, mt = 40, mb = 40;
  const double pw = width - ml - mr, ph = height - mt - mb;
  auto sx = [&](double x) { return ml + pw * (x - xlo) / (xhi - xlo); };
  auto sy = [&](double y) { return mt + ph * (1.0 - (y - ylo) / (yhi - ylo)); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">"
      << title << "</text>\n";
  out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
      << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"#444\"/>\n";
  auto tick = [&](double vx, double vy, const std::string& text,
                  const char* anchor) {
    out << "<text x=\"" << format_double(vx) << "\" y=\"" << format_double(vy)
        << "\" text-anchor=\"" << anchor
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">"
        << text << "</text>\n";
  };
  tick(ml, height - mb + 16, format_double(xlo), "middle");
  tick(width - mr, height - mb + 16, format_double(xhi), "middle");
  tick(ml - 6, height - mb, format_double(ylo), "end");
  tick(ml - 6, mt + 10, format_double(yhi), "end");
  int legend_y = static_cast<int>(mt) + 14;
  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : s.points)
      out << format_double(sx(x)) << "," << format_double(sy(y)) << " ";
    out << "\"/>\n";
    if (!s.label.empty()) {
      out << "<line x1=\"" << ml + 8 << "\" y1=\"" << legend_y - 4 << "\" x2=\""
          << ml + 28 << "\" y2=\"" << legend_y - 4 << "\" stroke=\"" << s.color
          << "\" stroke-width=\"2\"/>\n";
      tick(ml + 34, legend_y, s.label, "start");
      legend_y += 16;
    }
  }
  out << "</svg>\n";
  return out.str();
}

}
