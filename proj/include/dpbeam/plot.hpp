#pragma once

// CSV and SVG export of beam patterns.

#include "dpbeam/beam.hpp"
#include "dpbeam/qubo.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>

namespace dpbeam {

/// theta_deg, phi_deg, gain_db rows in the pattern's theta-major order.
inline void write_pattern_csv(std::ostream& os, const BeamPattern& p) {
  os << "theta_deg,phi_deg,gain_db\n";
  for (const auto& pt : p.points) {
    os << detail::format_double(pt.direction.theta_deg()) << ',' << detail::format_double(pt.direction.phi_deg()) << ','
       << detail::format_double(pt.gain_db) << '\n';
  }
}

namespace detail {

/// Piecewise-linear approximation of the viridis colormap, s in [0, 1].
inline std::string colormap(double s) {
  static constexpr std::array<std::array<double, 3>, 6> stops{{{68, 1, 84},
                                                               {65, 68, 135},
                                                               {42, 120, 142},
                                                               {34, 168, 132},
                                                               {122, 209, 81},
                                                               {253, 231, 37}}};
  s = std::clamp(s, 0.0, 1.0) * (stops.size() - 1);
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(s), stops.size() - 2);
  const double f = s - static_cast<double>(i);
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(stops[i][0] + f * (stops[i + 1][0] - stops[i][0]))),
                static_cast<int>(std::lround(stops[i][1] + f * (stops[i + 1][1] - stops[i][1]))),
                static_cast<int>(std::lround(stops[i][2] + f * (stops[i + 1][2] - stops[i][2]))));
  return buf;
}

}  // namespace detail

struct HeatmapStyle {
  std::string title;
  double db_range = 40.0;  // colour scale spans [-db_range, 0]
  int max_rows = 90;
  int max_cols = 180;
  std::optional<Direction> marker;
};

/// Self-contained SVG raster: phi on the horizontal axis, theta downwards.
/// Large grids are decimated by taking the maximum over each block.
inline void write_heatmap_svg(std::ostream& os, const BeamPattern& p, const HeatmapStyle& style = {}) {
  const int rows = std::min(p.theta_steps, style.max_rows);
  const int cols = std::min(p.phi_steps, style.max_cols);
  const double cw = 4.0, ch = 4.0;
  const double left = 60, top = 40;
  const double width = left + cols * cw + 90, height = top + rows * ch + 50;

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\" viewBox=\"0 0 "
     << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << left << "\" y=\"24\" font-size=\"14\">" << style.title << "</text>\n";
  for (int r = 0; r < rows; ++r) {
    const int t0 = r * p.theta_steps / rows, t1 = std::max(t0 + 1, (r + 1) * p.theta_steps / rows);
    for (int c = 0; c < cols; ++c) {
      const int f0 = c * p.phi_steps / cols, f1 = std::max(f0 + 1, (c + 1) * p.phi_steps / cols);
      double v = kDbFloor;
      for (int it = t0; it < t1; ++it)
        for (int ip = f0; ip < f1; ++ip) v = std::max(v, p.at(it, ip).gain_db);
      os << "<rect x=\"" << left + c * cw << "\" y=\"" << top + r * ch << "\" width=\"" << cw << "\" height=\"" << ch
         << "\" fill=\"" << detail::colormap(1.0 + v / style.db_range) << "\"/>\n";
    }
  }
  const double th_span = p.theta.hi - p.theta.lo, ph_span = p.phi.hi - p.phi.lo;
  if (style.marker && th_span > 0.0 && ph_span > 0.0) {
    const double x = left + (style.marker->phi - p.phi.lo) / ph_span * cols * cw;
    const double y = top + (style.marker->theta - p.theta.lo) / th_span * rows * ch;
    os << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"7\" fill=\"none\" stroke=\"red\" stroke-width=\"2\"/>\n";
  }
  // Axes.
  const double bottom = top + rows * ch;
  os << "<text x=\"" << left + cols * cw / 2 << "\" y=\"" << bottom + 36 << "\" text-anchor=\"middle\">phi (deg)</text>\n";
  os << "<text x=\"16\" y=\"" << top + rows * ch / 2 << "\" transform=\"rotate(-90 16 " << top + rows * ch / 2
     << ")\" text-anchor=\"middle\">theta (deg)</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double x = left + i * cols * cw / 4;
    os << "<text x=\"" << x << "\" y=\"" << bottom + 16 << "\" text-anchor=\"middle\">"
       << std::lround(rad_to_deg(p.phi.lo + i * ph_span / 4)) << "</text>\n";
    const double y = top + i * rows * ch / 4;
    os << "<text x=\"" << left - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">"
       << std::lround(rad_to_deg(p.theta.lo + i * th_span / 4)) << "</text>\n";
  }
  // Colour bar.
  const double bx = left + cols * cw + 20;
  for (int i = 0; i < 50; ++i) {
    os << "<rect x=\"" << bx << "\" y=\"" << top + i * rows * ch / 50 << "\" width=\"14\" height=\"" << rows * ch / 50 + 0.5
       << "\" fill=\"" << detail::colormap(1.0 - i / 49.0) << "\"/>\n";
  }
  os << "<text x=\"" << bx + 18 << "\" y=\"" << top + 8 << "\">0 dB</text>\n";
  os << "<text x=\"" << bx + 18 << "\" y=\"" << bottom << "\">-" << style.db_range << " dB</text>\n";
  os << "</svg>\n";
}

}  // namespace dpbeam
