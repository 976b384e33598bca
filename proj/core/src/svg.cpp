#include "pgnn/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pgnn {

namespace {

constexpr double kMarginLeft = 72, kMarginRight = 18, kMarginTop = 36, kMarginBottom = 54;

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void include(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool valid() const { return lo <= hi; }
};

// Round a tick spacing to 1, 2 or 5 times a power of ten.
double nice_step(double span, int target_ticks) {
  const double raw = span / std::max(1, target_ticks);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  double step = 10.0;
  if (norm <= 1.0) step = 1.0;
  else if (norm <= 2.0) step = 2.0;
  else if (norm <= 5.0) step = 5.0;
  return step * mag;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

const std::vector<std::string>& plot_palette() {
  static const std::vector<std::string> colors = {
      "#000000", "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
      "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  return colors;
}

void write_svg_plot(const std::filesystem::path& path, const LinePlot& plot) {
  const double w = plot.width, h = plot.height;
  const double px0 = kMarginLeft, px1 = w - kMarginRight;
  const double py0 = h - kMarginBottom, py1 = kMarginTop;  // y grows upward in data space

  auto ty = [&](double v) { return plot.log_y ? std::log10(v) : v; };
  auto usable_y = [&](double v) { return std::isfinite(v) && (!plot.log_y || v > 0.0); };

  Range rx, ry;
  for (const auto& s : plot.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (usable_y(s.y[i])) {
        rx.include(s.x[i]);
        ry.include(ty(s.y[i]));
      }
    }
  }
  for (const auto& b : plot.bands) {
    for (std::size_t i = 0; i < b.x.size(); ++i) {
      if (usable_y(b.lo[i]) && usable_y(b.hi[i])) {
        rx.include(b.x[i]);
        ry.include(ty(b.lo[i]));
        ry.include(ty(b.hi[i]));
      }
    }
  }
  if (!rx.valid() || !ry.valid()) {
    rx = {0.0, 1.0};
    ry = {0.0, 1.0};
  }
  if (rx.hi == rx.lo) rx.hi = rx.lo + 1.0;
  if (ry.hi == ry.lo) {
    ry.lo -= 0.5;
    ry.hi += 0.5;
  }
  const double pad = 0.04 * (ry.hi - ry.lo);
  ry.lo -= pad;
  ry.hi += pad;

  auto sx = [&](double v) { return px0 + (v - rx.lo) / (rx.hi - rx.lo) * (px1 - px0); };
  auto sy = [&](double v) { return py0 + (ty(v) - ry.lo) / (ry.hi - ry.lo) * (py1 - py0); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  svg << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";

  // Bands first so curves draw on top.
  for (const auto& b : plot.bands) {
    std::ostringstream d;
    std::vector<std::pair<double, double>> fwd, bwd;  // lo forward, hi backward
    for (std::size_t i = 0; i < b.x.size(); ++i) {
      if (usable_y(b.lo[i]) && usable_y(b.hi[i])) {
        fwd.emplace_back(sx(b.x[i]), sy(b.lo[i]));
        bwd.emplace_back(sx(b.x[i]), sy(b.hi[i]));
      }
    }
    if (fwd.size() < 2) continue;
    d << "M" << fwd[0].first << " " << fwd[0].second;
    for (std::size_t i = 1; i < fwd.size(); ++i) d << " L" << fwd[i].first << " " << fwd[i].second;
    for (std::size_t i = bwd.size(); i-- > 0;) d << " L" << bwd[i].first << " " << bwd[i].second;
    d << " Z";
    svg << "<path d=\"" << d.str() << "\" fill=\"" << b.color
        << "\" fill-opacity=\"0.35\" stroke=\"none\"/>\n";
  }

  // Axes.
  svg << "<line x1=\"" << px0 << "\" y1=\"" << py0 << "\" x2=\"" << px1 << "\" y2=\"" << py0
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << px0 << "\" y1=\"" << py0 << "\" x2=\"" << px0 << "\" y2=\"" << py1
      << "\" stroke=\"black\"/>\n";

  const double xstep = nice_step(rx.hi - rx.lo, 6);
  for (double v = std::ceil(rx.lo / xstep) * xstep; v <= rx.hi + 1e-9 * xstep; v += xstep) {
    const double px = sx(v);
    svg << "<line x1=\"" << px << "\" y1=\"" << py0 << "\" x2=\"" << px << "\" y2=\"" << py0 + 5
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << px << "\" y=\"" << py0 + 20
        << "\" font-size=\"11\" text-anchor=\"middle\">" << tick_label(v) << "</text>\n";
  }
  if (plot.log_y) {
    for (double e = std::ceil(ry.lo); e <= std::floor(ry.hi) + 1e-9; e += 1.0) {
      const double py = py0 + (e - ry.lo) / (ry.hi - ry.lo) * (py1 - py0);
      svg << "<line x1=\"" << px0 - 5 << "\" y1=\"" << py << "\" x2=\"" << px0 << "\" y2=\"" << py
          << "\" stroke=\"black\"/>\n";
      svg << "<text x=\"" << px0 - 8 << "\" y=\"" << py + 4
          << "\" font-size=\"11\" text-anchor=\"end\">1e" << static_cast<int>(e) << "</text>\n";
    }
  } else {
    const double ystep = nice_step(ry.hi - ry.lo, 6);
    for (double v = std::ceil(ry.lo / ystep) * ystep; v <= ry.hi + 1e-9 * ystep; v += ystep) {
      const double py = py0 + (v - ry.lo) / (ry.hi - ry.lo) * (py1 - py0);
      svg << "<line x1=\"" << px0 - 5 << "\" y1=\"" << py << "\" x2=\"" << px0 << "\" y2=\"" << py
          << "\" stroke=\"black\"/>\n";
      svg << "<text x=\"" << px0 - 8 << "\" y=\"" << py + 4
          << "\" font-size=\"11\" text-anchor=\"end\">" << tick_label(v) << "</text>\n";
    }
  }

  // Series.
  for (const auto& s : plot.series) {
    std::ostringstream d;
    bool open = false;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable_y(s.y[i])) {
        open = false;
        continue;
      }
      d << (open ? " L" : (d.tellp() > 0 ? " M" : "M")) << sx(s.x[i]) << " " << sy(s.y[i]);
      open = true;
    }
    const std::string path_data = d.str();
    if (path_data.empty()) continue;
    svg << "<path d=\"" << path_data << "\" fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"1.4\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
  }

  // Labels and legend.
  svg << "<text x=\"" << (px0 + px1) / 2 << "\" y=\"" << kMarginTop - 14
      << "\" font-size=\"14\" text-anchor=\"middle\">" << xml_escape(plot.title) << "</text>\n";
  svg << "<text x=\"" << (px0 + px1) / 2 << "\" y=\"" << h - 14
      << "\" font-size=\"12\" text-anchor=\"middle\">" << xml_escape(plot.x_label) << "</text>\n";
  svg << "<text x=\"16\" y=\"" << (py0 + py1) / 2 << "\" font-size=\"12\" text-anchor=\"middle\""
      << " transform=\"rotate(-90 16 " << (py0 + py1) / 2 << ")\">" << xml_escape(plot.y_label)
      << "</text>\n";

  double ly = py1 + 6;
  for (const auto& s : plot.series) {
    if (s.label.empty()) continue;
    svg << "<line x1=\"" << px1 - 150 << "\" y1=\"" << ly + 4 << "\" x2=\"" << px1 - 122
        << "\" y2=\"" << ly + 4 << "\" stroke=\"" << s.color << "\" stroke-width=\"1.4\""
        << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
    svg << "<text x=\"" << px1 - 116 << "\" y=\"" << ly + 8 << "\" font-size=\"11\">"
        << xml_escape(s.label) << "</text>\n";
    ly += 16;
  }

  svg << "</svg>\n";

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << svg.str();
}

}  // namespace pgnn
