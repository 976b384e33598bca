#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace pgnn {

// Minimal SVG line plots: enough for loss curves and forecast bands without
// an external plotting dependency. Non-finite samples break the polyline.
struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#000000";
  bool dashed = false;
};

struct PlotBand {
  std::vector<double> x;
  std::vector<double> lo;
  std::vector<double> hi;
  std::string color = "#bbbbbb";
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::vector<PlotBand> bands;
  std::vector<PlotSeries> series;
  int width = 720;
  int height = 480;
};

void write_svg_plot(const std::filesystem::path& path, const LinePlot& plot);

// Color cycle used for injection-configuration curves.
const std::vector<std::string>& plot_palette();

}  // namespace pgnn
