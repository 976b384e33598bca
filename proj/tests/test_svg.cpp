#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pgnn/svg.hpp"

using namespace pgnn;

namespace {
std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

TEST_CASE("svg plot of a constant series") {
  const auto path = std::filesystem::temp_directory_path() / "pgnn_svg_flat.svg";
  LinePlot plot;
  plot.title = "flat";
  plot.log_y = true;
  PlotSeries s;
  s.label = "constant";
  for (int i = 0; i < 10; ++i) {
    s.x.push_back(i);
    s.y.push_back(1e-3);
  }
  plot.series.push_back(s);
  write_svg_plot(path, plot);
  const std::string svg = slurp(path);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("<path") != std::string::npos);
  CHECK(svg.find("1e-3") != std::string::npos);  // a decade tick brackets the constant
  std::filesystem::remove(path);
}

TEST_CASE("svg band with zero width degenerates cleanly") {
  const auto path = std::filesystem::temp_directory_path() / "pgnn_svg_band.svg";
  LinePlot plot;
  PlotBand band;
  PlotSeries mean;
  mean.dashed = true;
  for (int i = 0; i < 8; ++i) {
    band.x.push_back(i);
    band.lo.push_back(2.0);
    band.hi.push_back(2.0);
    mean.x.push_back(i);
    mean.y.push_back(2.0);
  }
  plot.bands.push_back(band);
  plot.series.push_back(mean);
  write_svg_plot(path, plot);
  const std::string svg = slurp(path);
  CHECK(svg.find("fill-opacity") != std::string::npos);
  CHECK(svg.find("stroke-dasharray") != std::string::npos);
  std::filesystem::remove(path);
}

TEST_CASE("non-finite samples break the polyline instead of corrupting it") {
  const auto path = std::filesystem::temp_directory_path() / "pgnn_svg_nan.svg";
  LinePlot plot;
  PlotSeries s;
  s.x = {0, 1, 2, 3, 4};
  s.y = {1.0, 2.0, std::nan(""), 3.0, 4.0};
  plot.series.push_back(s);
  write_svg_plot(path, plot);
  const std::string svg = slurp(path);
  CHECK(svg.find("nan") == std::string::npos);
  std::filesystem::remove(path);
}
