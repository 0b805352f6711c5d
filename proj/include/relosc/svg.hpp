#pragma once

#include <string>
#include <vector>

namespace relosc {

/// Minimal static SVG plots: text output, no external renderer, no metadata
/// timestamps, so identical inputs give identical bytes.
struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};

struct PlotOptions {
  int width = 720;
  int height = 440;
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
};

std::string line_plot_svg(const std::vector<PlotSeries>& series,
                          const PlotOptions& opts);

std::string histogram_svg(const std::vector<double>& values, int bins,
                          const PlotOptions& opts);

}  // namespace relosc
