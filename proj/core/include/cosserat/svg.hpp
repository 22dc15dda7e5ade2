#pragma once

#include <string>
#include <vector>

namespace cosserat {

// One polyline of a plot.
struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};

// centerline: linear axes, equal aspect (geometry stays undistorted).
// convergence: both axes log10, reference slopes readable from the grid.
// trace: linear axes, time series.
enum class PlotKind { centerline, convergence, trace };

// Writes a self-contained SVG (no external CSS/fonts/scripts). Output is a
// pure function of the inputs, so repeated runs produce identical bytes.
void emit_plot(const std::string& path, PlotKind kind, const std::vector<PlotSeries>& series,
               const std::string& title, const std::string& x_label, const std::string& y_label);

}  // namespace cosserat
