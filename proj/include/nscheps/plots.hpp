#pragma once

#include <string>
#include <vector>

#include "nscheps/analysis.hpp"
#include "nscheps/coupled.hpp"

namespace nscheps {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

/// Self-contained SVG line chart. Every point is drawn as one <circle> of
/// class "pt" on a <polyline>; on log axes nonpositive values are dropped.
std::string line_chart_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series);

/// Energy terms and E(t) + cumulative dissipation against time.
std::string energy_plot_svg(const std::vector<EnergyRecord>& records);
/// Log-log eps against the distance columns.
std::string sweep_plot_svg(const SweepReport& report);
std::string gamma_plot_svg(const GammaTable& table);
std::string operator_plot_svg(const OperatorTable& table);

}  // namespace nscheps
