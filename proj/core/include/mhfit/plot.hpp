#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mhfit {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct Marker {
  double x = 0.0;
  std::string label;
};

/// Static SVG line chart; output depends only on the arguments.
std::string line_plot_svg(const std::string& title, const std::string& x_label,
                          const std::string& y_label, std::span<const Series> series,
                          std::span<const Marker> markers = {});

/// Grouped vertical bars: one group per entry of `groups`, one bar per entry
/// of `bar_names`; `values[g][b]` in [0, 1].
std::string bar_chart_svg(const std::string& title, std::span<const std::string> groups,
                          std::span<const std::string> bar_names,
                          const std::vector<std::vector<double>>& values);

/// Long format: `series,x,y`, one line per point.
std::string series_csv(std::span<const Series> series);

}  // namespace mhfit
