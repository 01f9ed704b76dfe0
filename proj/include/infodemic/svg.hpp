#pragma once

#include <optional>
#include <string>
#include <vector>

namespace infodemic::svg {

struct Line {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;  // NaN breaks the polyline
  bool dashed = false;
};

struct Axes {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::optional<double> y_min;
  std::optional<double> y_max;
};

std::string line_plot(const Axes& axes, const std::vector<Line>& lines);

struct BarGroup {
  std::string label;
  std::vector<double> values;  // NaN draws nothing
};

// Grouped bars; `series_labels` / `colors` index the values inside each group.
// `reference` draws a dashed horizontal line.
std::string bar_chart(const Axes& axes, const std::vector<std::string>& series_labels,
                      const std::vector<std::string>& colors, const std::vector<BarGroup>& groups,
                      std::optional<double> reference = std::nullopt);

}  // namespace infodemic::svg
