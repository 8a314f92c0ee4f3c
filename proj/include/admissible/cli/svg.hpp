#pragma once

#include <string>
#include <utility>
#include <vector>

#include "admissible/core/types.hpp"

namespace admissible::cli {

/// Minimal deterministic SVG writer: axes, scatter markers, polylines and a
/// legend. No timestamps or other run-dependent content is emitted.
struct Series {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> points;
  bool line = false;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  /// Axis ranges; when lo == hi the range is taken from the data.
  double x_lo = 0.0, x_hi = 0.0;
  double y_lo = 0.0, y_hi = 0.0;
  /// Draw the unit l1 sphere (diamond) behind the data.
  bool l1_diamond = false;
};

std::string render_plot(const PlotSpec& spec, const std::vector<Series>& series);

/// Points on a triangle: each entry is a non-negative 3-vector (normalized
/// internally) with a series index.
struct TernaryPoint {
  Vec weights;
  std::size_t series = 0;
};

std::string render_ternary(const std::string& title, const std::vector<std::string>& corner_labels,
                           const std::vector<std::pair<std::string, std::string>>& legend,
                           const std::vector<TernaryPoint>& points);

/// Fixed color per verdict class.
std::string verdict_color(const std::string& verdict);

}  // namespace admissible::cli
