#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace qwpde::svg {

/// Cell-grid heatmap of a matrix (rows along x, columns along y), with a
/// linear colour scale and a small colourbar.
std::string heatmap(const Eigen::MatrixXd& values, const std::string& title);

struct Line {
  std::string label;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  std::string colour = "#1f77b4";
  bool dashed = false;
};

/// Simple line chart with axes spanning the data range.
std::string line_chart(const std::vector<Line>& lines, const std::string& title);

}  // namespace qwpde::svg
