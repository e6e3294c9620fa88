#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace wordrep::svg {

struct Series {
  std::string label;
  std::string color;
  bool dashed = false;
  std::vector<std::pair<double, double>> points;
};

// Small deterministic SVG emitters for the report panels. No timestamps, no
// randomness: equal inputs produce equal bytes.
std::string line_panel(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<Series>& series);

std::string bar_panel(const std::string& title, const std::vector<std::string>& labels,
                      const std::vector<double>& values, const std::vector<double>& errors = {});

struct ScatterPoint {
  double x = 0, y = 0;
  std::string color;
};
std::string scatter_panel(const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<ScatterPoint>& points,
                          bool diagonal = false);

std::string heatmap(const std::string& title, const Eigen::MatrixXd& values,
                    const std::vector<std::string>& labels);

}  // namespace wordrep::svg
