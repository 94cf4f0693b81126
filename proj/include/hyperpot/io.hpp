#pragma once

#include <string>
#include <vector>

#include "hyperpot/metric_graph.hpp"

namespace hyperpot {

// Text graph format, one record per line; blank lines and '#' comments allowed:
//   vertices <n>
//   edge <u> <v> <length>
//   mu <v> <value>        (optional, defaults to 1)
MetricGraph load_graph(const std::string& path);
void save_graph(const MetricGraph& g, const std::string& path);

// Finite metric space: first line n, then an n x n row-major distance matrix.
// Validated: symmetric, zero diagonal, positive off-diagonal, triangle inequality.
struct FiniteMetricSpace {
  std::vector<std::vector<double>> dist;
  int size() const { return static_cast<int>(dist.size()); }
  double diameter() const;
  void validate() const;
};

FiniteMetricSpace load_metric_space(const std::string& path);
void save_metric_space(const FiniteMetricSpace& z, const std::string& path);

// Potential file: lines "V <vertex> <value>"; unlisted vertices get 0.
std::vector<double> load_potential(const std::string& path, int n_vertices);

}  // namespace hyperpot
