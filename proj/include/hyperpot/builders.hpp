#pragma once

#include <vector>

#include "hyperpot/io.hpp"
#include "hyperpot/metric_graph.hpp"

namespace hyperpot {

// Rooted b-regular tree truncated at the given depth: the root (vertex 0) has b
// children and every other interior vertex has b-1. Unit edges, unit measure.
// Vertices are breadth-first, so ids 1 + b(2^depth - 1) - b 2^(depth-1) ... are leaves;
// vertex counts grow like (b-1)^depth and the builder refuses > max_vertices.
MetricGraph regular_tree(int b, int depth, long long max_vertices = 4000000);

// Path 0-1-...-(n-1) with unit edges and unit measure (finite window of the
// integer line).
MetricGraph path_graph(int n);

// Discrete hyperbolic cone over a finite metric space of diameter <= 1.
// Level k holds a greedy maximal 2^-k separated subset (scanned in id order);
// horizontal edges join level-k vertices at distance <= 4 * 2^-k, vertical edges
// join consecutive levels at distance <= 2 * 2^-k. All edges unit length.
struct HyperbolicCone {
  MetricGraph graph;
  int base = 0;                 // lowest-id level-0 vertex
  std::vector<int> level_of;    // per graph vertex
  std::vector<int> point_of;    // per graph vertex: index of the underlying point
  std::vector<std::vector<int>> level_sets;  // graph vertices per level
};

HyperbolicCone hyperbolic_approximation(const FiniteMetricSpace& z, int levels);

// Cartesian product with the l1 metric: vertex (a, b) -> a * n2 + b,
// d((a,b),(a',b')) = d1(a,a') + d2(b,b'), mu = mu1 * mu2.
MetricGraph product_graph(const MetricGraph& g1, const MetricGraph& g2);

}  // namespace hyperpot
