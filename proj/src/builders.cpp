#include "hyperpot/builders.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hyperpot {

MetricGraph regular_tree(int b, int depth, long long max_vertices) {
  if (b < 2) throw std::invalid_argument("regular_tree needs branching b >= 2");
  if (depth < 0) throw std::invalid_argument("regular_tree needs depth >= 0");
  long long count = 1, shell = b;
  for (int d = 1; d <= depth; ++d) {
    count += shell;
    if (count > max_vertices)
      throw std::invalid_argument("regular_tree(" + std::to_string(b) + "," + std::to_string(depth) +
                                  ") exceeds the vertex cap");
    shell *= (b - 1);
  }
  std::vector<Edge> edges;
  edges.reserve(static_cast<size_t>(count) - 1);
  // Breadth-first ids: children of the previous shell in order.
  int next = 1;
  std::vector<int> frontier = {0};
  for (int d = 1; d <= depth; ++d) {
    std::vector<int> fresh;
    for (int parent : frontier) {
      int kids = (d == 1) ? b : b - 1;
      for (int c = 0; c < kids; ++c) {
        edges.push_back({parent, next, 1.0});
        fresh.push_back(next++);
      }
    }
    frontier.swap(fresh);
  }
  return MetricGraph(static_cast<int>(count), std::move(edges));
}

MetricGraph path_graph(int n) {
  if (n < 1) throw std::invalid_argument("path_graph needs n >= 1");
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1.0});
  return MetricGraph(n, std::move(edges));
}

HyperbolicCone hyperbolic_approximation(const FiniteMetricSpace& z, int levels) {
  z.validate();
  if (levels < 0) throw std::invalid_argument("levels must be >= 0");
  if (z.diameter() > 1.0 + 1e-12) throw std::invalid_argument("metric space diameter must be normalized to <= 1");

  HyperbolicCone cone;
  std::vector<Edge> edges;
  int n_points = z.size();
  for (int k = 0; k <= levels; ++k) {
    double sep = std::ldexp(1.0, -k);  // 2^-k
    std::vector<int> chosen;
    for (int p = 0; p < n_points; ++p) {
      bool ok = true;
      for (int q : chosen)
        if (z.dist[p][q] < sep) {
          ok = false;
          break;
        }
      if (ok) chosen.push_back(p);
    }
    std::vector<int> ids;
    for (int p : chosen) {
      ids.push_back(static_cast<int>(cone.point_of.size()));
      cone.point_of.push_back(p);
      cone.level_of.push_back(k);
    }
    // Horizontal edges within the level.
    for (size_t i = 0; i < ids.size(); ++i)
      for (size_t j = i + 1; j < ids.size(); ++j)
        if (z.dist[chosen[i]][chosen[j]] <= 4.0 * sep) edges.push_back({ids[i], ids[j], 1.0});
    // Vertical edges to the previous level.
    if (k > 0) {
      double prev_sep = std::ldexp(1.0, -(k - 1));
      for (int up : cone.level_sets[k - 1])
        for (size_t j = 0; j < ids.size(); ++j)
          if (z.dist[cone.point_of[up]][chosen[j]] <= 2.0 * prev_sep) edges.push_back({up, ids[j], 1.0});
    }
    cone.level_sets.push_back(ids);
  }
  cone.base = cone.level_sets[0][0];
  cone.graph = MetricGraph(static_cast<int>(cone.point_of.size()), std::move(edges));
  return cone;
}

MetricGraph product_graph(const MetricGraph& g1, const MetricGraph& g2) {
  long long n = static_cast<long long>(g1.vertex_count()) * g2.vertex_count();
  if (n > 40000000) throw std::invalid_argument("product graph too large");
  int n1 = g1.vertex_count(), n2 = g2.vertex_count();
  auto id = [n2](int a, int b) { return a * n2 + b; };
  std::vector<Edge> edges;
  edges.reserve(static_cast<size_t>(g1.edge_count()) * n2 + static_cast<size_t>(g2.edge_count()) * n1);
  for (const Edge& e : g1.edges())
    for (int b = 0; b < n2; ++b) edges.push_back({id(e.u, b), id(e.v, b), e.length});
  for (const Edge& e : g2.edges())
    for (int a = 0; a < n1; ++a) edges.push_back({id(a, e.u), id(a, e.v), e.length});
  std::vector<double> mu(static_cast<size_t>(n));
  for (int a = 0; a < n1; ++a)
    for (int b = 0; b < n2; ++b) mu[id(a, b)] = g1.mu(a) * g2.mu(b);
  return MetricGraph(static_cast<int>(n), std::move(edges), std::move(mu));
}

}  // namespace hyperpot
