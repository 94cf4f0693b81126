#pragma once

#include <limits>
#include <vector>

namespace hyperpot {

// Vertex ids are dense 0..n-1. Edges are undirected with positive lengths.
struct Edge {
  int u = 0;
  int v = 0;
  double length = 1.0;
};

struct ShortestPathTree {
  int source = 0;
  std::vector<double> dist;  // +inf where unreachable (cannot happen on a valid graph)
  std::vector<int> pred;     // -1 at the source; else the smallest-id predecessor on a shortest path
};

// Connected weighted graph with a vertex measure. Immutable after construction.
// Construction validates ids, edge/measure positivity, duplicate edges and connectivity.
class MetricGraph {
 public:
  static constexpr double kUnbounded = std::numeric_limits<double>::infinity();

  MetricGraph() = default;
  MetricGraph(int n, std::vector<Edge> edges);  // unit measure
  MetricGraph(int n, std::vector<Edge> edges, std::vector<double> mu);

  int vertex_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  double mu(int v) const { return mu_[check_vertex(v)]; }
  const std::vector<double>& measures() const { return mu_; }
  double total_measure() const { return total_mu_; }
  double min_edge_length() const { return min_len_; }

  struct Arc {
    int to;
    double length;
    int edge;  // index into edges()
  };
  const std::vector<Arc>& neighbors(int v) const { return adj_[check_vertex(v)]; }
  int degree(int v) const { return static_cast<int>(adj_[check_vertex(v)].size()); }

  // Dijkstra. Predecessors are chosen lexicographically (smallest vertex id among
  // minimizers) so geodesics are deterministic. `radius` truncates the search.
  ShortestPathTree shortest_paths(int source, double radius = kUnbounded) const;
  double distance(int x, int y) const;
  std::vector<double> distances_from(int x) const;

  // Shortest vertex path from x to y (both included), deterministic tie-break.
  std::vector<int> geodesic(int x, int y) const;

  // Closed ball {y : d(x,y) <= r}, ascending ids.
  std::vector<int> ball(int x, double r) const;
  double measure_of(const std::vector<int>& set) const;
  double eccentricity(int x) const;

 private:
  int check_vertex(int v) const;
  void build();

  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<double> mu_;
  std::vector<std::vector<Arc>> adj_;
  double total_mu_ = 0.0;
  double min_len_ = 0.0;
};

// Relative tolerance used when comparing path lengths and ball radii.
inline constexpr double kDistanceTol = 1e-9;

// Multi-source Dijkstra: distance from every vertex to the nearest source.
std::vector<double> distances_to_set(const MetricGraph& g, const std::vector<int>& sources);

// Vertex-set topology. Sets are ascending id lists; the boundary convention is
// inner: boundary(U) = vertices of U with a neighbor outside U.
std::vector<int> inner_boundary(const MetricGraph& g, const std::vector<int>& set);
std::vector<int> set_closure(const MetricGraph& g, const std::vector<int>& set);   // set plus outer neighbors
std::vector<int> set_interior(const MetricGraph& g, const std::vector<int>& set);  // set minus inner boundary
bool is_subset(const std::vector<int>& inner, const std::vector<int>& outer);

// max over sampled centers x and dyadic-style radii r in (0, sigma) of
// log2(mu(B_2r(x)) / mu(B_r(x))). Radii run on a half-step grid of the minimum
// edge length. Centers are all vertices, or an id-strided sample of max_centers.
double doubling_exponent(const MetricGraph& g, double sigma, int max_centers = 256);

// Bag of geometry constants carried through reports.
struct GeometryConstants {
  double sigma = 1.0;
  double N = 0.0;
  double C_P = 0.0;
  double C_D = 0.0;
  double k_bound = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
};

}  // namespace hyperpot
