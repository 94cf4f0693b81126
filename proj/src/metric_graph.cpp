#include "hyperpot/metric_graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>

namespace hyperpot {

namespace {

bool close_le(double a, double b) {
  return a <= b + kDistanceTol * (1.0 + std::abs(b));
}

}  // namespace

MetricGraph::MetricGraph(int n, std::vector<Edge> edges)
    : MetricGraph(n, std::move(edges), std::vector<double>(static_cast<size_t>(std::max(n, 0)), 1.0)) {}

MetricGraph::MetricGraph(int n, std::vector<Edge> edges, std::vector<double> mu)
    : n_(n), edges_(std::move(edges)), mu_(std::move(mu)) {
  build();
}

int MetricGraph::check_vertex(int v) const {
  if (v < 0 || v >= n_) throw std::invalid_argument("vertex id " + std::to_string(v) + " out of range");
  return v;
}

void MetricGraph::build() {
  if (n_ < 1) throw std::invalid_argument("graph needs at least one vertex");
  if (static_cast<int>(mu_.size()) != n_) throw std::invalid_argument("measure vector size mismatch");
  total_mu_ = 0.0;
  for (double m : mu_) {
    if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("vertex measures must be positive finite");
    total_mu_ += m;
  }
  adj_.assign(n_, {});
  min_len_ = std::numeric_limits<double>::infinity();
  std::vector<std::pair<int, int>> seen;
  seen.reserve(edges_.size());
  for (size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    check_vertex(e.u);
    check_vertex(e.v);
    if (e.u == e.v) throw std::invalid_argument("self loop on vertex " + std::to_string(e.u));
    if (!(e.length > 0.0) || !std::isfinite(e.length)) throw std::invalid_argument("edge lengths must be positive finite");
    seen.emplace_back(std::min(e.u, e.v), std::max(e.u, e.v));
    adj_[e.u].push_back({e.v, e.length, static_cast<int>(i)});
    adj_[e.v].push_back({e.u, e.length, static_cast<int>(i)});
    min_len_ = std::min(min_len_, e.length);
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw std::invalid_argument("duplicate edge");
  for (auto& arcs : adj_)
    std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) { return a.to < b.to; });

  if (n_ > 1) {
    std::vector<char> mark(n_, 0);
    std::vector<int> stack = {0};
    mark[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (const Arc& a : adj_[x])
        if (!mark[a.to]) {
          mark[a.to] = 1;
          ++count;
          stack.push_back(a.to);
        }
    }
    if (count != n_) throw std::invalid_argument("graph is not connected");
  }
}

ShortestPathTree MetricGraph::shortest_paths(int source, double radius) const {
  check_vertex(source);
  ShortestPathTree t;
  t.source = source;
  t.dist.assign(n_, kUnbounded);
  t.pred.assign(n_, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  t.dist[source] = 0.0;
  heap.push({0.0, source});
  while (!heap.empty()) {
    auto [d, x] = heap.top();
    heap.pop();
    if (d > t.dist[x]) continue;
    if (!close_le(d, radius)) continue;
    for (const Arc& a : adj_[x]) {
      double nd = d + a.length;
      if (nd < t.dist[a.to] && close_le(nd, radius)) {
        t.dist[a.to] = nd;
        heap.push({nd, a.to});
      }
    }
  }
  // Lexicographic predecessor pass: smallest neighbor id that realizes the distance.
  for (int v = 0; v < n_; ++v) {
    if (v == source || t.dist[v] == kUnbounded) continue;
    for (const Arc& a : adj_[v]) {
      if (t.dist[a.to] == kUnbounded) continue;
      if (std::abs(t.dist[a.to] + a.length - t.dist[v]) <= kDistanceTol * (1.0 + t.dist[v])) {
        t.pred[v] = a.to;
        break;  // neighbors are id-sorted
      }
    }
  }
  return t;
}

double MetricGraph::distance(int x, int y) const {
  check_vertex(y);
  return shortest_paths(x).dist[y];
}

std::vector<double> MetricGraph::distances_from(int x) const { return shortest_paths(x).dist; }

std::vector<int> MetricGraph::geodesic(int x, int y) const {
  check_vertex(y);
  ShortestPathTree t = shortest_paths(x);
  if (t.dist[y] == kUnbounded) throw std::runtime_error("no path");  // unreachable on valid graphs
  std::vector<int> path = {y};
  int cur = y;
  while (cur != x) {
    cur = t.pred[cur];
    path.push_back(cur);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<int> MetricGraph::ball(int x, double r) const {
  if (r < 0.0) throw std::invalid_argument("ball radius must be nonnegative");
  ShortestPathTree t = shortest_paths(x, r);
  std::vector<int> out;
  for (int v = 0; v < n_; ++v)
    if (t.dist[v] != kUnbounded && close_le(t.dist[v], r)) out.push_back(v);
  return out;
}

double MetricGraph::measure_of(const std::vector<int>& set) const {
  double s = 0.0;
  for (int v : set) s += mu(v);
  return s;
}

double MetricGraph::eccentricity(int x) const {
  std::vector<double> d = distances_from(x);
  return *std::max_element(d.begin(), d.end());
}

std::vector<double> distances_to_set(const MetricGraph& g, const std::vector<int>& sources) {
  std::vector<double> dist(g.vertex_count(), MetricGraph::kUnbounded);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  for (int s : sources) {
    dist.at(static_cast<size_t>(s)) = 0.0;
    heap.push({0.0, s});
  }
  while (!heap.empty()) {
    auto [d, x] = heap.top();
    heap.pop();
    if (d > dist[x]) continue;
    for (const auto& a : g.neighbors(x)) {
      double nd = d + a.length;
      if (nd < dist[a.to]) {
        dist[a.to] = nd;
        heap.push({nd, a.to});
      }
    }
  }
  return dist;
}

namespace {

std::vector<char> mask_of(const MetricGraph& g, const std::vector<int>& set) {
  std::vector<char> mask(g.vertex_count(), 0);
  for (int v : set) mask.at(static_cast<size_t>(v)) = 1;
  return mask;
}

}  // namespace

std::vector<int> inner_boundary(const MetricGraph& g, const std::vector<int>& set) {
  std::vector<char> mask = mask_of(g, set);
  std::vector<int> out;
  for (int v : set)
    for (const auto& a : g.neighbors(v))
      if (!mask[a.to]) {
        out.push_back(v);
        break;
      }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> set_closure(const MetricGraph& g, const std::vector<int>& set) {
  std::vector<char> mask = mask_of(g, set);
  std::vector<int> out(set);
  for (int v : set)
    for (const auto& a : g.neighbors(v))
      if (!mask[a.to]) {
        mask[a.to] = 1;
        out.push_back(a.to);
      }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> set_interior(const MetricGraph& g, const std::vector<int>& set) {
  std::vector<char> mask = mask_of(g, set);
  std::vector<int> out;
  for (int v : set) {
    bool inside = true;
    for (const auto& a : g.neighbors(v))
      if (!mask[a.to]) {
        inside = false;
        break;
      }
    if (inside) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool is_subset(const std::vector<int>& inner, const std::vector<int>& outer) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

double doubling_exponent(const MetricGraph& g, double sigma, int max_centers) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (max_centers < 1) throw std::invalid_argument("max_centers must be positive");
  const int n = g.vertex_count();
  std::vector<int> centers;
  if (n <= max_centers) {
    centers.resize(n);
    for (int i = 0; i < n; ++i) centers[i] = i;
  } else {
    for (int i = 0; i < max_centers; ++i)
      centers.push_back(static_cast<int>(static_cast<long long>(i) * n / max_centers));
  }
  double step = g.min_edge_length() / 2.0;
  std::vector<double> radii;
  for (double r = step; r < sigma && radii.size() < 128; r += step) radii.push_back(r);
  if (radii.empty()) radii.push_back(sigma / 2.0);

  double worst = 0.0;
  for (int c : centers) {
    ShortestPathTree t = g.shortest_paths(c, 2.0 * radii.back());
    std::vector<std::pair<double, double>> reached;  // (dist, mu)
    for (int v = 0; v < n; ++v)
      if (t.dist[v] != MetricGraph::kUnbounded) reached.emplace_back(t.dist[v], g.mu(v));
    std::sort(reached.begin(), reached.end());
    std::vector<double> cum(reached.size() + 1, 0.0);
    for (size_t i = 0; i < reached.size(); ++i) cum[i + 1] = cum[i] + reached[i].second;
    auto mass = [&](double r) {
      double key = r + kDistanceTol * (1.0 + r);
      size_t k = std::upper_bound(reached.begin(), reached.end(), std::make_pair(key, std::numeric_limits<double>::infinity())) -
                 reached.begin();
      return cum[k];
    };
    for (double r : radii) {
      double small = mass(r);
      double big = mass(2.0 * r);
      if (small > 0.0 && big > 0.0) worst = std::max(worst, std::log2(big / small));
    }
  }
  return worst;
}

}  // namespace hyperpot
