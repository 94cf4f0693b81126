#include "hyperpot/unfold.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hyperpot/hyperbolic.hpp"

namespace hyperpot {

namespace {

double point_segment_distance(double px, double py, double ax, double ay, double bx, double by) {
  const double vx = bx - ax, vy = by - ay;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? ((px - ax) * vx + (py - ay) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = px - (ax + t * vx), dy = py - (ay + t * vy);
  return std::hypot(dx, dy);
}

// Distance from (x, y >= 0) to the curve {(t, t^q) : t in [0, 1]}: dense scan
// plus golden-section refinement, deterministic and accurate to ~1e-12.
double curve_distance(double x, double y, double q) {
  auto f = [&](double t) {
    const double dy = std::pow(t, q) - y;
    return (t - x) * (t - x) + dy * dy;
  };
  const int n = 256;
  int best = 0;
  double fbest = f(0.0);
  for (int k = 1; k <= n; ++k) {
    const double v = f(static_cast<double>(k) / n);
    if (v < fbest) {
      fbest = v;
      best = k;
    }
  }
  double lo = std::max(0.0, (best - 1.0) / n);
  double hi = std::min(1.0, (best + 1.0) / n);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
  double fa = f(a), fb = f(b);
  for (int it = 0; it < 80; ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - gr * (hi - lo);
      fa = f(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + gr * (hi - lo);
      fb = f(b);
    }
  }
  return std::sqrt(std::min(fa, fb));
}

struct Shape {
  std::string name;  // canonical spec
  double q = 0.0;
  int imin = 0, imax = 0, jmin = 0, jmax = 0;

  // Boundary distance at an interior point; <= 0 outside the domain.
  double dist(double x, double y) const {
    if (name == "disc") return 1.0 - std::hypot(x, y);
    if (name == "square") return std::min(std::min(x, 1.0 - x), std::min(y, 1.0 - y));
    if (name == "slit") {
      const double rim = 1.0 - std::hypot(x, y);
      if (rim <= 0.0) return rim;
      return std::min(rim, point_segment_distance(x, y, 0.0, 0.0, 1.0, 0.0));
    }
    if (name == "lshape") {
      const bool inside = x > 0.0 && y > 0.0 && x < 2.0 && y < 2.0 && !(x >= 1.0 && y >= 1.0);
      double d = point_segment_distance(x, y, 0, 0, 2, 0);
      d = std::min(d, point_segment_distance(x, y, 2, 0, 2, 1));
      d = std::min(d, point_segment_distance(x, y, 2, 1, 1, 1));
      d = std::min(d, point_segment_distance(x, y, 1, 1, 1, 2));
      d = std::min(d, point_segment_distance(x, y, 1, 2, 0, 2));
      d = std::min(d, point_segment_distance(x, y, 0, 2, 0, 0));
      return inside ? d : -d;
    }
    // cusp: {0 < x < 1, |y| < x^q}, capped by the wall x = 1
    const bool inside = x > 0.0 && x < 1.0 && std::abs(y) < std::pow(x, q);
    const double d = std::min(1.0 - x, curve_distance(x, std::abs(y), q));
    return inside ? d : -std::abs(d);
  }
};

Shape parse_spec(const std::string& spec) {
  Shape s;
  if (spec == "disc" || spec == "square" || spec == "slit" || spec == "lshape") {
    s.name = spec;
  } else if (spec.rfind("cusp:", 0) == 0) {
    s.name = "cusp";
    try {
      s.q = std::stod(spec.substr(5));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad cusp exponent in '" + spec + "'");
    }
    if (!(s.q > 0.0)) throw std::invalid_argument("cusp exponent must be positive");
  } else {
    throw std::invalid_argument("unknown domain spec '" + spec + "'");
  }
  return s;
}

void lattice_range(Shape& s, double h) {
  const int n1 = static_cast<int>(std::ceil(1.0 / h)) + 1;
  if (s.name == "disc" || s.name == "slit") {
    s.imin = -n1;
    s.imax = n1;
    s.jmin = -n1;
    s.jmax = n1;
  } else if (s.name == "square") {
    s.imin = s.jmin = 0;
    s.imax = s.jmax = n1;
  } else if (s.name == "lshape") {
    s.imin = s.jmin = 0;
    s.imax = s.jmax = 2 * n1;
  } else {  // cusp
    s.imin = 0;
    s.imax = n1;
    s.jmin = -n1;
    s.jmax = n1;
  }
}

}  // namespace

DomainSample sample_domain(const std::string& spec, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("grid step must be positive");
  Shape shape = parse_spec(spec);
  lattice_range(shape, h);

  const int w = shape.imax - shape.imin + 1;
  const int ht = shape.jmax - shape.jmin + 1;
  std::vector<int> idx(static_cast<std::size_t>(w) * ht, -1);
  auto cell = [&](int i, int j) -> int& {
    return idx[static_cast<std::size_t>(i - shape.imin) * ht + (j - shape.jmin)];
  };

  DomainSample ds;
  ds.spec = spec;
  ds.h = h;
  for (int i = shape.imin; i <= shape.imax; ++i) {
    for (int j = shape.jmin; j <= shape.jmax; ++j) {
      const double x = i * h, y = j * h;
      const double d = shape.dist(x, y);
      if (d > 0.5 * h) {
        cell(i, j) = static_cast<int>(ds.points.size());
        ds.points.push_back({x, y});
        ds.dj.push_back(d);
      }
    }
  }
  const int n = static_cast<int>(ds.points.size());
  if (n == 0) {
    throw std::invalid_argument("domain sample of '" + spec + "' is empty at h = " +
                                std::to_string(h) + "; use a smaller h");
  }

  std::vector<Edge> edges;
  for (int i = shape.imin; i <= shape.imax; ++i) {
    for (int j = shape.jmin; j <= shape.jmax; ++j) {
      const int a = cell(i, j);
      if (a < 0) continue;
      if (i < shape.imax && cell(i + 1, j) >= 0) edges.push_back({a, cell(i + 1, j), h});
      if (j < shape.jmax && cell(i, j + 1) >= 0) edges.push_back({a, cell(i, j + 1), h});
    }
  }

  // connectivity scan before the graph constructor, for a targeted message
  std::vector<std::vector<int>> adj(n);
  for (const Edge& e : edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<char> seen(n, 0);
  std::vector<int> stack = {0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int u : adj[v])
      if (!seen[u]) {
        seen[u] = 1;
        ++reached;
        stack.push_back(u);
      }
  }
  if (reached != n) {
    throw std::invalid_argument("domain sample of '" + spec + "' is disconnected at h = " +
                                std::to_string(h) + "; use a smaller h");
  }

  ds.base = MetricGraph(n, std::move(edges), std::vector<double>(n, h * h));
  return ds;
}

int nearest_sample(const DomainSample& ds, double x, double y) {
  if (ds.points.empty()) throw std::invalid_argument("empty sample");
  int best = 0;
  double fbest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(ds.points.size()); ++i) {
    const double d = std::hypot(ds.points[i][0] - x, ds.points[i][1] - y);
    if (d < fbest) {
      fbest = d;
      best = i;
    }
  }
  return best;
}

MetricGraph quasi_hyperbolic_graph(const DomainSample& ds) {
  std::vector<Edge> edges = ds.base.edges();
  for (Edge& e : edges) {
    e.length = e.length * 0.5 * (1.0 / ds.dj[e.u] + 1.0 / ds.dj[e.v]);
  }
  std::vector<double> mu(ds.dj.size());
  for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = ds.h * ds.h / (ds.dj[i] * ds.dj[i]);
  return MetricGraph(ds.base.vertex_count(), std::move(edges), std::move(mu));
}

SchrodingerOperator dirichlet_operator(const DomainSample& ds, std::vector<double> v) {
  const int n = ds.base.vertex_count();
  if (v.empty()) v.assign(n, 0.0);
  if (static_cast<int>(v.size()) != n) throw std::invalid_argument("one potential value per point");
  const double wall = 1.0 / (ds.h * ds.h);
  for (int x = 0; x < n; ++x) v[x] += (4 - ds.base.degree(x)) * wall;
  return SchrodingerOperator(ds.base, std::vector<double>(ds.base.edge_count(), 1.0),
                             std::move(v));
}

UniformityReport check_uniformity(const DomainSample& ds,
                                  const std::vector<std::pair<int, int>>& pairs, double c) {
  if (pairs.empty()) throw std::invalid_argument("no pairs given");
  MetricGraph qh = quasi_hyperbolic_graph(ds);

  UniformityReport rep;
  for (const auto& [a, b] : pairs) {
    if (a == b) throw std::invalid_argument("degenerate pair");
    std::vector<int> path = qh.geodesic(a, b);
    const double arc = ds.h * (static_cast<double>(path.size()) - 1.0);
    const double chord =
        std::hypot(ds.points[a][0] - ds.points[b][0], ds.points[a][1] - ds.points[b][1]);
    double pc = arc / chord;
    for (std::size_t i = 0; i < path.size(); ++i) {
      const double to_a = ds.h * static_cast<double>(i);
      const double cigar = std::min(to_a, arc - to_a) / ds.dj[path[i]];
      pc = std::max(pc, cigar);
    }
    rep.pair_c.push_back(pc);
  }
  rep.worst_c = *std::max_element(rep.pair_c.begin(), rep.pair_c.end());
  int good = 0;
  for (double pc : rep.pair_c)
    if (pc <= c) ++good;
  rep.uniform_fraction = static_cast<double>(good) / static_cast<double>(rep.pair_c.size());
  return rep;
}

HyperbolicityReport check_unfolding_hyperbolic(const DomainSample& ds, long long samples,
                                               std::uint64_t seed) {
  HyperbolicityReport rep;
  rep.delta_coarse = delta_four_point_sampled(quasi_hyperbolic_graph(ds), samples, seed);
  DomainSample fine = sample_domain(ds.spec, 0.5 * ds.h);
  rep.delta_fine = delta_four_point_sampled(quasi_hyperbolic_graph(fine), samples, seed);
  rep.ratio = rep.delta_coarse > 0.0 ? rep.delta_fine / rep.delta_coarse
                                     : std::numeric_limits<double>::infinity();
  return rep;
}

double hardy_constant(const SchrodingerOperator& op, const std::vector<double>& dj, double tol) {
  const int n = op.graph.vertex_count();
  if (static_cast<int>(dj.size()) != n) throw std::invalid_argument("one distance per vertex");
  for (double d : dj)
    if (!(d > 0.0)) throw std::invalid_argument("distances must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) + 2 * op.graph.edge_count());
  for (int x = 0; x < n; ++x) {
    trip.emplace_back(x, x, op.conductance_sum(x) + op.potential[x] * op.mu(x));
    for (const MetricGraph::Arc& arc : op.graph.neighbors(x)) {
      trip.emplace_back(x, arc.to, -op.conductance[arc.edge]);
    }
  }
  Eigen::SparseMatrix<double> k(n, n);
  k.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(k);
  if (solver.info() != Eigen::Success) throw std::runtime_error("energy form is not coercive");

  Eigen::VectorXd mass(n);
  for (int x = 0; x < n; ++x) mass[x] = op.mu(x) / (dj[x] * dj[x]);

  Eigen::VectorXd y = mass;  // positive start vector overlaps the ground state
  y /= std::sqrt(y.dot(mass.cwiseProduct(y)));
  double lambda = y.dot(k * y);
  for (int it = 0; it < 10000; ++it) {
    y = solver.solve(mass.cwiseProduct(y).eval());
    y /= std::sqrt(y.dot(mass.cwiseProduct(y)));
    const double next = y.dot(k * y);
    const bool done = std::abs(next - lambda) <= tol * std::max(std::abs(next), 1e-300);
    lambda = next;
    if (done) break;
  }
  return lambda;
}

UnfoldedOperator unfold_operator(const SchrodingerOperator& op, const DomainSample& ds,
                                 double n_dim, double v_cap) {
  const int n = ds.base.vertex_count();
  if (op.graph.vertex_count() != n || op.graph.edge_count() != ds.base.edge_count()) {
    throw std::invalid_argument("operator does not live on the sample's base graph");
  }
  const double alpha = 0.5 * (n_dim - 2.0);

  std::vector<double> hfun(n), transfer(n);
  for (int x = 0; x < n; ++x) {
    hfun[x] = std::pow(ds.dj[x], -alpha);
    transfer[x] = std::pow(ds.dj[x], alpha);
  }

  std::vector<Edge> edges = ds.base.edges();
  std::vector<double> w(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    w[e] = op.conductance[e] * hfun[edges[e].u] * hfun[edges[e].v];
    edges[e].length = edges[e].length * 0.5 * (1.0 / ds.dj[edges[e].u] + 1.0 / ds.dj[edges[e].v]);
  }

  std::vector<double> mu2(n), v2(n);
  for (int x = 0; x < n; ++x) mu2[x] = std::pow(ds.dj[x], -n_dim) * op.mu(x);
  for (int x = 0; x < n; ++x) {
    double kh = op.potential[x] * op.mu(x) * hfun[x];
    for (const MetricGraph::Arc& arc : op.graph.neighbors(x)) {
      kh += op.conductance[arc.edge] * (hfun[x] - hfun[arc.to]);
    }
    v2[x] = hfun[x] * kh / mu2[x];
  }

  UnfoldedOperator out{
      SchrodingerOperator(MetricGraph(n, std::move(edges), std::move(mu2)), std::move(w),
                          std::move(v2)),
      std::move(transfer), 0.0, true};
  for (int x = 0; x < n; ++x) {
    out.max_v_dsq = std::max(out.max_v_dsq, std::abs(op.potential[x]) * ds.dj[x] * ds.dj[x]);
  }
  out.v_bounded = out.max_v_dsq <= v_cap;
  return out;
}

}  // namespace hyperpot
