#include "hyperpot/hyperbolic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace hyperpot {

namespace {

// Rejection sampling keeps the draw sequence identical across standard libraries.
std::uint64_t rand_below(std::mt19937_64& rng, std::uint64_t m) {
  std::uint64_t mask = ~0ull;
  std::uint64_t pow2 = 1;
  while (pow2 < m) pow2 <<= 1;
  mask = pow2 - 1;
  for (;;) {
    std::uint64_t r = rng() & mask;
    if (r < m) return r;
  }
}

struct DistancePool {
  std::vector<int> members;
  std::vector<double> d;  // members.size()^2, row-major
  double at(size_t i, size_t j) const { return d[i * members.size() + j]; }
};

DistancePool build_pool(const MetricGraph& g, int pool_cap, std::uint64_t seed) {
  DistancePool pool;
  int n = g.vertex_count();
  if (n <= pool_cap) {
    pool.members.resize(n);
    for (int i = 0; i < n; ++i) pool.members[i] = i;
  } else {
    std::vector<int> ids(n);
    for (int i = 0; i < n; ++i) ids[i] = i;
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    for (int i = 0; i < pool_cap; ++i) {
      int j = i + static_cast<int>(rand_below(rng, static_cast<std::uint64_t>(n - i)));
      std::swap(ids[i], ids[j]);
    }
    ids.resize(pool_cap);
    std::sort(ids.begin(), ids.end());
    pool.members = std::move(ids);
  }
  size_t m = pool.members.size();
  pool.d.resize(m * m);
  for (size_t i = 0; i < m; ++i) {
    std::vector<double> row = g.distances_from(pool.members[i]);
    for (size_t j = 0; j < m; ++j) pool.d[i * m + j] = row[pool.members[j]];
  }
  return pool;
}

double four_point_defect(const DistancePool& p, size_t x, size_t y, size_t z, size_t w) {
  auto gp = [&](size_t a, size_t b) { return 0.5 * (p.at(z, a) + p.at(z, b) - p.at(a, b)); };
  return std::min(gp(x, w), gp(w, y)) - gp(x, y);
}

}  // namespace

double gromov_product(const MetricGraph& g, int x, int y, int base) {
  std::vector<double> db = g.distances_from(base);
  return 0.5 * (db[x] + db[y] - g.distance(x, y));
}

double delta_four_point_exhaustive(const MetricGraph& g) {
  if (g.vertex_count() > 60)
    throw std::invalid_argument("exhaustive four-point scan is limited to 60 vertices; use the sampled mode");
  DistancePool pool = build_pool(g, g.vertex_count(), 0);
  size_t n = pool.members.size();
  double delta = 0.0;
  for (size_t x = 0; x < n; ++x)
    for (size_t y = 0; y < n; ++y)
      for (size_t z = 0; z < n; ++z)
        for (size_t w = 0; w < n; ++w) delta = std::max(delta, four_point_defect(pool, x, y, z, w));
  return delta;
}

double delta_four_point_sampled(const MetricGraph& g, long long n_quadruples, std::uint64_t seed,
                                int pool_cap) {
  if (n_quadruples < 1) throw std::invalid_argument("need a positive quadruple count");
  if (pool_cap < 4) throw std::invalid_argument("pool_cap too small");
  DistancePool pool = build_pool(g, pool_cap, seed);
  std::mt19937_64 rng(seed);
  size_t m = pool.members.size();
  double delta = 0.0;
  for (long long k = 0; k < n_quadruples; ++k) {
    size_t x = rand_below(rng, m), y = rand_below(rng, m), z = rand_below(rng, m), w = rand_below(rng, m);
    delta = std::max(delta, four_point_defect(pool, x, y, z, w));
  }
  return delta;
}

double delta_thin_triangles(const MetricGraph& g, long long n_triangles, std::uint64_t seed) {
  int n = g.vertex_count();
  std::vector<std::array<int, 3>> triples;
  if (n_triangles <= 0) {
    if (n > 40) throw std::invalid_argument("exhaustive triangle scan is limited to 40 vertices");
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        for (int c = b + 1; c < n; ++c) triples.push_back({a, b, c});
  } else {
    std::mt19937_64 rng(seed);
    for (long long k = 0; k < n_triangles; ++k) {
      int a = static_cast<int>(rand_below(rng, n));
      int b = static_cast<int>(rand_below(rng, n));
      int c = static_cast<int>(rand_below(rng, n));
      triples.push_back({a, b, c});
    }
  }
  double delta = 0.0;
  for (const auto& t : triples) {
    std::vector<int> side[3] = {g.geodesic(t[0], t[1]), g.geodesic(t[1], t[2]), g.geodesic(t[2], t[0])};
    for (int s = 0; s < 3; ++s) {
      std::vector<int> others(side[(s + 1) % 3]);
      others.insert(others.end(), side[(s + 2) % 3].begin(), side[(s + 2) % 3].end());
      std::sort(others.begin(), others.end());
      others.erase(std::unique(others.begin(), others.end()), others.end());
      std::vector<double> dist = distances_to_set(g, others);
      for (int v : side[s]) delta = std::max(delta, dist[v]);
    }
  }
  return delta;
}

BoundaryRay ray_to(const MetricGraph& g, int base, int target) {
  BoundaryRay r;
  r.base = base;
  r.vertices = g.geodesic(base, target);
  return r;
}

void validate_ray(const MetricGraph& g, const BoundaryRay& ray) {
  if (ray.vertices.empty() || ray.vertices.front() != ray.base)
    throw std::invalid_argument("ray must start at its base");
  std::vector<double> dist = g.distances_from(ray.base);
  for (size_t k = 0; k + 1 < ray.vertices.size(); ++k) {
    int a = ray.vertices[k], b = ray.vertices[k + 1];
    bool adjacent = false;
    for (const auto& arc : g.neighbors(a))
      if (arc.to == b) {
        adjacent = true;
        break;
      }
    if (!adjacent) throw std::invalid_argument("ray vertices must be consecutive neighbors");
    if (!(dist[b] > dist[a])) throw std::invalid_argument("ray must move strictly away from its base");
  }
}

std::vector<std::vector<double>> boundary_quasi_metric(const MetricGraph& g, int base,
                                                       const std::vector<BoundaryRay>& rays) {
  size_t k = rays.size();
  std::vector<double> base_dist = g.distances_from(base);
  for (const BoundaryRay& r : rays) {
    if (r.base != base) throw std::invalid_argument("all rays must share the base");
    validate_ray(g, r);
    if (base_dist[r.tip()] < 2.0) throw std::invalid_argument("ray depth must be at least 2");
  }
  std::vector<std::vector<double>> tip_dist(k);
  for (size_t i = 0; i < k; ++i) tip_dist[i] = g.distances_from(rays[i].tip());
  std::vector<std::vector<double>> d(k, std::vector<double>(k, 0.0));
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      double gp = 0.5 * (base_dist[rays[i].tip()] + base_dist[rays[j].tip()] - tip_dist[i][rays[j].tip()]);
      d[i][j] = std::exp(-gp);
    }
  return d;
}

double quasi_ultrametric_constant(const std::vector<std::vector<double>>& d) {
  size_t n = d.size();
  double q = 1.0;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      for (size_t k = 0; k < n; ++k) {
        if (i == j || j == k || i == k) continue;
        double denom = std::max(d[i][j], d[j][k]);
        if (denom > 0.0) q = std::max(q, d[i][k] / denom);
      }
  return q;
}

namespace {

std::vector<double> path_positions(const MetricGraph& g, const std::vector<int>& path) {
  std::vector<double> pos(path.size(), 0.0);
  for (size_t k = 0; k + 1 < path.size(); ++k) {
    double len = -1.0;
    for (const auto& arc : g.neighbors(path[k]))
      if (arc.to == path[k + 1]) {
        len = arc.length;
        break;
      }
    if (len < 0.0) throw std::invalid_argument("path vertices must be consecutive neighbors");
    pos[k + 1] = pos[k] + len;
  }
  return pos;
}

double chain_phi0(const MetricGraph& g, const std::vector<int>& track) {
  double phi0 = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i + 1 < track.size(); ++i) phi0 = std::min(phi0, g.distance(track[i], track[i + 1]));
  return track.size() > 1 ? phi0 : 0.0;
}

}  // namespace

PhiChain phi_chain_along_geodesic(const MetricGraph& g, int a, int b, double delta) {
  if (delta < 0.0) throw std::invalid_argument("delta must be nonnegative");
  double delta_eff = std::max(delta, 0.5);
  double s = 4.0 * delta_eff;
  std::vector<int> path = g.geodesic(a, b);
  std::vector<double> pos = path_positions(g, path);
  double total = pos.back();
  if (total < 8.0 * delta_eff - kDistanceTol) throw std::invalid_argument("endpoints closer than 8 delta_eff");
  int m = static_cast<int>(std::floor(total / s + kDistanceTol));
  // The innermost threshold must stay strictly below d(a,b) or its sublevel set is empty.
  if (m * s >= total - kDistanceTol) m -= 1;
  if (m < 3) throw std::invalid_argument("chain shorter than 3 links");

  PhiChain chain;
  chain.delta_eff = delta_eff;
  std::vector<double> da = g.distances_from(a);
  std::vector<double> db = g.distances_from(b);
  double dab = da[b];
  for (int i = 1; i <= m; ++i) {
    double target = s * i;
    size_t best = 0;
    for (size_t k = 1; k < path.size(); ++k)
      if (std::abs(pos[k] - target) < std::abs(pos[best] - target)) best = k;
    int x = path[best];
    if (!chain.track.empty() && chain.track.back() == x)
      throw std::runtime_error("track points collide; edge lengths too coarse for this delta");
    chain.track.push_back(x);
    std::vector<int> set;
    double threshold = s * i;
    for (int v = 0; v < g.vertex_count(); ++v) {
      double gp = 0.5 * (da[v] + dab - db[v]);
      if (gp > threshold + kDistanceTol * (1.0 + threshold)) set.push_back(v);
    }
    if (set.empty()) throw std::runtime_error("empty chain set; endpoints too close for this delta");
    chain.sets.push_back(std::move(set));
  }
  chain.phi0 = chain_phi0(g, chain.track);
  return chain;
}

PhiChain track_chain(const MetricGraph& g, std::vector<int> track, double delta) {
  if (track.size() < 2) throw std::invalid_argument("track needs at least 2 points");
  PhiChain chain;
  chain.delta_eff = std::max(delta, 0.5);
  chain.track = std::move(track);
  chain.phi0 = chain_phi0(g, chain.track);
  return chain;
}

PhiChain set_chain(const MetricGraph& g, std::vector<std::vector<int>> sets, std::vector<int> track,
                   double delta) {
  if (sets.size() != track.size()) throw std::invalid_argument("one set per track point required");
  PhiChain chain;
  chain.delta_eff = std::max(delta, 0.5);
  for (auto& s : sets) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  chain.sets = std::move(sets);
  chain.track = std::move(track);
  chain.phi0 = chain_phi0(g, chain.track);
  return chain;
}

PhiChain reverse_chain(const MetricGraph& g, const PhiChain& chain) {
  if (chain.sets.empty()) throw std::invalid_argument("cannot reverse a track-only chain");
  PhiChain rev;
  rev.delta_eff = chain.delta_eff;
  int m = chain.length();
  for (int j = 0; j < m; ++j) {
    const std::vector<int>& u = chain.sets[m - 1 - j];
    std::vector<int> closed = set_closure(g, u);
    std::vector<char> mask(g.vertex_count(), 0);
    for (int v : closed) mask[v] = 1;
    std::vector<int> w;
    for (int v = 0; v < g.vertex_count(); ++v)
      if (!mask[v]) w.push_back(v);
    rev.sets.push_back(std::move(w));
    rev.track.push_back(chain.track[m - 1 - j]);
  }
  rev.phi0 = chain_phi0(g, rev.track);
  return rev;
}

PhiChainReport verify_phi_chain(const MetricGraph& g, const PhiChain& chain) {
  PhiChainReport rep;
  rep.phi0 = chain.phi0;
  if (chain.length() < 2) {
    rep.violations.push_back("chain has fewer than 2 links");
    return rep;
  }
  if (chain.sets.size() != chain.track.size()) {
    rep.violations.push_back("chain has no sets to verify");
    return rep;
  }
  int m = chain.length();
  for (int i = 0; i < m; ++i)
    if (chain.sets[i].empty()) rep.violations.push_back("set " + std::to_string(i + 1) + " is empty");
  if (!rep.violations.empty()) return rep;

  for (int i = 0; i + 1 < m; ++i)
    if (!is_subset(chain.sets[i + 1], chain.sets[i]))
      rep.violations.push_back("set " + std::to_string(i + 2) + " is not nested in set " + std::to_string(i + 1));

  // Track spacing against phi0.
  rep.max_track_gap = 0.0;
  for (int i = 0; i + 1 < m; ++i)
    rep.max_track_gap = std::max(rep.max_track_gap, g.distance(chain.track[i], chain.track[i + 1]));
  if (rep.max_track_gap > 3.0 * chain.phi0 + kDistanceTol)
    rep.violations.push_back("track spacing exceeds 3 phi0");

  std::vector<std::vector<int>> boundaries(m);
  std::vector<std::vector<int>> interiors(m);
  for (int i = 0; i < m; ++i) {
    boundaries[i] = inner_boundary(g, chain.sets[i]);
    interiors[i] = set_interior(g, chain.sets[i]);
  }
  for (int i = 0; i < m; ++i) {
    int x = chain.track[i];
    bool in_interior = std::binary_search(interiors[i].begin(), interiors[i].end(), x);
    std::vector<int> closed = set_closure(g, chain.sets[i]);
    bool in_closure = std::binary_search(closed.begin(), closed.end(), x);
    if (in_interior || !in_closure)
      rep.violations.push_back("track point " + std::to_string(i + 1) + " is not on its set boundary");
  }

  // Condition (iii): d(x, boundary(U_{i+-1})) >= Phi(d(x, x_i)) on boundary(U_i).
  std::vector<std::pair<double, double>> samples;  // (t, D)
  for (int i = 0; i < m; ++i) {
    std::vector<double> t_dist = g.distances_from(chain.track[i]);
    for (int dir : {-1, 1}) {
      int j = i + dir;
      if (j < 0 || j >= m) continue;
      std::vector<double> d_bd = distances_to_set(g, boundaries[j]);
      for (int x : boundaries[i]) samples.emplace_back(t_dist[x], d_bd[x]);
    }
  }
  if (samples.empty()) {
    rep.violations.push_back("no boundary samples");
    return rep;
  }
  double crit = std::numeric_limits<double>::infinity();
  for (auto [t, D] : samples)
    if (t > kDistanceTol) crit = std::min(crit, D / t);
  rep.alpha = std::isfinite(crit) ? crit / 2.0 : 1.0;
  rep.beta = std::numeric_limits<double>::infinity();
  for (auto [t, D] : samples) rep.beta = std::min(rep.beta, D - rep.alpha * t);
  if (!(rep.beta > 0.0)) rep.violations.push_back("no positive-margin affine fit");
  rep.ok = rep.violations.empty();
  return rep;
}

PhiNeighborhoods phi_neighborhood_basis(const MetricGraph& g, int base, const BoundaryRay& ray,
                                        int levels, double delta) {
  if (levels < 1) throw std::invalid_argument("need at least one level");
  if (ray.base != base) throw std::invalid_argument("ray base mismatch");
  validate_ray(g, ray);
  double delta_eff = std::max(delta, 0.5);
  double c = 4.0 * delta_eff;
  std::vector<double> d_base = g.distances_from(base);
  std::vector<double> d_tip = g.distances_from(ray.tip());
  double depth = d_base[ray.tip()];
  if (depth + kDistanceTol < c * levels)
    throw std::invalid_argument("ray depth " + std::to_string(depth) + " below c_delta * levels");

  PhiNeighborhoods basis;
  basis.c_delta = c;
  basis.ray = ray;
  for (int i = 1; i <= levels; ++i) {
    double threshold = c * i;
    std::vector<int> set;
    for (int v = 0; v < g.vertex_count(); ++v) {
      double gp = 0.5 * (d_base[v] + depth - d_tip[v]);
      if (gp > threshold + kDistanceTol * (1.0 + threshold)) set.push_back(v);
    }
    if (set.empty()) throw std::invalid_argument("level " + std::to_string(i) + " is empty; ray too shallow");
    basis.sets.push_back(std::move(set));
  }
  for (int i = 1; i < levels; ++i) {
    double target = c * (i + 0.5);
    size_t best = 0;
    for (size_t k = 1; k < ray.vertices.size(); ++k)
      if (std::abs(d_base[ray.vertices[k]] - target) < std::abs(d_base[ray.vertices[best]] - target)) best = k;
    basis.hubs.push_back(ray.vertices[best]);
  }
  return basis;
}

double hub_gap_radius(const MetricGraph& g, const std::vector<int>& n_i, const std::vector<int>& n_ip1,
                      int hub) {
  std::vector<int> closed = set_closure(g, n_ip1);
  std::vector<char> gap(g.vertex_count(), 0);
  for (int v : n_i) gap[v] = 1;
  for (int v : closed) gap[v] = 0;
  if (!gap[hub]) return -1.0;
  std::vector<int> outside;
  for (int v = 0; v < g.vertex_count(); ++v)
    if (!gap[v]) outside.push_back(v);
  if (outside.empty()) return std::numeric_limits<double>::infinity();
  std::vector<double> dist = distances_to_set(g, outside);
  return dist[hub];
}

}  // namespace hyperpot
