#include "hyperpot/potential.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace hyperpot {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

void check_vertex_set(const MetricGraph& g, const std::vector<int>& set, const char* what) {
  for (int v : set) {
    if (v < 0 || v >= g.vertex_count()) throw std::invalid_argument(std::string(what) + " out of range");
  }
}

std::vector<char> mask_of(int n, const std::vector<int>& set) {
  std::vector<char> m(n, 0);
  for (int v : set) m[v] = 1;
  return m;
}

std::vector<int> intersect_sorted(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<int> difference_sorted(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// v = data on bd, (L - lambda)-harmonic on the solver's domain, zero
// elsewhere. `solver` must be assembled on the unknown set; pass null when
// there are no unknowns. `data` is a whole-graph vector read on bd only.
std::vector<double> harmonic_extension(const SchrodingerOperator& op, const DirichletSolver* solver,
                                       const std::vector<int>& bd, const std::vector<double>& data) {
  const MetricGraph& g = op.graph;
  std::vector<double> out(g.vertex_count(), 0.0);
  if (solver != nullptr) {
    std::vector<double> rhs(g.vertex_count(), 0.0);
    for (int b : bd) {
      for (const auto& arc : g.neighbors(b)) rhs[arc.to] += op.conductance[arc.edge] * data[b];
    }
    out = solver->solve(rhs);
  }
  for (int b : bd) out[b] = data[b];
  return out;
}

double sup_over(const std::vector<int>& set, const std::vector<double>& v) {
  double s = 0.0;
  for (int x : set) s = std::max(s, std::abs(v[x]));
  return s;
}

}  // namespace

ReduitResult reduit(const SchrodingerOperator& op, const std::vector<int>& domain,
                    const std::vector<int>& active, const std::vector<double>& obstacle,
                    double lambda, double tol, int max_sweeps) {
  const MetricGraph& g = op.graph;
  const int n = g.vertex_count();
  std::vector<int> dom = sorted_unique(domain);
  std::vector<int> act = sorted_unique(active);
  if (dom.empty()) throw std::invalid_argument("reduit needs a nonempty domain");
  check_vertex_set(g, dom, "domain vertex");
  if (!is_subset(act, dom)) throw std::invalid_argument("active set must lie in the domain");
  if (static_cast<int>(obstacle.size()) != n) throw std::invalid_argument("obstacle size mismatch");
  if (max_sweeps < 1) throw std::invalid_argument("max_sweeps must be positive");

  const double scale = std::max(1.0, sup_over(dom, obstacle));
  const double pre_tol = 1e-8 * scale;
  for (int x : dom) {
    if (obstacle[x] < -pre_tol) throw std::invalid_argument("obstacle must be nonnegative on the domain");
  }
  std::vector<double> lu = op.apply(obstacle);
  for (int x : dom) {
    if (lu[x] - lambda * obstacle[x] < -pre_tol) {
      throw std::invalid_argument("obstacle must be superharmonic on the domain");
    }
  }

  ReduitResult res;
  res.values.assign(n, 0.0);
  if (act.empty()) {
    res.converged = true;
    return res;
  }

  // Warm start: equality on the active set, harmonic extension off it. For a
  // superharmonic obstacle this is already the solution and the sweeps below
  // only certify it.
  std::vector<int> unknown = difference_sorted(dom, act);
  std::unique_ptr<DirichletSolver> solver;
  if (!unknown.empty()) solver = std::make_unique<DirichletSolver>(op, unknown, lambda);
  res.values = harmonic_extension(op, solver.get(), act, obstacle);

  const std::vector<char> in_dom = mask_of(n, dom);
  const std::vector<char> in_act = mask_of(n, act);
  std::vector<double> diag(n, 0.0);
  for (int x : dom) {
    diag[x] = op.conductance_sum(x) + (op.potential[x] - lambda) * g.mu(x);
    if (!(diag[x] > 0.0)) throw std::runtime_error("nonpositive diagonal; operator is not coercive here");
  }

  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double change = 0.0;
    for (int x : dom) {
      double s = 0.0;
      for (const auto& arc : g.neighbors(x)) {
        if (in_dom[arc.to]) s += op.conductance[arc.edge] * res.values[arc.to];
      }
      double h = s / diag[x];
      if (in_act[x]) h = std::max(h, obstacle[x]);
      change = std::max(change, std::abs(h - res.values[x]));
      res.values[x] = h;
    }
    res.sweeps = sweep;
    res.residual = change;
    if (change <= tol * scale) {
      res.converged = true;
      break;
    }
  }

  const double contact_tol = 1e-7 * scale;
  for (int x : act) {
    if (res.values[x] <= obstacle[x] + contact_tol) res.contact.push_back(x);
  }
  return res;
}

ReduitPropertiesReport reduit_properties_check(const SchrodingerOperator& op,
                                               const std::vector<int>& domain, std::uint64_t seed,
                                               double tol, double lambda) {
  const MetricGraph& g = op.graph;
  std::vector<int> dom = sorted_unique(domain);
  if (dom.size() < 4) throw std::invalid_argument("properties check needs at least 4 vertices");
  check_vertex_set(g, dom, "domain vertex");
  const int k = static_cast<int>(dom.size());

  DirichletSolver solver(op, dom, lambda);
  std::uint64_t state = seed ^ 0x9e3779b97f4a7c15ull;
  auto pick = [&]() { return dom[static_cast<int>(splitmix64(state) % static_cast<std::uint64_t>(k))]; };
  auto subset = [&]() {
    std::vector<int> s;
    for (int v : dom) {
      if (splitmix64(state) % 3u == 0u) s.push_back(v);
    }
    if (s.empty()) s.push_back(pick());
    return s;
  };

  const int p1 = pick();
  int p2 = pick();
  while (p2 == p1) p2 = pick();
  int p3 = pick();
  while (p3 == p1 || p3 == p2) p3 = pick();

  std::vector<double> g1 = solver.green_column(p1);
  std::vector<double> g2 = solver.green_column(p2);
  std::vector<double> g3 = solver.green_column(p3);
  const int n = g.vertex_count();
  std::vector<double> u(n, 0.0), v(n, 0.0);
  for (int x = 0; x < n; ++x) {
    u[x] = g1[x] + 0.7 * g2[x];
    v[x] = 0.5 * g3[x] + 0.2 * g1[x];
  }
  const double scale = std::max(1e-300, sup_over(dom, u));

  std::vector<int> A = subset();
  std::vector<int> B = subset();
  const double c = 1.5 + static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;

  ReduitResult ru = reduit(op, dom, A, u, lambda);
  ReduitPropertiesReport rep;

  // harmonic away from the closed active set
  std::vector<double> lr = op.apply(ru.values);
  std::vector<int> off = difference_sorted(dom, sorted_unique(set_closure(g, A)));
  for (int x : off) rep.max_harmonic_residual = std::max(rep.max_harmonic_residual, std::abs(lr[x] - lambda * ru.values[x]) / scale);

  for (int x : A) rep.max_equality_gap = std::max(rep.max_equality_gap, std::abs(ru.values[x] - u[x]) / scale);

  std::vector<double> cu(n);
  for (int x = 0; x < n; ++x) cu[x] = c * u[x];
  ReduitResult rcu = reduit(op, dom, A, cu, lambda);
  for (int x : dom) rep.max_scaling_gap = std::max(rep.max_scaling_gap, std::abs(rcu.values[x] - c * ru.values[x]) / (c * scale));

  ReduitResult rv = reduit(op, dom, A, v, lambda);
  std::vector<double> upv(n);
  for (int x = 0; x < n; ++x) upv[x] = u[x] + v[x];
  ReduitResult ruv = reduit(op, dom, A, upv, lambda);
  for (int x : dom) {
    rep.max_additivity_gap = std::max(rep.max_additivity_gap,
                                      std::abs(ruv.values[x] - ru.values[x] - rv.values[x]) / scale);
  }

  std::vector<int> AB = sorted_unique([&] {
    std::vector<int> t = A;
    t.insert(t.end(), B.begin(), B.end());
    return t;
  }());
  ReduitResult rb = reduit(op, dom, B, u, lambda);
  ReduitResult rab = reduit(op, dom, AB, u, lambda);
  rep.min_subadditivity_margin = std::numeric_limits<double>::infinity();
  for (int x : dom) {
    rep.min_subadditivity_margin = std::min(
        rep.min_subadditivity_margin, (ru.values[x] + rb.values[x] - rab.values[x]) / scale);
  }

  const int sx = pick();
  int sy = pick();
  while (sy == sx) sy = pick();
  std::vector<double> gy = solver.green_column(sy);
  std::vector<double> gx = solver.green_column(sx);
  const double gscale = std::max({1e-300, sup_over(dom, gx), sup_over(dom, gy)});
  ReduitResult rgy = reduit(op, dom, A, gy, lambda);
  ReduitResult rgx = reduit(op, dom, A, gx, lambda);
  rep.max_symmetry_gap = std::abs(rgy.values[sx] - rgx.values[sy]) / gscale;

  rep.ok = rep.max_harmonic_residual <= tol && rep.max_equality_gap <= tol &&
           rep.max_scaling_gap <= tol && rep.max_additivity_gap <= tol &&
           rep.min_subadditivity_margin >= -tol && rep.max_symmetry_gap <= tol;
  return rep;
}

MartinKernel martin_kernel(const SchrodingerOperator& op, const std::vector<int>& domain, int pole,
                           int base, double lambda) {
  std::vector<int> dom = sorted_unique(domain);
  check_vertex_set(op.graph, dom, "domain vertex");
  if (!std::binary_search(dom.begin(), dom.end(), pole)) throw std::invalid_argument("pole not in domain");
  if (!std::binary_search(dom.begin(), dom.end(), base)) throw std::invalid_argument("base not in domain");
  DirichletSolver solver(op, dom, lambda);
  MartinKernel ker;
  ker.base = base;
  ker.pole = pole;
  ker.values = solver.green_column(pole);
  const double kb = ker.values[base];
  if (!(kb > 0.0)) throw std::runtime_error("Green function vanishes at the base");
  for (double& t : ker.values) t /= kb;
  return ker;
}

MartinConvergenceReport martin_convergence(const SchrodingerOperator& op,
                                           const std::vector<int>& domain,
                                           const std::vector<int>& ray,
                                           const std::vector<double>& depths, int base,
                                           double window_radius, double tol, double lambda) {
  const MetricGraph& g = op.graph;
  std::vector<int> dom = sorted_unique(domain);
  check_vertex_set(g, dom, "domain vertex");
  if (ray.empty() || ray.front() != base) throw std::invalid_argument("ray must start at the base");
  if (depths.size() < 2) throw std::invalid_argument("need at least two depths");

  std::vector<double> pos(ray.size(), 0.0);
  for (std::size_t i = 0; i + 1 < ray.size(); ++i) {
    double step = -1.0;
    for (const auto& arc : g.neighbors(ray[i])) {
      if (arc.to == ray[i + 1]) {
        step = arc.length;
        break;
      }
    }
    if (step < 0.0) throw std::invalid_argument("ray vertices must be consecutive neighbors");
    pos[i + 1] = pos[i] + step;
  }

  MartinConvergenceReport rep;
  for (double d : depths) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < ray.size(); ++i) {
      if (std::abs(pos[i] - d) < std::abs(pos[best] - d)) best = i;
    }
    int pole = ray[best];
    if (!std::binary_search(dom.begin(), dom.end(), pole)) throw std::invalid_argument("pole not in domain");
    rep.poles.push_back(pole);
  }

  std::vector<int> window = intersect_sorted(g.ball(base, window_radius), dom);
  if (!std::binary_search(dom.begin(), dom.end(), base)) throw std::invalid_argument("base not in domain");

  DirichletSolver solver(op, dom, lambda);
  std::vector<std::vector<double>> kernels;
  for (int pole : rep.poles) {
    std::vector<double> col = solver.green_column(pole);
    const double kb = col[base];
    if (!(kb > 0.0)) throw std::runtime_error("Green function vanishes at the base");
    for (double& t : col) t /= kb;
    kernels.push_back(std::move(col));
  }

  for (std::size_t i = 0; i + 1 < kernels.size(); ++i) {
    double d = 0.0;
    for (int x : window) d = std::max(d, std::abs(kernels[i + 1][x] - kernels[i][x]));
    rep.sup_diffs.push_back(d);
  }
  rep.monotone = true;
  for (std::size_t i = 0; i + 1 < rep.sup_diffs.size(); ++i) {
    if (rep.sup_diffs[i + 1] > rep.sup_diffs[i] + 1e-12 + 1e-6 * rep.sup_diffs[i]) rep.monotone = false;
  }
  rep.final_diff = rep.sup_diffs.empty() ? 0.0 : rep.sup_diffs.back();
  rep.cauchy = rep.monotone && rep.final_diff <= tol;
  rep.limit.base = base;
  rep.limit.pole = rep.poles.back();
  rep.limit.values = kernels.back();
  return rep;
}

VanishingReport l_vanishing_test(const SchrodingerOperator& op, const std::vector<int>& domain,
                                 int base, const std::vector<double>& u,
                                 const std::vector<int>& v_set, const std::vector<int>& radii,
                                 double vanish_tol, double lambda) {
  const MetricGraph& g = op.graph;
  const int n = g.vertex_count();
  std::vector<int> dom = sorted_unique(domain);
  check_vertex_set(g, dom, "domain vertex");
  if (!std::binary_search(dom.begin(), dom.end(), base)) throw std::invalid_argument("base not in domain");
  if (static_cast<int>(u.size()) != n) throw std::invalid_argument("u size mismatch");
  if (radii.empty()) throw std::invalid_argument("need at least one exhaustion radius");

  std::vector<int> vset = intersect_sorted(sorted_unique(v_set), dom);
  std::vector<int> rads(radii);
  std::sort(rads.begin(), rads.end());

  VanishingReport rep;
  rep.radii = rads;
  double norm = std::abs(u[base]);
  if (norm <= 0.0) norm = std::max(1e-300, sup_over(dom, u));

  for (int R : rads) {
    std::vector<int> window = intersect_sorted(g.ball(base, static_cast<double>(R)), dom);
    std::vector<int> act = intersect_sorted(vset, window);
    ReduitResult sweep = reduit(op, dom, act, u, lambda);

    // Greatest harmonic minorant of the sweep inside the exhaustion ball:
    // extend the rim values inward and iterate the pointwise minimum with the
    // sweep until the extension settles (one pass when the sweep is exactly
    // superharmonic).
    std::vector<int> rim = inner_boundary(g, window);
    double score = 0.0;
    if (!rim.empty()) {
      std::vector<int> rim_sorted = sorted_unique(rim);
      std::vector<int> inside = difference_sorted(window, rim_sorted);
      std::unique_ptr<DirichletSolver> hsolver;
      if (!inside.empty()) hsolver = std::make_unique<DirichletSolver>(op, inside, lambda);
      std::vector<double> data(n, 0.0);
      for (int b : rim_sorted) data[b] = sweep.values[b];
      std::vector<double> h = harmonic_extension(op, hsolver.get(), rim_sorted, data);
      for (int it = 0; it < 10000; ++it) {
        for (int b : rim_sorted) data[b] = std::min(h[b], sweep.values[b]);
        std::vector<double> hn = harmonic_extension(op, hsolver.get(), rim_sorted, data);
        double diff = 0.0;
        for (int x : window) diff = std::max(diff, std::abs(hn[x] - h[x]));
        h = std::move(hn);
        if (diff <= 1e-10 * std::max(1.0, sup_over(window, sweep.values))) break;
      }
      score = h[base];
    }
    rep.scores.push_back(score);
  }

  rep.score = rep.scores.back() / norm;
  rep.vanishing = rep.score <= vanish_tol;
  return rep;
}

namespace {

// Lawson-Hanson active set iteration; A has full column rank on the passive
// sets encountered in practice (kernel columns with distinct poles).
Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const int k = static_cast<int>(A.cols());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(k);
  std::vector<char> passive(k, 0);
  Eigen::VectorXd resid = b;
  const double grad_tol = 1e-12 * std::max(1.0, (A.transpose() * b).cwiseAbs().maxCoeff());

  for (int outer = 0; outer < 3 * k + 10; ++outer) {
    Eigen::VectorXd grad = A.transpose() * resid;
    int j = -1;
    double best = grad_tol;
    for (int i = 0; i < k; ++i) {
      if (!passive[i] && grad[i] > best) {
        best = grad[i];
        j = i;
      }
    }
    if (j < 0) break;
    passive[j] = 1;

    for (int inner = 0; inner <= k; ++inner) {
      std::vector<int> idx;
      for (int i = 0; i < k; ++i) {
        if (passive[i]) idx.push_back(i);
      }
      Eigen::MatrixXd Ap(A.rows(), idx.size());
      for (std::size_t c = 0; c < idx.size(); ++c) Ap.col(c) = A.col(idx[c]);
      Eigen::VectorXd z = Ap.colPivHouseholderQr().solve(b);

      double alpha = 1.0;
      int drop = -1;
      for (std::size_t c = 0; c < idx.size(); ++c) {
        if (z[c] <= 0.0) {
          double xi = x[idx[c]];
          double a = xi / (xi - z[c]);
          if (a < alpha) {
            alpha = a;
            drop = idx[c];
          }
        }
      }
      if (drop < 0) {
        x.setZero();
        for (std::size_t c = 0; c < idx.size(); ++c) x[idx[c]] = z[c];
        break;
      }
      for (std::size_t c = 0; c < idx.size(); ++c) x[idx[c]] += alpha * (z[c] - x[idx[c]]);
      x[drop] = 0.0;
      passive[drop] = 0;
    }
    resid = b - A * x;
  }
  return x;
}

}  // namespace

TreeDecomposition martin_decompose_tree(const SchrodingerOperator& op,
                                        const std::vector<int>& domain, int base,
                                        const std::vector<double>& u, double tol, double lambda) {
  const MetricGraph& g = op.graph;
  std::vector<int> dom = sorted_unique(domain);
  check_vertex_set(g, dom, "domain vertex");
  if (!std::binary_search(dom.begin(), dom.end(), base)) throw std::invalid_argument("base not in domain");
  if (static_cast<int>(u.size()) != g.vertex_count()) throw std::invalid_argument("u size mismatch");

  TreeDecomposition dec;
  for (int x : dom) {
    if (g.degree(x) == 1) dec.leaves.push_back(x);
  }
  if (dec.leaves.empty()) throw std::invalid_argument("domain has no leaves");

  DirichletSolver solver(op, dom, lambda);
  const int rows = static_cast<int>(dom.size());
  const int cols = static_cast<int>(dec.leaves.size());
  Eigen::MatrixXd A(rows, cols);
  for (int c = 0; c < cols; ++c) {
    std::vector<double> col = solver.green_column(dec.leaves[c]);
    const double kb = col[base];
    if (!(kb > 0.0)) throw std::runtime_error("Green function vanishes at the base");
    for (int r = 0; r < rows; ++r) A(r, c) = col[dom[r]] / kb;
  }
  Eigen::VectorXd b(rows);
  for (int r = 0; r < rows; ++r) b[r] = u[dom[r]];

  Eigen::VectorXd w = nnls(A, b);
  dec.weights.assign(w.data(), w.data() + cols);
  Eigen::VectorXd resid = A * w - b;
  dec.residual = resid.cwiseAbs().maxCoeff();
  dec.ok = dec.residual <= tol;
  return dec;
}

}  // namespace hyperpot
