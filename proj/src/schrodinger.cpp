#include "hyperpot/schrodinger.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace hyperpot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_sorted_domain(const MetricGraph& g, const std::vector<int>& domain) {
  if (domain.empty()) throw std::invalid_argument("empty domain");
  for (size_t i = 0; i < domain.size(); ++i) {
    if (domain[i] < 0 || domain[i] >= g.vertex_count())
      throw std::invalid_argument("domain vertex out of range");
    if (i > 0 && domain[i] <= domain[i - 1]) throw std::invalid_argument("domain must be sorted and unique");
  }
}

std::vector<int> local_index(int n, const std::vector<int>& domain) {
  std::vector<int> local(n, -1);
  for (size_t i = 0; i < domain.size(); ++i) local[domain[i]] = static_cast<int>(i);
  return local;
}

Eigen::SparseMatrix<double> assemble(const SchrodingerOperator& op, const std::vector<int>& domain,
                                     const std::vector<int>& local, double lambda) {
  int m = static_cast<int>(domain.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(domain.size() * 4);
  for (int i = 0; i < m; ++i) {
    int x = domain[i];
    double diag = op.conductance_sum(x) + (op.potential[x] - lambda) * op.mu(x);
    trip.emplace_back(i, i, diag);
    for (const auto& arc : op.graph.neighbors(x)) {
      int j = local[arc.to];
      if (j >= 0) trip.emplace_back(i, j, -op.conductance[arc.edge]);
    }
  }
  Eigen::SparseMatrix<double> K(m, m);
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

std::uint64_t splitmix(std::uint64_t& s) {
  s += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

SchrodingerOperator::SchrodingerOperator(MetricGraph g, std::vector<double> w, std::vector<double> v)
    : graph(std::move(g)), conductance(std::move(w)), potential(std::move(v)) {
  if (static_cast<int>(conductance.size()) != graph.edge_count())
    throw std::invalid_argument("one conductance per edge required");
  if (static_cast<int>(potential.size()) != graph.vertex_count())
    throw std::invalid_argument("one potential value per vertex required");
  for (double w_e : conductance)
    if (!(w_e > 0.0) || !std::isfinite(w_e)) throw std::invalid_argument("conductances must be positive");
  for (double v_x : potential)
    if (!std::isfinite(v_x)) throw std::invalid_argument("potential must be finite");
}

double SchrodingerOperator::conductance_sum(int x) const {
  double s = 0.0;
  for (const auto& arc : graph.neighbors(x)) s += conductance[arc.edge];
  return s;
}

std::vector<double> SchrodingerOperator::apply(const std::vector<double>& u) const {
  if (static_cast<int>(u.size()) != size()) throw std::invalid_argument("size mismatch");
  std::vector<double> out(u.size());
  for (int x = 0; x < size(); ++x) {
    double acc = 0.0;
    for (const auto& arc : graph.neighbors(x)) acc += conductance[arc.edge] * (u[x] - u[arc.to]);
    out[x] = acc / mu(x) + potential[x] * u[x];
  }
  return out;
}

double SchrodingerOperator::energy(const std::vector<double>& u) const {
  if (static_cast<int>(u.size()) != size()) throw std::invalid_argument("size mismatch");
  double e = 0.0;
  const auto& edges = graph.edges();
  for (size_t k = 0; k < edges.size(); ++k) {
    double d = u[edges[k].u] - u[edges[k].v];
    e += conductance[k] * d * d;
  }
  for (int x = 0; x < size(); ++x) e += potential[x] * u[x] * u[x] * mu(x);
  return e;
}

SchrodingerOperator SchrodingerOperator::shifted(double lambda) const {
  std::vector<double> v = potential;
  for (double& val : v) val -= lambda;
  return SchrodingerOperator(graph, conductance, std::move(v));
}

SchrodingerOperator laplacian(const MetricGraph& g) {
  return SchrodingerOperator(g, std::vector<double>(g.edge_count(), 1.0),
                             std::vector<double>(g.vertex_count(), 0.0));
}

SchrodingerOperator schrodinger(const MetricGraph& g, std::vector<double> v) {
  return SchrodingerOperator(g, std::vector<double>(g.edge_count(), 1.0), std::move(v));
}

double rayleigh(const SchrodingerOperator& op, const std::vector<double>& u) {
  double denom = 0.0;
  for (int x = 0; x < op.size(); ++x) denom += u[x] * u[x] * op.mu(x);
  if (!(denom > 0.0)) throw std::invalid_argument("zero test function");
  return op.energy(u) / denom;
}

EigenResult principal_eigenvalue(const SchrodingerOperator& op) {
  int n = op.size();
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  std::vector<int> local = local_index(n, all);
  Eigen::SparseMatrix<double> K = assemble(op, all, local, 0.0);
  Eigen::VectorXd mu(n);
  for (int i = 0; i < n; ++i) mu[i] = op.mu(i);

  EigenResult res;
  if (n < 200) {
    Eigen::MatrixXd dense = Eigen::MatrixXd(K);
    Eigen::VectorXd is = mu.array().rsqrt();
    Eigen::MatrixXd sym = is.asDiagonal() * dense * is.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    res.lambda1 = eig.eigenvalues()[0];
    Eigen::VectorXd u = is.asDiagonal() * eig.eigenvectors().col(0);
    if (u.sum() < 0) u = -u;
    u /= u.cwiseAbs().maxCoeff();
    res.eigenvector.assign(u.data(), u.data() + n);
    res.converged = true;
    return res;
  }

  // Gershgorin lower bound for the symmetrized pencil, then shift-inverted
  // power iteration.
  double lower = kInf;
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (const auto& arc : op.graph.neighbors(i))
      off += op.conductance[arc.edge] / std::sqrt(op.mu(i) * op.mu(arc.to));
    double diag = (op.conductance_sum(i) + op.potential[i] * op.mu(i)) / op.mu(i);
    lower = std::min(lower, diag - off);
  }
  double sigma = lower - 1e-3 * std::max(1.0, std::abs(lower));
  Eigen::SparseMatrix<double> shifted = K;
  for (int i = 0; i < n; ++i) shifted.coeffRef(i, i) -= sigma * mu[i];
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(shifted);
  if (ldlt.info() != Eigen::Success) throw std::runtime_error("eigenvalue shift factorization failed");

  Eigen::VectorXd u = Eigen::VectorXd::Ones(n);
  u /= std::sqrt(u.dot(mu.asDiagonal() * u));
  double prev = kInf;
  for (int it = 0; it < 20000; ++it) {
    Eigen::VectorXd w = ldlt.solve(mu.asDiagonal() * u);
    w /= std::sqrt(w.dot(mu.asDiagonal() * w));
    double lam = w.dot(K * w) / w.dot(mu.asDiagonal() * w);
    u = w;
    res.iterations = it + 1;
    if (std::abs(lam - prev) <= 1e-12 * std::max(1.0, std::abs(lam))) {
      res.converged = true;
      prev = lam;
      break;
    }
    prev = lam;
  }
  res.lambda1 = prev;
  if (u.sum() < 0) u = -u;
  u /= u.cwiseAbs().maxCoeff();
  res.eigenvector.assign(u.data(), u.data() + n);
  return res;
}

bool is_coercive(const SchrodingerOperator& op, double lambda) {
  return principal_eigenvalue(op).lambda1 > lambda;
}

struct DirichletSolver::Impl {
  std::vector<int> domain;
  std::vector<int> local;
  std::vector<double> mu;  // local
  double lambda = 0.0;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  int n = 0;
};

DirichletSolver::DirichletSolver(const SchrodingerOperator& op, std::vector<int> domain, double lambda)
    : impl_(std::make_unique<Impl>()) {
  std::sort(domain.begin(), domain.end());
  domain.erase(std::unique(domain.begin(), domain.end()), domain.end());
  check_sorted_domain(op.graph, domain);
  impl_->n = op.size();
  impl_->domain = std::move(domain);
  impl_->local = local_index(op.size(), impl_->domain);
  impl_->lambda = lambda;
  impl_->mu.resize(impl_->domain.size());
  for (size_t i = 0; i < impl_->domain.size(); ++i) impl_->mu[i] = op.mu(impl_->domain[i]);
  Eigen::SparseMatrix<double> K = assemble(op, impl_->domain, impl_->local, lambda);
  impl_->ldlt.compute(K);
  if (impl_->ldlt.info() != Eigen::Success)
    throw std::runtime_error("factorization failed; operator is not coercive on the domain");
}

DirichletSolver::~DirichletSolver() = default;
DirichletSolver::DirichletSolver(DirichletSolver&&) noexcept = default;
DirichletSolver& DirichletSolver::operator=(DirichletSolver&&) noexcept = default;

const std::vector<int>& DirichletSolver::domain() const { return impl_->domain; }
double DirichletSolver::lambda() const { return impl_->lambda; }

std::vector<double> DirichletSolver::solve(const std::vector<double>& rhs) const {
  if (static_cast<int>(rhs.size()) != impl_->n) throw std::invalid_argument("size mismatch");
  Eigen::VectorXd b(impl_->domain.size());
  for (size_t i = 0; i < impl_->domain.size(); ++i) b[i] = rhs[impl_->domain[i]];
  Eigen::VectorXd x = impl_->ldlt.solve(b);
  std::vector<double> out(impl_->n, 0.0);
  for (size_t i = 0; i < impl_->domain.size(); ++i) out[impl_->domain[i]] = x[i];
  return out;
}

std::vector<double> DirichletSolver::apply_green(const std::vector<double>& f) const {
  if (static_cast<int>(f.size()) != impl_->n) throw std::invalid_argument("size mismatch");
  std::vector<double> rhs(impl_->n, 0.0);
  for (size_t i = 0; i < impl_->domain.size(); ++i) {
    int x = impl_->domain[i];
    rhs[x] = f[x] * impl_->mu[i];
  }
  return solve(rhs);
}

std::vector<double> DirichletSolver::green_column(int pole) const {
  if (pole < 0 || pole >= impl_->n || impl_->local[pole] < 0)
    throw std::invalid_argument("pole must lie in the domain");
  std::vector<double> rhs(impl_->n, 0.0);
  rhs[pole] = 1.0;
  return solve(rhs);
}

GreenTable green_dirichlet(const SchrodingerOperator& op, const std::vector<int>& domain, int pole,
                           double lambda) {
  DirichletSolver solver(op, domain, lambda);
  GreenTable table;
  table.domain = solver.domain();
  table.pole = pole;
  table.lambda_shift = lambda;
  table.values = solver.green_column(pole);
  return table;
}

GreenTable green_global(const SchrodingerOperator& op, int pole, double lambda, double tol,
                        double start_radius) {
  if (start_radius <= 0.0) throw std::invalid_argument("start radius must be positive");
  std::vector<int> window = op.graph.ball(pole, start_radius / 2.0);
  double ecc = op.graph.eccentricity(pole);

  GreenTable table;
  table.pole = pole;
  table.lambda_shift = lambda;
  std::vector<double> prev;
  double radius = start_radius;
  for (;;) {
    std::vector<int> domain = op.graph.ball(pole, radius);
    GreenTable cur = green_dirichlet(op, domain, pole, lambda);
    double diff = 0.0;
    if (!prev.empty())
      for (int v : window) diff = std::max(diff, std::abs(cur.values[v] - prev[v]));
    bool whole = static_cast<int>(domain.size()) == op.graph.vertex_count();
    table.domain = std::move(cur.domain);
    table.values = cur.values;
    table.residual = prev.empty() ? kInf : diff;
    if (whole || (!prev.empty() && diff < tol)) {
      table.converged = true;
      if (whole && prev.empty()) table.residual = 0.0;
      return table;
    }
    prev = std::move(cur.values);
    if (radius > ecc + 2.0) {
      table.converged = false;  // should be unreachable: the ball saturates first
      return table;
    }
    radius += 2.0;
  }
}

std::vector<double> resolvent_apply(const SchrodingerOperator& op, const std::vector<int>& domain,
                                    double lambda, const std::vector<double>& f) {
  DirichletSolver solver(op, domain, lambda);
  return solver.apply_green(f);
}

ResolventCheck check_resolvent_equation(const SchrodingerOperator& op, const std::vector<int>& domain,
                                        double lambda_a, double lambda_b) {
  std::vector<int> dom = domain;
  std::sort(dom.begin(), dom.end());
  check_sorted_domain(op.graph, dom);
  if (dom.size() > 2000) throw std::invalid_argument("dense resolvent check limited to 2000 vertices");
  int m = static_cast<int>(dom.size());
  std::vector<int> local = local_index(op.size(), dom);
  Eigen::MatrixXd Ka = Eigen::MatrixXd(assemble(op, dom, local, lambda_a));
  Eigen::MatrixXd Kb = Eigen::MatrixXd(assemble(op, dom, local, lambda_b));
  Eigen::VectorXd mu(m);
  for (int i = 0; i < m; ++i) mu[i] = op.mu(dom[i]);
  Eigen::MatrixXd Ra = Ka.ldlt().solve(Eigen::MatrixXd(mu.asDiagonal()));
  Eigen::MatrixXd Rb = Kb.ldlt().solve(Eigen::MatrixXd(mu.asDiagonal()));

  ResolventCheck out;
  Eigen::MatrixXd lhs = Ra - Rb;
  Eigen::MatrixXd rhs = (lambda_a - lambda_b) * (Ra * Rb);
  out.equation_residual = (lhs - rhs).cwiseAbs().maxCoeff();
  out.min_entry = std::min(Ra.minCoeff(), Rb.minCoeff());
  out.positive = out.min_entry > -1e-12;
  const Eigen::MatrixXd& big = lambda_a >= lambda_b ? Ra : Rb;
  const Eigen::MatrixXd& small = lambda_a >= lambda_b ? Rb : Ra;
  out.monotone = (big - small).minCoeff() > -1e-12;
  return out;
}

std::vector<double> dirichlet_solve(const SchrodingerOperator& op, const std::vector<int>& omega,
                                    const std::vector<int>& boundary,
                                    const std::vector<double>& boundary_values,
                                    const std::vector<double>& rhs, SolveMode mode) {
  std::vector<int> om = omega;
  std::sort(om.begin(), om.end());
  check_sorted_domain(op.graph, om);
  std::vector<int> bd = boundary;
  std::sort(bd.begin(), bd.end());
  if (!is_subset(bd, om)) throw std::invalid_argument("boundary must lie inside the domain");
  if (boundary_values.size() != bd.size()) throw std::invalid_argument("one value per boundary vertex");
  if (static_cast<int>(rhs.size()) != op.size()) throw std::invalid_argument("size mismatch");

  std::vector<double> f(op.size(), 0.0);
  for (size_t i = 0; i < bd.size(); ++i) f[bd[i]] = boundary_values[i];

  std::vector<int> interior;
  std::set_difference(om.begin(), om.end(), bd.begin(), bd.end(), std::back_inserter(interior));
  if (interior.empty()) return f;

  std::vector<char> in_bd(op.size(), 0);
  for (int b : bd) in_bd[b] = 1;
  // mu rhs on the interior plus the coupling through prescribed neighbors.
  std::vector<double> b_vec(op.size(), 0.0);
  for (int x : interior) {
    double acc = rhs[x] * op.mu(x);
    for (const auto& arc : op.graph.neighbors(x))
      if (in_bd[arc.to]) acc += op.conductance[arc.edge] * f[arc.to];
    b_vec[x] = acc;
  }

  std::vector<double> u_int;
  if (mode == SolveMode::direct) {
    DirichletSolver solver(op, interior);
    u_int = solver.solve(b_vec);
  } else {
    SchrodingerOperator free(op.graph, op.conductance, std::vector<double>(op.size(), 0.0));
    DirichletSolver solver0(free, interior);
    // Contraction bound for u -> G0 (|V| mu u).
    std::vector<double> t(op.size(), 0.0);
    for (int x : interior) t[x] = 1.0;
    double rho = 0.0;
    for (int it = 0; it < 60; ++it) {
      std::vector<double> w(op.size(), 0.0);
      for (int x : interior) w[x] = std::abs(op.potential[x]) * op.mu(x) * t[x];
      std::vector<double> nt = solver0.solve(w);
      double num = 0.0, den = 0.0;
      for (int x : interior) {
        num = std::max(num, std::abs(nt[x]));
        den = std::max(den, std::abs(t[x]));
      }
      if (den == 0.0) break;
      rho = num / den;
      double scale = num > 0.0 ? 1.0 / num : 1.0;
      for (int x : interior) nt[x] *= scale;
      t = std::move(nt);
    }
    if (rho >= 1.0 - 1e-9)
      throw std::runtime_error("potential too large for the iterated splitting (factor " +
                               std::to_string(rho) + ")");
    std::vector<double> u(op.size(), 0.0);
    double change = kInf;
    for (int it = 0; it < 100000 && change > 1e-13; ++it) {
      std::vector<double> w(op.size(), 0.0);
      for (int x : interior) w[x] = b_vec[x] - op.potential[x] * op.mu(x) * u[x];
      std::vector<double> nu = solver0.solve(w);
      change = 0.0;
      for (int x : interior) change = std::max(change, std::abs(nu[x] - u[x]));
      u = std::move(nu);
    }
    if (change > 1e-13) throw std::runtime_error("iterated solve did not converge");
    u_int = std::move(u);
  }
  for (int x : interior) f[x] = u_int[x];
  return f;
}

NeumannReport neumann_series_green(const SchrodingerOperator& op, const std::vector<int>& domain,
                                   int pole, double term_tol, int max_terms) {
  std::vector<int> dom = domain;
  std::sort(dom.begin(), dom.end());
  check_sorted_domain(op.graph, dom);
  SchrodingerOperator free(op.graph, op.conductance, std::vector<double>(op.size(), 0.0));
  DirichletSolver solver0(free, dom);

  NeumannReport rep;
  std::vector<double> abs_v(op.size(), 0.0);
  for (int v : dom) abs_v[v] = std::abs(op.potential[v]);
  std::vector<double> pot = solver0.apply_green(abs_v);
  for (int v : dom) rep.precondition_value = std::max(rep.precondition_value, pot[v]);
  rep.precondition_ok = rep.precondition_value < 0.5;
  rep.green.domain = dom;
  rep.green.pole = pole;
  if (!rep.precondition_ok) {
    rep.green.converged = false;
    return rep;
  }

  std::vector<double> term = solver0.green_column(pole);
  std::vector<double> total = term;
  rep.terms = 1;
  for (int i = 1; i <= max_terms; ++i) {
    std::vector<double> w(op.size(), 0.0);
    for (int v : dom) w[v] = op.potential[v] * op.mu(v) * term[v];
    std::vector<double> next = solver0.solve(w);
    for (double& x : next) x = -x;
    double norm = 0.0;
    for (int v : dom) {
      total[v] += next[v];
      norm = std::max(norm, std::abs(next[v]));
    }
    term = std::move(next);
    rep.terms = i + 1;
    rep.last_term_norm = norm;
    if (norm < term_tol) break;
  }
  rep.green.values = std::move(total);
  rep.green.converged = rep.last_term_norm < term_tol;
  return rep;
}

SchrodingerOperator h_transform(const SchrodingerOperator& op, const std::vector<double>& h) {
  if (static_cast<int>(h.size()) != op.size()) throw std::invalid_argument("size mismatch");
  for (double v : h)
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("transform function must be positive");
  const auto& edges = op.graph.edges();
  std::vector<double> w(edges.size());
  for (size_t k = 0; k < edges.size(); ++k) w[k] = op.conductance[k] * h[edges[k].u] * h[edges[k].v];
  std::vector<double> mu(op.size());
  for (int x = 0; x < op.size(); ++x) mu[x] = h[x] * h[x] * op.mu(x);
  std::vector<double> lh = op.apply(h);
  std::vector<double> v(op.size());
  for (int x = 0; x < op.size(); ++x) v[x] = lh[x] / h[x];
  MetricGraph g(op.graph.vertex_count(), op.graph.edges(), std::move(mu));
  return SchrodingerOperator(std::move(g), std::move(w), std::move(v));
}

double harnack_constant(const SchrodingerOperator& op, int center, double r, std::uint64_t seed,
                        int n_random) {
  if (!(r > 0.0)) throw std::invalid_argument("radius must be positive");
  const MetricGraph& g = op.graph;
  std::vector<int> inner = g.ball(center, r);
  std::vector<int> b2 = g.ball(center, 2.0 * r);
  std::vector<int> bd = inner_boundary(g, b2);
  std::vector<int> interior;
  std::set_difference(b2.begin(), b2.end(), bd.begin(), bd.end(), std::back_inserter(interior));
  for (int v : inner)
    if (!std::binary_search(interior.begin(), interior.end(), v))
      throw std::invalid_argument("inner ball touches the boundary of the double ball");

  double best = 1.0;
  auto absorb = [&](const std::vector<double>& u) {
    double lo = kInf, hi = 0.0;
    for (int v : inner) {
      lo = std::min(lo, u[v]);
      hi = std::max(hi, u[v]);
    }
    if (!(lo > 0.0)) {
      best = kInf;
      return;
    }
    best = std::max(best, hi / lo);
  };

  // Green columns with poles between 2r and 4r.
  std::vector<int> big = g.ball(center, 4.0 * r);
  std::vector<double> dist = g.distances_from(center);
  std::vector<int> poles;
  for (int v : big)
    if (dist[v] > 2.0 * r) poles.push_back(v);
  std::uint64_t state = seed;
  if (static_cast<int>(poles.size()) > n_random) {
    std::vector<int> picked;
    std::vector<int> pool = poles;
    for (int i = 0; i < n_random; ++i) {
      size_t j = i + splitmix(state) % (pool.size() - i);
      std::swap(pool[i], pool[j]);
      picked.push_back(pool[i]);
    }
    std::sort(picked.begin(), picked.end());
    poles = std::move(picked);
  }
  if (!poles.empty()) {
    DirichletSolver solver(op, big);
    for (int pole : poles) absorb(solver.green_column(pole));
  }

  // Dirichlet extensions of boundary data, including every extreme indicator
  // when the boundary is small.
  std::vector<double> zero(op.size(), 0.0);
  if (static_cast<int>(bd.size()) <= 64) {
    for (size_t i = 0; i < bd.size(); ++i) {
      std::vector<double> data(bd.size(), 0.0);
      data[i] = 1.0;
      absorb(dirichlet_solve(op, b2, bd, data, zero));
    }
  }
  for (int k = 0; k < n_random; ++k) {
    std::vector<double> data(bd.size());
    bool flat = true;
    for (double& x : data) {
      x = static_cast<double>(splitmix(state) >> 11) * 0x1.0p-53;
      flat = flat && x == data[0];
    }
    if (flat) continue;
    absorb(dirichlet_solve(op, b2, bd, data, zero));
  }
  return best;
}

}  // namespace hyperpot
