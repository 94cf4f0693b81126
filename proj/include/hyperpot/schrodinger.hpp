#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "hyperpot/metric_graph.hpp"

namespace hyperpot {

// Weighted operator (Lu)(x) = (1/mu(x)) sum_y w_xy (u(x) - u(y)) + V(x) u(x).
// Conductances are stored per edge, parallel to graph.edges(); the builders
// and file loader default them to one per edge.
struct SchrodingerOperator {
  MetricGraph graph;
  std::vector<double> conductance;
  std::vector<double> potential;

  SchrodingerOperator(MetricGraph g, std::vector<double> w, std::vector<double> v);

  int size() const { return graph.vertex_count(); }
  double mu(int v) const { return graph.mu(v); }

  // sum_y w_xy over the arcs at x.
  double conductance_sum(int x) const;

  std::vector<double> apply(const std::vector<double>& u) const;

  // E(u) = sum_edges w (u(x)-u(y))^2 + sum_x V u^2 mu.
  double energy(const std::vector<double>& u) const;

  // Same operator with V replaced by V - lambda.
  SchrodingerOperator shifted(double lambda) const;
};

SchrodingerOperator laplacian(const MetricGraph& g);
SchrodingerOperator schrodinger(const MetricGraph& g, std::vector<double> v);

struct EigenResult {
  double lambda1 = 0.0;
  std::vector<double> eigenvector;  // positive, normalized to max 1
  int iterations = 0;
  bool converged = false;
};

// Smallest eigenvalue of K u = lambda M u where K is the matrix of the energy
// form and M = diag(mu). Dense solve below 200 vertices, otherwise
// shift-inverted power iteration from a Gershgorin bound.
EigenResult principal_eigenvalue(const SchrodingerOperator& op);

double rayleigh(const SchrodingerOperator& op, const std::vector<double>& u);

// lambda_1 > lambda, the standing assumption behind every inversion here.
bool is_coercive(const SchrodingerOperator& op, double lambda);

// Positive-definite solver for the operator restricted to a vertex subset with
// zero Dirichlet condition outside. Factorizes once, solves many times.
class DirichletSolver {
 public:
  DirichletSolver(const SchrodingerOperator& op, std::vector<int> domain, double lambda = 0.0);
  ~DirichletSolver();
  DirichletSolver(DirichletSolver&&) noexcept;
  DirichletSolver& operator=(DirichletSolver&&) noexcept;

  const std::vector<int>& domain() const;
  double lambda() const;

  // Solves (K - lambda M) u = rhs with rhs given pointwise on the whole graph
  // (entries off the domain ignored). Returns a whole-graph vector, zero off
  // the domain.
  std::vector<double> solve(const std::vector<double>& rhs) const;

  // u with (L - lambda) u = f on the domain, i.e. u = K^{-1} (M f).
  std::vector<double> apply_green(const std::vector<double>& f) const;

  // Column y -> G(., y) of the Green function, normalized so that
  // (K - lambda M) G(., y) = e_y. Then (Gf)(x) = sum_y G(x,y) f(y) mu(y).
  std::vector<double> green_column(int pole) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct GreenTable {
  std::vector<int> domain;      // sorted vertex ids the table was solved on
  int pole = -1;
  std::vector<double> values;   // whole-graph vector, zero off the domain
  double lambda_shift = 0.0;
  bool converged = true;        // exhaustion stabilized (always true for the direct solve)
  double residual = 0.0;        // sup-norm change in the last exhaustion step
};

GreenTable green_dirichlet(const SchrodingerOperator& op, const std::vector<int>& domain, int pole,
                           double lambda = 0.0);

// Green function of the whole graph obtained by exhausting with balls around
// the pole. Radii grow by 2 per step; values increase monotonically and the
// iteration stops once the sup change on the ball of the starting radius
// drops below tol, or the exhaustion reaches the whole graph.
GreenTable green_global(const SchrodingerOperator& op, int pole, double lambda = 0.0,
                        double tol = 1e-8, double start_radius = 4.0);

// (L - lambda)^{-1} f on the domain.
std::vector<double> resolvent_apply(const SchrodingerOperator& op, const std::vector<int>& domain,
                                    double lambda, const std::vector<double>& f);

struct ResolventCheck {
  double equation_residual = 0.0;  // sup |R_a - R_b - (a-b) R_a R_b|
  bool positive = false;           // all entries of both resolvents nonnegative
  bool monotone = false;           // R_a >= R_b entrywise for a >= b
  double min_entry = 0.0;
};

// Dense verification of the resolvent identity on a subset; both shifts must
// stay below the principal eigenvalue of the restriction.
ResolventCheck check_resolvent_equation(const SchrodingerOperator& op, const std::vector<int>& domain,
                                        double lambda_a, double lambda_b);

enum class SolveMode { direct, iterated };

// Boundary value problem on omega: boundary is a subset of omega carrying
// prescribed values, rhs is the source on the interior. The iterated mode
// splits off the potential part and runs the fixed point
// u_{k+1} = G0 (mu rhs - V mu u_k) + harmonic lift, failing if the potential
// is too large for contraction.
std::vector<double> dirichlet_solve(const SchrodingerOperator& op, const std::vector<int>& omega,
                                    const std::vector<int>& boundary,
                                    const std::vector<double>& boundary_values,
                                    const std::vector<double>& rhs, SolveMode mode = SolveMode::direct);

struct NeumannReport {
  GreenTable green;
  int terms = 0;
  double last_term_norm = 0.0;
  bool precondition_ok = false;
  double precondition_value = 0.0;  // sup of G0 |V| over the domain
};

// Green column of L0 + V assembled as the alternating series
// sum_i (-1)^i G0 (V mu G0)^i e_pole. Requires the Green potential of |V|
// to stay below 1/2 on the domain.
NeumannReport neumann_series_green(const SchrodingerOperator& op, const std::vector<int>& domain,
                                   int pole, double term_tol = 1e-12, int max_terms = 200);

// Ground state transform: w' = w h(x) h(y), mu' = h^2 mu, V' = (Lh)/h.
// Maps u to u/h isometrically on energies.
SchrodingerOperator h_transform(const SchrodingerOperator& op, const std::vector<double>& h);

// Empirical Harnack constant on B_r(center): the largest ratio
// max_{B_r} u / min_{B_r} u over a family of positive functions harmonic on
// B_2r(center). Candidates are Green columns with poles outside B_2r and
// Dirichlet extensions of random boundary data; when the boundary is small
// every single-vertex indicator is included, which covers the extreme points
// of the cone.
double harnack_constant(const SchrodingerOperator& op, int center, double r, std::uint64_t seed,
                        int n_random = 32);

}  // namespace hyperpot
