#pragma once

#include <array>
#include <utility>
#include <vector>

#include "hyperpot/hyperbolic.hpp"
#include "hyperpot/schrodinger.hpp"

namespace hyperpot {

// Empirical constants are reported rather than tested against closed-form
// bounds: the sharp constants depend on geometry data that is not explicit.
// Acceptance is stability across scales plus the explicit cross-relations
// (product bound for the boundary Harnack constant, shift inequalities).

struct ThreeGReport {
  std::vector<int> middle_indices;  // positions into chain.track (0-based)
  std::vector<double> ratios;       // rho_j = G(x_m,x_1) / (mu(B_sigma(x_j)) G(x_m,x_j) G(x_j,x_1))
  std::vector<double> separations;  // min distance of x_j to either chain end
  double c_lower = 0.0;             // min ratio
  double c_upper = 0.0;             // max ratio
  double c_emp = 0.0;               // max(1/c_lower, c_upper)
};

// Three-term Green comparison along the chain track. min_separation > 0
// restricts the middle points to those at least that far from both ends.
ThreeGReport check_3g(const SchrodingerOperator& op, const std::vector<int>& domain,
                      const PhiChain& chain, double sigma, double min_separation = 0.0,
                      double lambda = 0.0);

struct GrowthRecoveryReport {
  std::vector<double> per_link_max;  // max ratio over the boundary of U_{j+1}, j = 1..m-1
  double overall_max = 0.0;
  double flatness = 0.0;  // overall_max / per_link_max.front()
  bool flat = false;      // within factor 1.5 of the first link
};

// Growth recovery across chain links: for z on the boundary of U_{j+1} the
// value G(z, x_1) is compared against mu(B_sigma(x_j)) G_shift(z, x_j)
// G(x_{j+1}, x_1), where op_shifted is a strictly less coercive operator
// (larger Green function). The per-link maxima should be flat in j.
GrowthRecoveryReport check_growth_recovery(const SchrodingerOperator& op,
                                           const SchrodingerOperator& op_shifted,
                                           const std::vector<int>& domain, const PhiChain& chain,
                                           double sigma);

struct DecayFit {
  double alpha2 = 0.0;  // slope of -ln G against distance
  double ln_b = 0.0;
  double r2 = 0.0;
  double alpha1 = 0.0;  // slope of -ln(G / G_shift) against distance
  double ln_a = 0.0;
  double r2_ratio = 0.0;
  int pairs_used = 0;
};

// Least-squares fit of ln G(x,y) against d(x,y) on the sampled pairs (only
// pairs with d > 2 sigma are used; fewer than 10 such pairs is an input
// error). The ratio fit against the shifted Green gives alpha1 >= 0.
DecayFit check_exponential_decay(const SchrodingerOperator& op,
                                 const SchrodingerOperator& op_shifted,
                                 const std::vector<int>& domain,
                                 const std::vector<std::pair<int, int>>& pairs, double sigma);

struct MaxPrincipleReport {
  double eta = 0.0;            // per-step contraction (u(x)/u_bar(x))^(1/r)
  double boundary_ratio = 0.0; // scaling applied to the shifted Green
  bool ok = false;             // eta < 1
};

// Relative maximum principle: u = G(., pole) against the eps-shifted Green
// scaled to dominate u on the sphere of radius r around x (the minimum
// boundary ratio of G_shift/u is divided out). eta >= 1 is a failure report,
// not an exception.
MaxPrincipleReport check_relative_max_principle(const SchrodingerOperator& op,
                                                const std::vector<int>& domain, double eps, int x,
                                                double r, int pole, double sigma = 1.0);

struct BoundaryHarnackReport {
  double hb = 0.0;  // max over x,y in the inner set of u(x)v(y)/(u(y)v(x))
  int inner_size = 0;
};

// Boundary Harnack quotient bound on nested neighborhood sets: u = G(., p1)
// and v = G(., p2) with both poles outside the outer set; the double ratio is
// maximized over the inner set. The cross-relation hb <= c_3g^4 is checked by
// the caller against check_3g on the same geometry.
BoundaryHarnackReport check_boundary_harnack(const SchrodingerOperator& op,
                                             const std::vector<int>& domain,
                                             const std::vector<int>& outer,
                                             const std::vector<int>& inner, int pole1, int pole2,
                                             double lambda = 0.0);

struct GreenMetricReport {
  double max_aligned_defect = 0.0;   // max |d_G(x,z) - d_G(x,y) - d_G(y,z)|, y on geodesic(x,z)
  double max_triangle_excess = 0.0;  // max d_G(x,z) - d_G(x,y) - d_G(y,z), general triples
  int aligned_used = 0;
  int general_used = 0;
};

// Logarithmic Green metric d_G(x,y) = -ln(G(x,y) sqrt(mu(B_sigma(x))
// mu(B_sigma(y)))): near-additivity along geodesics and the rough triangle
// inequality. The defects should stay below ln of the empirical 3G constant.
GreenMetricReport green_metric_check(const SchrodingerOperator& op, const std::vector<int>& domain,
                                     double sigma,
                                     const std::vector<std::array<int, 3>>& aligned_triples,
                                     const std::vector<std::array<int, 3>>& general_triples);

}  // namespace hyperpot
