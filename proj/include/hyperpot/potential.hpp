#pragma once

#include <cstdint>
#include <vector>

#include "hyperpot/schrodinger.hpp"

namespace hyperpot {

struct ReduitResult {
  std::vector<double> values;  // whole-graph vector, zero off the domain
  std::vector<int> contact;    // vertices where the obstacle constraint is active
  int sweeps = 0;
  bool converged = false;
  double residual = 0.0;  // sup-norm change in the last sweep
};

// Smallest nonnegative supersolution of (L - lambda) on `domain` (with zero
// values outside) that dominates `obstacle` on `active`.  The obstacle must be
// nonnegative and superharmonic on the domain; this is checked and violations
// are an input error, because the classical identities (equality on the active
// set, additivity) only hold in that class.
//
// Solved by projected Gauss-Seidel sweeps in ascending vertex order, warm
// started from the harmonic extension of the obstacle off the active set.
ReduitResult reduit(const SchrodingerOperator& op, const std::vector<int>& domain,
                    const std::vector<int>& active, const std::vector<double>& obstacle,
                    double lambda = 0.0, double tol = 1e-10, int max_sweeps = 10000);

struct ReduitPropertiesReport {
  double max_harmonic_residual = 0.0;    // |(L-lambda) R_u| off the closed active set
  double max_equality_gap = 0.0;         // |R_u - u| on the active set
  double max_scaling_gap = 0.0;          // |R_{c u} - c R_u|
  double max_additivity_gap = 0.0;       // |R_{u+v} - R_u - R_v|
  double min_subadditivity_margin = 0.0; // min over the domain of R^A_u + R^B_u - R^{A u B}_u
  double max_symmetry_gap = 0.0;         // |R^A_{G(.,y)}(x) - R^A_{G(.,x)}(y)|
  bool ok = false;
};

// Randomized self-check of the reduit calculus on a fixed domain.  Obstacles
// are positive combinations of Green columns (hence superharmonic); the active
// sets are seeded random subsets.  Gaps are reported relative to the obstacle
// scale; ok means every gap is within tol.
ReduitPropertiesReport reduit_properties_check(const SchrodingerOperator& op,
                                               const std::vector<int>& domain, std::uint64_t seed,
                                               double tol = 1e-8, double lambda = 0.0);

struct MartinKernel {
  int base = -1;
  int pole = -1;
  std::vector<double> values;  // whole-graph vector, zero off the domain
};

// K(x) = G(x, pole) / G(base, pole): positive on the domain, exactly 1 at the
// base, harmonic away from the pole.
MartinKernel martin_kernel(const SchrodingerOperator& op, const std::vector<int>& domain, int pole,
                           int base, double lambda = 0.0);

struct MartinConvergenceReport {
  std::vector<int> poles;         // ray vertices used, one per requested depth
  std::vector<double> sup_diffs;  // successive sup-differences over the window
  bool monotone = false;          // sup_diffs non-increasing
  bool cauchy = false;            // monotone and final difference below tol
  double final_diff = 0.0;
  MartinKernel limit;  // kernel at the deepest pole
};

// Kernels normalized at `base` with poles taken on `ray` at the given depths;
// successive kernels are compared in sup norm over the ball of radius
// window_radius around the base.  A non-monotone difference sequence is
// reported, not fatal.
MartinConvergenceReport martin_convergence(const SchrodingerOperator& op,
                                           const std::vector<int>& domain,
                                           const std::vector<int>& ray,
                                           const std::vector<double>& depths, int base,
                                           double window_radius, double tol = 1e-3,
                                           double lambda = 0.0);

struct VanishingReport {
  std::vector<int> radii;
  std::vector<double> scores;  // greatest-harmonic-minorant value at the base, per radius
  double score = 0.0;          // last entry of scores, normalized by u(base)
  bool vanishing = false;
};

// Tests whether u goes to zero "through" v_set in the potential-theoretic
// sense: for each exhaustion radius R the obstacle u is swept onto
// v_set intersected with B_R(base), and the greatest harmonic minorant of the
// sweep is extracted by a decreasing Dirichlet iteration on B_R.  u vanishes
// on v_set when the minorant values at the base stay below vanish_tol times
// u(base); the sweeps concentrate near the exhaustion rim exactly when u
// carries mass in the directions v_set reaches.
VanishingReport l_vanishing_test(const SchrodingerOperator& op, const std::vector<int>& domain,
                                 int base, const std::vector<double>& u,
                                 const std::vector<int>& v_set, const std::vector<int>& radii,
                                 double vanish_tol = 0.25, double lambda = 0.0);

struct TreeDecomposition {
  std::vector<int> leaves;      // pole vertices, ascending
  std::vector<double> weights;  // nonnegative, one per leaf
  double residual = 0.0;        // sup norm of u - sum_l w_l K_l over the domain
  bool ok = false;              // residual within tol
};

// Writes u as a nonnegative combination of the kernels with poles at the
// graph leaves inside the domain (degree-1 vertices).  Weights are found by
// nonnegative least squares; a residual above tol is reported as a failed
// decomposition, not an exception.
TreeDecomposition martin_decompose_tree(const SchrodingerOperator& op,
                                        const std::vector<int>& domain, int base,
                                        const std::vector<double>& u, double tol = 1e-6,
                                        double lambda = 0.0);

}  // namespace hyperpot
