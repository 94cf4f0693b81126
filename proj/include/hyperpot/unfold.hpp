#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hyperpot/metric_graph.hpp"
#include "hyperpot/schrodinger.hpp"

namespace hyperpot {

// Axis-grid discretization of a planar domain. `dj` is the exact Euclidean
// distance to the domain boundary at each sample point; only points with
// dj > h/2 are kept, which also keeps the 4-neighbor graph away from the
// boundary. Specs: "disc", "square", "slit", "lshape", "cusp:<q>".
struct DomainSample {
  std::string spec;
  double h = 0.0;
  std::vector<std::array<double, 2>> points;
  std::vector<double> dj;
  MetricGraph base;  // 4-neighbor grid, Euclidean edge lengths, mu = h^2
};

DomainSample sample_domain(const std::string& spec, double h);

// Index of the sample point nearest to (x, y).
int nearest_sample(const DomainSample& ds, double x, double y);

// Same vertices, edge lengths h * (1/dj(x) + 1/dj(y)) / 2 (trapezoid rule for
// the conformal length integral), measure h^2 / dj^2.
MetricGraph quasi_hyperbolic_graph(const DomainSample& ds);

// Unit-conductance grid operator with the Dirichlet closure folded into the
// potential: every missing lattice neighbor contributes 1/h^2 at its vertex,
// so the energy is the zero-extension form. `v` adds on top (empty = zero).
SchrodingerOperator dirichlet_operator(const DomainSample& ds, std::vector<double> v = {});

struct UniformityReport {
  std::vector<double> pair_c;   // smallest c making both conditions hold, per pair
  double worst_c = 0.0;
  double uniform_fraction = 0.0;  // share of pairs with pair_c <= the given c
};

// Tests the uniform-domain conditions along quasi-hyperbolic geodesics: the
// curve is at most c times the endpoint distance, and each curve point has
// boundary clearance at least min(arclength to either end) / c.
UniformityReport check_uniformity(const DomainSample& ds,
                                  const std::vector<std::pair<int, int>>& pairs, double c);

struct HyperbolicityReport {
  double delta_coarse = 0.0;  // at the sample's h
  double delta_fine = 0.0;    // at h/2
  double ratio = 0.0;         // fine / coarse
};

// Sampled four-point constant of the unfolding at two resolutions. Stable
// ratios indicate a hyperbolic unfolding; growth flags a non-uniform domain.
HyperbolicityReport check_unfolding_hyperbolic(const DomainSample& ds, long long samples = 4000,
                                               std::uint64_t seed = 1);

// Smallest lambda with E(u,u) >= lambda * sum u(x)^2 dj(x)^-2 mu(x), by
// inverse iteration on the generalized pencil. dj must be positive.
double hardy_constant(const SchrodingerOperator& op, const std::vector<double>& dj,
                      double tol = 1e-9);
inline double hardy_constant(const SchrodingerOperator& op, const DomainSample& ds,
                             double tol = 1e-9) {
  return hardy_constant(op, ds.dj, tol);
}

struct UnfoldedOperator {
  SchrodingerOperator op;        // on the quasi-hyperbolic graph, measure dj^-n mu
  std::vector<double> transfer;  // dj^((n-2)/2): u base-harmonic iff transfer*u unfold-harmonic
  double max_v_dsq = 0.0;        // sup |V| dj^2, the form-boundedness certificate
  bool v_bounded = true;
};

// Ground-state-style transform of the base operator onto the unfolding: the
// energy form is preserved under u -> dj^-((n-2)/2) u, so the spectrum of the
// pencil against the Hardy mass is unchanged. For n = 2 the conductances are
// untouched and only measure and potential are reweighted.
UnfoldedOperator unfold_operator(const SchrodingerOperator& op, const DomainSample& ds,
                                 double n_dim = 2.0, double v_cap = 1e6);

}  // namespace hyperpot
