#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hyperpot/metric_graph.hpp"

namespace hyperpot {

// (x|y)_z = (d(z,x) + d(z,y) - d(x,y)) / 2.
double gromov_product(const MetricGraph& g, int x, int y, int base);

// Four-point hyperbolicity defect: max over quadruples (x,y,z,w) of
// min{(x|w)_z, (w|y)_z} - (x|y)_z, clamped at 0. Exhaustive scans all ordered
// quadruples and is limited to 60 vertices; the sampled variant draws seeded
// quadruples from a distance pool (the whole graph when it fits pool_cap).
double delta_four_point_exhaustive(const MetricGraph& g);
double delta_four_point_sampled(const MetricGraph& g, long long n_quadruples, std::uint64_t seed,
                                int pool_cap = 1024);

// Thin-triangle constant over sampled (or, with n_triangles <= 0, all) vertex
// triples: max over sides of sup distance from a side vertex to the union of
// the other two sides.
double delta_thin_triangles(const MetricGraph& g, long long n_triangles, std::uint64_t seed);

// Geodesic ray from a basepoint: consecutive vertices adjacent, distance from
// the base strictly increasing.
struct BoundaryRay {
  int base = 0;
  std::vector<int> vertices;  // starts at base
  int tip() const { return vertices.back(); }
};

BoundaryRay ray_to(const MetricGraph& g, int base, int target);
void validate_ray(const MetricGraph& g, const BoundaryRay& ray);

// Visual quasi-metric between ray tips: d_o(xi, eta) = exp(-(tip_xi|tip_eta)_o),
// zero on the diagonal. Rays must share the base and have depth >= 2.
std::vector<std::vector<double>> boundary_quasi_metric(const MetricGraph& g, int base,
                                                       const std::vector<BoundaryRay>& rays);

// Smallest Q with d(i,k) <= Q * max(d(i,j), d(j,k)) over distinct triples.
double quasi_ultrametric_constant(const std::vector<std::vector<double>>& d);

// Chain of nested vertex sets with track points. Sets may be empty for
// track-only chains (enough for the 3G harness); verify_phi_chain needs them.
struct PhiChain {
  std::vector<std::vector<int>> sets;  // U_1 superset U_2 superset ...
  std::vector<int> track;              // x_1..x_m
  double delta_eff = 0.5;
  double phi0 = 0.0;                   // min consecutive track distance
  int length() const { return static_cast<int>(track.size()); }
};

// Sublevel chain along the geodesic from a to b: U_i = {x : (x|b)_a > 4 i delta_eff}
// with track points on the geodesic at parameter 4 i delta_eff, delta_eff =
// max(delta, 1/2). Needs d(a,b) >= 8 delta_eff and at least 3 links.
PhiChain phi_chain_along_geodesic(const MetricGraph& g, int a, int b, double delta);

// Track-only chain through explicit waypoints (consecutive distances become phi0
// bounds); used for manual controls.
PhiChain track_chain(const MetricGraph& g, std::vector<int> track, double delta);

// Chain on explicit sets (caller-provided nesting), track points attached.
PhiChain set_chain(const MetricGraph& g, std::vector<std::vector<int>> sets, std::vector<int> track,
                   double delta);

// Complements in reverse order: W_j = X \ closure(U_{m+1-j}), reversed track.
PhiChain reverse_chain(const MetricGraph& g, const PhiChain& chain);

struct PhiChainReport {
  bool ok = false;
  double alpha = 0.0;  // fitted slope of Phi(t) = alpha t + beta
  double beta = 0.0;   // fitted margin, positive iff the chain verifies
  double phi0 = 0.0;
  double max_track_gap = 0.0;
  std::vector<std::string> violations;
};

// Checks nesting, track spacing phi0 <= d(x_i, x_{i+1}) <= 3 phi0, track points
// on set boundaries, and fits the steepest affine Phi with
// d(x, boundary(U_{i+-1})) >= Phi(d(x, x_i)) for boundary vertices x of U_i
// (alpha is half the critical slope, beta the residual margin).
PhiChainReport verify_phi_chain(const MetricGraph& g, const PhiChain& chain);

// Neighborhood basis along a ray: N_i = {x : (x|tip)_o > c i}, c = 4 delta_eff,
// i = 1..levels; hub of (N_i, N_{i+1}) is the ray vertex nearest parameter
// c (i + 1/2). Needs ray depth >= c * levels and nonempty N_levels.
struct PhiNeighborhoods {
  std::vector<std::vector<int>> sets;
  std::vector<int> hubs;  // size levels - 1
  double c_delta = 2.0;
  BoundaryRay ray;
};

PhiNeighborhoods phi_neighborhood_basis(const MetricGraph& g, int base, const BoundaryRay& ray,
                                        int levels, double delta);

// Supremum radius r with B_r(hub) inside N_i minus closure(N_{i+1}); negative
// when the hub itself is outside that gap.
double hub_gap_radius(const MetricGraph& g, const std::vector<int>& n_i, const std::vector<int>& n_ip1,
                      int hub);

}  // namespace hyperpot
