#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "hyperpot/builders.hpp"
#include "hyperpot/hyperbolic.hpp"

using namespace hyperpot;

namespace {

MetricGraph cycle_graph(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 1.0});
  return MetricGraph(n, edges);
}

// Deepest common vertex of the root paths to two tree vertices.
int tree_leaf(const MetricGraph& t, int depth, int skip = 0) {
  int count = 0;
  for (int v = 0; v < t.vertex_count(); ++v)
    if (std::lround(t.distance(0, v)) == depth && t.degree(v) == 1) {
      if (count == skip) return v;
      ++count;
    }
  throw std::runtime_error("no such leaf");
}

}  // namespace

TEST_CASE("gromov product on a path measures distance to the segment") {
  MetricGraph p = path_graph(7);
  CHECK(gromov_product(p, 2, 4, 0) == doctest::Approx(2.0));
  CHECK(gromov_product(p, 0, 6, 3) == doctest::Approx(0.0));
  CHECK(gromov_product(p, 5, 5, 0) == doctest::Approx(5.0));
}

TEST_CASE("trees are exactly zero hyperbolic") {
  MetricGraph t = regular_tree(3, 3);
  CHECK(delta_four_point_exhaustive(t) == 0.0);
  CHECK(delta_four_point_sampled(t, 5000, 7) == 0.0);
  CHECK(delta_thin_triangles(t, 200, 11) == 0.0);
}

TEST_CASE("four point constant of a 4-cycle") {
  MetricGraph c = cycle_graph(4);
  CHECK(delta_four_point_exhaustive(c) == doctest::Approx(1.0));
}

TEST_CASE("sampling with a full pool finds the exhaustive maximum") {
  MetricGraph c = cycle_graph(12);
  double exact = delta_four_point_exhaustive(c);
  double sampled = delta_four_point_sampled(c, 20000, 3);
  CHECK(sampled == doctest::Approx(exact));
  CHECK(sampled <= exact + 1e-12);
}

TEST_CASE("thin triangle constant of a 12-cycle") {
  // Triangle {0, 6, 9}: vertex 3 sits three steps from both other sides.
  MetricGraph c = cycle_graph(12);
  CHECK(delta_thin_triangles(c, 0, 0) == doctest::Approx(3.0));
}

TEST_CASE("exhaustive guards reject big graphs") {
  MetricGraph t = regular_tree(3, 5);
  CHECK_THROWS_AS(delta_four_point_exhaustive(t), std::invalid_argument);
  CHECK_THROWS_AS(delta_thin_triangles(t, 0, 0), std::invalid_argument);
}

TEST_CASE("ray construction and validation") {
  MetricGraph t = regular_tree(3, 4);
  int leaf = tree_leaf(t, 4);
  BoundaryRay r = ray_to(t, 0, leaf);
  CHECK(r.vertices.size() == 5);
  CHECK(r.tip() == leaf);
  validate_ray(t, r);

  BoundaryRay broken = r;
  broken.vertices.push_back(r.vertices[1]);  // jumps backwards
  CHECK_THROWS_AS(validate_ray(t, broken), std::invalid_argument);

  BoundaryRay detached = r;
  detached.vertices[1] = leaf;  // not a neighbor of the base
  CHECK_THROWS_AS(validate_ray(t, detached), std::invalid_argument);
}

TEST_CASE("boundary quasi-metric on a tree is an ultrametric") {
  MetricGraph t = regular_tree(3, 3);
  // Three leaves: two sharing a depth-2 parent, one under another root child.
  int a = tree_leaf(t, 3, 0);
  int b = tree_leaf(t, 3, 1);
  int far = tree_leaf(t, 3, 4);  // leaves come in sibling pairs: skip 4 leaves
  std::vector<BoundaryRay> rays = {ray_to(t, 0, a), ray_to(t, 0, b), ray_to(t, 0, far)};
  auto d = boundary_quasi_metric(t, 0, rays);
  CHECK(d[0][0] == 0.0);
  CHECK(d[0][1] == doctest::Approx(std::exp(-2.0)));  // siblings meet at depth 2
  double meet_far = -std::log(d[0][2]);
  CHECK((meet_far == doctest::Approx(0.0) || meet_far == doctest::Approx(1.0)));
  CHECK(quasi_ultrametric_constant(d) == doctest::Approx(1.0));
}

TEST_CASE("quasi ultrametric constant flags violations") {
  std::vector<std::vector<double>> d = {
      {0.0, 0.25, 1.0}, {0.25, 0.0, 0.25}, {1.0, 0.25, 0.0}};
  CHECK(quasi_ultrametric_constant(d) == doctest::Approx(4.0));
}

TEST_CASE("chain on a path: sets, track and verification") {
  MetricGraph p = path_graph(30);
  PhiChain chain = phi_chain_along_geodesic(p, 0, 29, 0.0);
  CHECK(chain.delta_eff == 0.5);
  CHECK(chain.length() == 14);
  CHECK(chain.track.front() == 2);
  CHECK(chain.track.back() == 28);
  CHECK(chain.phi0 == doctest::Approx(2.0));
  // U_i = {v : v > 2i} on the path.
  CHECK(chain.sets[0].front() == 3);
  CHECK(chain.sets[13] == std::vector<int>{29});

  PhiChainReport rep = verify_phi_chain(p, chain);
  CHECK(rep.ok);
  CHECK(rep.alpha == doctest::Approx(1.0));
  CHECK(rep.beta == doctest::Approx(1.0));
  CHECK(rep.max_track_gap == doctest::Approx(2.0));
  CHECK(rep.violations.empty());
}

TEST_CASE("chain between two deep leaves of a tree verifies") {
  MetricGraph t = regular_tree(3, 8);
  int a = tree_leaf(t, 8, 0);
  int b = tree_leaf(t, 8, 300);  // far enough to meet at the root
  REQUIRE(t.distance(a, b) == doctest::Approx(16.0));
  PhiChain chain = phi_chain_along_geodesic(t, a, b, 0.0);
  CHECK(chain.length() == 7);  // threshold 16 would leave an empty innermost set
  PhiChainReport rep = verify_phi_chain(t, chain);
  CHECK(rep.ok);
  CHECK(rep.beta > 0.0);

  PhiChain rev = reverse_chain(t, chain);
  CHECK(rev.length() == 7);
  CHECK(rev.track.front() == chain.track.back());
  PhiChainReport rrep = verify_phi_chain(t, rev);
  CHECK(rrep.ok);
}

TEST_CASE("reversed path chain verifies") {
  MetricGraph p = path_graph(30);
  PhiChain chain = phi_chain_along_geodesic(p, 0, 29, 0.0);
  PhiChain rev = reverse_chain(p, chain);
  // W_1 is the complement of the closure of the innermost set.
  CHECK(rev.sets[0].back() == 27);
  PhiChainReport rep = verify_phi_chain(p, rev);
  CHECK(rep.ok);
}

TEST_CASE("chain construction rejects short geodesics") {
  MetricGraph p = path_graph(8);
  CHECK_THROWS_AS(phi_chain_along_geodesic(p, 0, 7, 1.0), std::invalid_argument);
}

TEST_CASE("verification reports broken chains") {
  MetricGraph p = path_graph(30);
  PhiChain chain = phi_chain_along_geodesic(p, 0, 29, 0.0);

  PhiChain swapped = set_chain(p, {chain.sets[1], chain.sets[0]}, {chain.track[1], chain.track[0]}, 0.0);
  PhiChainReport rep = verify_phi_chain(p, swapped);
  CHECK_FALSE(rep.ok);
  bool nesting = false;
  for (const auto& v : rep.violations) nesting = nesting || v.find("nested") != std::string::npos;
  CHECK(nesting);

  // Track point buried in the interior of its set.
  PhiChain off = set_chain(p, {chain.sets[0], chain.sets[1]}, {10, chain.track[1]}, 0.0);
  PhiChainReport rep2 = verify_phi_chain(p, off);
  CHECK_FALSE(rep2.ok);

  // Touching boundaries leave no positive margin.
  PhiChain tight = set_chain(p, {chain.sets[0], chain.sets[0]}, {chain.track[0], chain.track[0]}, 0.0);
  PhiChainReport rep3 = verify_phi_chain(p, tight);
  CHECK_FALSE(rep3.ok);
}

TEST_CASE("track-only chains cannot be verified or reversed") {
  MetricGraph p = path_graph(30);
  PhiChain chain = track_chain(p, {2, 4, 6}, 0.0);
  CHECK(chain.phi0 == doctest::Approx(2.0));
  PhiChainReport rep = verify_phi_chain(p, chain);
  CHECK_FALSE(rep.ok);
  CHECK_THROWS_AS(reverse_chain(p, chain), std::invalid_argument);
}

TEST_CASE("neighborhood basis along a tree ray") {
  MetricGraph t = regular_tree(3, 8);
  int leaf = tree_leaf(t, 8);
  BoundaryRay ray = ray_to(t, 0, leaf);
  PhiNeighborhoods basis = phi_neighborhood_basis(t, 0, ray, 3, 0.0);
  CHECK(basis.c_delta == doctest::Approx(2.0));
  REQUIRE(basis.sets.size() == 3);
  REQUIRE(basis.hubs.size() == 2);
  // N_i is the subtree hanging at ray depth 2i+1; hubs sit at depths 3 and 5.
  CHECK(std::lround(t.distance(0, basis.hubs[0])) == 3);
  CHECK(std::lround(t.distance(0, basis.hubs[1])) == 5);
  CHECK(is_subset(basis.sets[1], basis.sets[0]));
  CHECK(is_subset(basis.sets[2], basis.sets[1]));
  for (int v : basis.sets[0]) CHECK(gromov_product(t, v, leaf, 0) > 2.0);

  CHECK(hub_gap_radius(t, basis.sets[0], basis.sets[1], basis.hubs[0]) == doctest::Approx(1.0));
  CHECK(hub_gap_radius(t, basis.sets[0], basis.sets[1], basis.hubs[1]) < 0.0);  // hub outside the gap
}

TEST_CASE("doubling the scale widens the hub gap") {
  MetricGraph t = regular_tree(3, 12);
  int leaf = tree_leaf(t, 12);
  BoundaryRay ray = ray_to(t, 0, leaf);
  PhiNeighborhoods basis = phi_neighborhood_basis(t, 0, ray, 2, 1.0);
  CHECK(basis.c_delta == doctest::Approx(4.0));
  REQUIRE(basis.hubs.size() == 1);
  CHECK(hub_gap_radius(t, basis.sets[0], basis.sets[1], basis.hubs[0]) == doctest::Approx(2.0));
}

TEST_CASE("basis construction rejects shallow rays") {
  MetricGraph t = regular_tree(3, 4);
  BoundaryRay ray = ray_to(t, 0, tree_leaf(t, 4));
  CHECK_THROWS_AS(phi_neighborhood_basis(t, 0, ray, 3, 0.0), std::invalid_argument);
}
