#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hyperpot/builders.hpp"
#include "hyperpot/hyperbolic.hpp"
#include "hyperpot/verify.hpp"

namespace hp = hyperpot;

namespace {

std::vector<int> all_vertices(const hp::MetricGraph& g) {
  std::vector<int> v(g.vertex_count());
  for (int i = 0; i < g.vertex_count(); ++i) v[i] = i;
  return v;
}

std::vector<double> constant(const hp::MetricGraph& g, double c) {
  return std::vector<double>(g.vertex_count(), c);
}

hp::MetricGraph cycle_graph(int n) {
  std::vector<hp::Edge> edges;
  for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 1.0});
  return hp::MetricGraph(n, edges);
}

// k-th vertex (by id order) at the given unit-tree depth
int depth_vertex(const hp::MetricGraph& g, int root, int depth, int skip = 0) {
  std::vector<double> d = g.distances_from(root);
  int count = 0;
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (std::abs(d[v] - depth) < 1e-9) {
      if (count == skip) return v;
      ++count;
    }
  }
  throw std::runtime_error("no vertex at that depth");
}

// On the infinite line with constant potential eps, the Green function decays
// like r^d where r is the root of r^2 - (2 + eps) r + 1 = 0 in (0, 1); the
// on-diagonal value is 1 / (2 + eps - 2 r).
constexpr double kRoot01 = 0.7298437881283575;  // eps = 0.1
constexpr double kRoot005 = 0.8;                // eps = 0.05, exact
const double kDiag01 = 1.0 / (2.1 - 2.0 * kRoot01);

}  // namespace

TEST_CASE("three-point green comparison on the line matches the closed form") {
  hp::MetricGraph g = hp::path_graph(201);
  hp::SchrodingerOperator op = hp::schrodinger(g, constant(g, 0.1));
  std::vector<int> dom = all_vertices(g);
  hp::PhiChain chain = hp::phi_chain_along_geodesic(g, 30, 170, 0.0);
  REQUIRE(chain.length() >= 3);

  hp::ThreeGReport rep = hp::check_3g(op, dom, chain, 1.0);
  REQUIRE(rep.ratios.size() == chain.track.size() - 2);
  // Interior aligned triple: rho = 1 / (mu(B_1) g(0)) with mu(B_1) = 3.
  const double rho_line = 1.0 / (3.0 * kDiag01);
  for (double rho : rep.ratios) CHECK(rho == doctest::Approx(rho_line).epsilon(1e-6));
  CHECK(rep.c_emp == doctest::Approx(3.0 * kDiag01).epsilon(1e-6));
  CHECK(rep.c_upper / rep.c_lower == doctest::Approx(1.0).epsilon(1e-6));
  for (double s : rep.separations) CHECK(s >= 2.0);

  SUBCASE("separation filter keeps only well separated middles") {
    hp::ThreeGReport far = hp::check_3g(op, dom, chain, 1.0, 11.0);
    CHECK(far.ratios.size() < rep.ratios.size());
    CHECK(!far.ratios.empty());
    for (double s : far.separations) CHECK(s >= 11.0);
    CHECK(far.c_emp == doctest::Approx(rep.c_emp).epsilon(1e-9));
  }

  SUBCASE("degenerate inputs are rejected") {
    hp::PhiChain two;
    two.track = {30, 100};
    CHECK_THROWS_AS(hp::check_3g(op, dom, two, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(hp::check_3g(op, dom, chain, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(hp::check_3g(op, dom, chain, 1.0, 1e9), std::invalid_argument);
  }
}

TEST_CASE("three-point constant on regular trees is stable under deepening") {
  // Dirichlet problem on the depth-9 ball of a 3-regular tree, zero potential.
  hp::MetricGraph g10 = hp::regular_tree(3, 10);
  hp::SchrodingerOperator op10 = hp::laplacian(g10);
  std::vector<int> dom10 = g10.ball(0, 9.0);
  int tip10 = depth_vertex(g10, 0, 9);
  hp::PhiChain chain10 = hp::phi_chain_along_geodesic(g10, 0, tip10, 0.0);
  hp::ThreeGReport rep10 = hp::check_3g(op10, dom10, chain10, 1.0);

  // Infinite-tree value: rho = (3/2) / mu(B_1) = 3/8, c = 8/3. Truncation at
  // the rim bends the ratios, so the bands are generous.
  for (double rho : rep10.ratios) {
    CHECK(rho > 0.30);
    CHECK(rho < 0.48);
  }
  CHECK(rep10.c_emp > 2.0);
  CHECK(rep10.c_emp < 3.4);

  hp::MetricGraph g12 = hp::regular_tree(3, 12);
  hp::SchrodingerOperator op12 = hp::laplacian(g12);
  std::vector<int> dom12 = g12.ball(0, 11.0);
  int tip12 = depth_vertex(g12, 0, 11);
  hp::PhiChain chain12 = hp::phi_chain_along_geodesic(g12, 0, tip12, 0.0);
  hp::ThreeGReport rep12 = hp::check_3g(op12, dom12, chain12, 1.0);
  CHECK(rep12.c_emp / rep10.c_emp > 1.0 / 1.25);
  CHECK(rep12.c_emp / rep10.c_emp < 1.25);
}

TEST_CASE("growth recovery stays flat along geodesic chains") {
  // Dirichlet truncation below depth 9: the leafy closure of the finite tree
  // would inflate shifted Green values near the leaves and tilt the ratios.
  hp::MetricGraph g = hp::regular_tree(3, 10);
  hp::SchrodingerOperator op = hp::schrodinger(g, constant(g, 0.1));
  hp::SchrodingerOperator relaxed = hp::schrodinger(g, constant(g, 0.05));
  std::vector<int> dom = g.ball(0, 9.0);
  int tip = depth_vertex(g, 0, 9);
  hp::PhiChain chain = hp::phi_chain_along_geodesic(g, 0, tip, 0.0);
  REQUIRE(chain.sets.size() == chain.track.size());

  hp::GrowthRecoveryReport rep = hp::check_growth_recovery(op, relaxed, dom, chain, 1.0);
  REQUIRE(rep.per_link_max.size() == chain.track.size() - 1);
  for (double m : rep.per_link_max) CHECK(m > 0.0);
  CHECK(rep.flat);
  CHECK(rep.flatness >= 1.0);
  CHECK(rep.flatness < 1.4);

  SUBCASE("the reversed chain passes the mirrored bound") {
    hp::PhiChain rev = hp::reverse_chain(g, chain);
    hp::GrowthRecoveryReport back = hp::check_growth_recovery(op, relaxed, dom, rev, 1.0);
    CHECK(back.flat);
    CHECK(back.flatness < 1.1);
  }

  SUBCASE("line chains are flat to high accuracy in both directions") {
    hp::MetricGraph line = hp::path_graph(201);
    hp::SchrodingerOperator lop = hp::schrodinger(line, constant(line, 0.1));
    hp::SchrodingerOperator lrelaxed = hp::schrodinger(line, constant(line, 0.05));
    hp::PhiChain lchain = hp::phi_chain_along_geodesic(line, 30, 170, 0.0);
    hp::GrowthRecoveryReport lrep =
        hp::check_growth_recovery(lop, lrelaxed, all_vertices(line), lchain, 1.0);
    CHECK(lrep.flat);
    CHECK(lrep.flatness < 1.00001);
    // Each link boundary is the single vertex one step past the track point,
    // so the ratio has the closed form r / (3 g'(0) r'^3).
    const double diag005 = 1.0 / (2.05 - 2.0 * kRoot005);
    const double link = kRoot01 / (3.0 * diag005 * kRoot005 * kRoot005 * kRoot005);
    CHECK(lrep.per_link_max.front() == doctest::Approx(link).epsilon(1e-6));
    hp::GrowthRecoveryReport lback =
        hp::check_growth_recovery(lop, lrelaxed, all_vertices(line),
                                  hp::reverse_chain(line, lchain), 1.0);
    CHECK(lback.flat);
    CHECK(lback.flatness < 1.00001);
  }

  SUBCASE("mismatched graphs and set-free chains are rejected") {
    hp::MetricGraph other = hp::path_graph(5);
    hp::SchrodingerOperator oop = hp::schrodinger(other, constant(other, 0.1));
    CHECK_THROWS_AS(hp::check_growth_recovery(op, oop, dom, chain, 1.0), std::invalid_argument);
    hp::PhiChain bare;
    bare.track = chain.track;
    CHECK_THROWS_AS(hp::check_growth_recovery(op, relaxed, dom, bare, 1.0), std::invalid_argument);
  }
}

TEST_CASE("green decay rates match the recurrence roots on the line") {
  hp::MetricGraph g = hp::path_graph(201);
  hp::SchrodingerOperator op = hp::schrodinger(g, constant(g, 0.1));
  hp::SchrodingerOperator relaxed = hp::schrodinger(g, constant(g, 0.05));
  std::vector<int> dom = all_vertices(g);

  std::vector<std::pair<int, int>> pairs;
  for (int k = 3; k <= 40; ++k) pairs.emplace_back(60, 60 + k);
  hp::DecayFit fit = hp::check_exponential_decay(op, relaxed, dom, pairs, 1.0);

  CHECK(fit.pairs_used == 38);
  CHECK(fit.alpha2 == doctest::Approx(-std::log(kRoot01)).epsilon(1e-9));
  CHECK(fit.ln_b == doctest::Approx(std::log(kDiag01)).epsilon(1e-7));
  CHECK(fit.r2 > 0.999999);
  CHECK(fit.alpha1 == doctest::Approx(std::log(kRoot005 / kRoot01)).epsilon(1e-8));
  CHECK(fit.r2_ratio > 0.999999);

  SUBCASE("short pair lists are rejected") {
    std::vector<std::pair<int, int>> close;
    for (int k = 0; k <= 20; ++k) close.emplace_back(60 + k, 60 + k + 2);  // all d <= 2 sigma
    CHECK_THROWS_AS(hp::check_exponential_decay(op, relaxed, dom, close, 1.0),
                    std::invalid_argument);
    std::vector<std::pair<int, int>> few(pairs.begin(), pairs.begin() + 9);
    CHECK_THROWS_AS(hp::check_exponential_decay(op, relaxed, dom, few, 1.0),
                    std::invalid_argument);
  }
}

TEST_CASE("green decay on the tree is exponential with positive shift gap") {
  hp::MetricGraph g = hp::regular_tree(3, 12);
  hp::SchrodingerOperator op = hp::laplacian(g);
  // Still coercive: the spectral bottom of the tree Laplacian exceeds 0.05.
  hp::SchrodingerOperator relaxed = hp::schrodinger(g, constant(g, -0.05));
  std::vector<int> dom = g.ball(0, 11.0);

  std::vector<std::pair<int, int>> pairs;
  for (int branch : {0, 1}) {
    hp::BoundaryRay ray = hp::ray_to(g, 0, depth_vertex(g, 0, 11, branch * 40));
    for (int k = 3; k <= 11; ++k) pairs.emplace_back(0, ray.vertices[k]);
  }
  hp::DecayFit fit = hp::check_exponential_decay(op, relaxed, dom, pairs, 1.0);
  CHECK(fit.pairs_used == 18);
  CHECK(fit.alpha2 > 0.6);   // free-tree rate is ln 2, the rim steepens it
  CHECK(fit.alpha2 < 0.95);
  CHECK(fit.r2 >= 0.95);
  CHECK(fit.alpha1 > 0.0);
}

TEST_CASE("relative maximum principle contracts at the recurrence-root ratio") {
  hp::MetricGraph g = hp::path_graph(241);
  hp::SchrodingerOperator op = hp::schrodinger(g, constant(g, 0.1));
  std::vector<int> dom = all_vertices(g);

  hp::MaxPrincipleReport rep = hp::check_relative_max_principle(op, dom, 0.05, 140, 6.0, 60);
  CHECK(rep.eta == doctest::Approx(kRoot01 / kRoot005).epsilon(1e-9));
  CHECK(rep.ok);
  CHECK(rep.boundary_ratio > 0.0);

  SUBCASE("sub-unit radii degenerate to equality") {
    hp::MaxPrincipleReport tiny = hp::check_relative_max_principle(op, dom, 0.05, 140, 0.5, 60);
    CHECK(tiny.eta == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(tiny.ok);
  }

  SUBCASE("misplaced poles and oversized balls are rejected") {
    CHECK_THROWS_AS(hp::check_relative_max_principle(op, dom, 0.05, 140, 6.0, 143),
                    std::invalid_argument);
    std::vector<int> small = g.ball(140, 6.0);
    CHECK_THROWS_AS(hp::check_relative_max_principle(op, small, 0.05, 140, 6.0, 60),
                    std::invalid_argument);
  }
}

TEST_CASE("relative maximum principle sharpens with the shift on trees") {
  hp::MetricGraph g = hp::regular_tree(3, 8);
  hp::SchrodingerOperator op = hp::schrodinger(g, constant(g, 0.25));
  std::vector<int> dom = all_vertices(g);
  int x = depth_vertex(g, 0, 2);
  int pole = depth_vertex(g, 0, 8, 200);  // a leaf in another branch
  REQUIRE(g.distance(x, pole) > 4.0);

  double last = 1.0;
  for (double eps : {0.05, 0.1, 0.2}) {
    hp::MaxPrincipleReport rep = hp::check_relative_max_principle(op, dom, eps, x, 3.0, pole);
    CHECK(rep.ok);
    CHECK(rep.eta < last);
    last = rep.eta;
  }
}

TEST_CASE("boundary harnack quotients on trees collapse to one") {
  hp::MetricGraph g = hp::regular_tree(3, 10);
  hp::SchrodingerOperator op = hp::schrodinger(g, constant(g, 0.1));
  std::vector<int> dom = all_vertices(g);
  hp::BoundaryRay ray = hp::ray_to(g, 0, depth_vertex(g, 0, 10));
  hp::PhiNeighborhoods basis = hp::phi_neighborhood_basis(g, 0, ray, 3, 0.0);
  const std::vector<int>& outer = basis.sets[1];
  const std::vector<int>& inner = basis.sets[2];
  REQUIRE(hp::is_subset(inner, outer));

  // Distinct root branches away from the ray: 12 depth-3 vertices, 4 per branch.
  int p1 = depth_vertex(g, 0, 3, 5);
  int p2 = depth_vertex(g, 0, 3, 9);
  REQUIRE(!std::binary_search(outer.begin(), outer.end(), p1));
  REQUIRE(!std::binary_search(outer.begin(), outer.end(), p2));

  hp::BoundaryHarnackReport rep = hp::check_boundary_harnack(op, dom, outer, inner, p1, p2);
  CHECK(rep.inner_size == static_cast<int>(inner.size()));
  // Both quotient functions enter the neighborhood through one cut vertex, so
  // the ratio is constant; the bound HB <= c^4 is then far from tight here.
  CHECK(rep.hb == doctest::Approx(1.0).epsilon(1e-10));

  hp::PhiChain chain = hp::phi_chain_along_geodesic(g, 0, ray.tip(), 0.0);
  hp::ThreeGReport c3g = hp::check_3g(op, dom, chain, 1.0);
  CHECK(rep.hb <= std::pow(c3g.c_emp, 4.0));

  SUBCASE("identical poles give exactly one") {
    hp::BoundaryHarnackReport same = hp::check_boundary_harnack(op, dom, outer, inner, p1, p1);
    CHECK(same.hb == doctest::Approx(1.0).epsilon(1e-14));
  }

  SUBCASE("invalid sets and poles are rejected") {
    CHECK_THROWS_AS(hp::check_boundary_harnack(op, dom, outer, {}, p1, p2),
                    std::invalid_argument);
    CHECK_THROWS_AS(hp::check_boundary_harnack(op, dom, outer, inner, outer.front(), p2),
                    std::invalid_argument);
    CHECK_THROWS_AS(hp::check_boundary_harnack(op, dom, inner, outer, p1, p2),
                    std::invalid_argument);
  }
}

TEST_CASE("boundary harnack sees genuine spread on a cycle") {
  // Two access routes around the cycle keep the quotient non-constant.
  hp::MetricGraph g = cycle_graph(24);
  hp::SchrodingerOperator op = hp::schrodinger(g, constant(g, 0.1));
  std::vector<int> dom = all_vertices(g);
  std::vector<int> outer, inner;
  for (int v = 8; v <= 16; ++v) outer.push_back(v);
  for (int v = 10; v <= 14; ++v) inner.push_back(v);

  hp::BoundaryHarnackReport rep = hp::check_boundary_harnack(op, dom, outer, inner, 2, 22);
  CHECK(rep.hb > 1.05);
  CHECK(rep.hb < 200.0);
}

TEST_CASE("green quasi-metric defect on the line is the three-point constant") {
  hp::MetricGraph g = hp::path_graph(201);
  hp::SchrodingerOperator op = hp::schrodinger(g, constant(g, 0.1));
  std::vector<int> dom = all_vertices(g);

  std::vector<std::array<int, 3>> aligned = {
      {40, 80, 120}, {50, 90, 160}, {60, 61, 100}, {45, 100, 155}};
  hp::GreenMetricReport rep = hp::green_metric_check(op, dom, 1.0, aligned, {});
  CHECK(rep.aligned_used == 4);
  // d_G(x,z) - d_G(x,y) - d_G(y,z) = ln(3 g(0)) for every aligned interior
  // triple; the defect does not shrink with separation, it saturates the
  // three-point bound.
  CHECK(rep.max_aligned_defect == doctest::Approx(std::log(3.0 * kDiag01)).epsilon(1e-8));

  hp::PhiChain chain = hp::phi_chain_along_geodesic(g, 30, 170, 0.0);
  hp::ThreeGReport c3g = hp::check_3g(op, dom, chain, 1.0);
  CHECK(rep.max_aligned_defect <= std::log(c3g.c_emp) + 1e-6);
}

TEST_CASE("green quasi-metric satisfies the rough triangle bound on trees") {
  hp::MetricGraph g = hp::regular_tree(3, 8);
  hp::SchrodingerOperator op = hp::schrodinger(g, constant(g, 0.1));
  std::vector<int> dom = all_vertices(g);
  hp::BoundaryRay ray = hp::ray_to(g, 0, depth_vertex(g, 0, 8));

  std::vector<std::array<int, 3>> aligned = {
      {ray.vertices[0], ray.vertices[2], ray.vertices[5]},
      {ray.vertices[1], ray.vertices[4], ray.vertices[8]},
      {ray.vertices[2], ray.vertices[3], ray.vertices[7]}};
  int a = depth_vertex(g, 0, 4, 3);
  int b = depth_vertex(g, 0, 4, 9);
  int c = depth_vertex(g, 0, 4, 17);
  int d = depth_vertex(g, 0, 6, 30);
  std::vector<std::array<int, 3>> general = {{a, b, c}, {a, c, d}, {d, b, ray.vertices[6]}};

  hp::GreenMetricReport rep = hp::green_metric_check(op, dom, 1.0, aligned, general);
  CHECK(rep.aligned_used == 3);
  CHECK(rep.general_used == 3);

  hp::PhiChain chain = hp::phi_chain_along_geodesic(g, 0, ray.tip(), 0.0);
  hp::ThreeGReport c3g = hp::check_3g(op, dom, chain, 1.0);
  CHECK(rep.max_aligned_defect <= std::log(c3g.c_emp) + 1e-6);
  CHECK(rep.max_triangle_excess <= std::log(c3g.c_emp) + 1e-6);
}
