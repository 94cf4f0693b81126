#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "hyperpot/builders.hpp"
#include "hyperpot/io.hpp"

using namespace hyperpot;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("hyperpot_io_" + name);
  return p;
}

}  // namespace

TEST_CASE("graph round trip preserves structure") {
  MetricGraph g(4, {{0, 1, 1.0}, {1, 2, 0.25}, {2, 3, 2.0}, {3, 0, 1.0}}, {1.0, 2.0, 3.0, 4.0});
  fs::path p = temp_file("roundtrip.graph");
  save_graph(g, p.string());
  MetricGraph h = load_graph(p.string());
  CHECK(h.vertex_count() == 4);
  CHECK(h.edge_count() == 4);
  CHECK(h.distance(0, 2) == doctest::Approx(g.distance(0, 2)));
  CHECK(h.mu(3) == doctest::Approx(4.0));
  fs::remove(p);
}

TEST_CASE("graph parser reports the offending line") {
  fs::path p = temp_file("bad.graph");
  {
    std::ofstream out(p);
    out << "vertices 2\n# a comment\nedge 0 1 1.0\nedge 0 oops 1.0\n";
  }
  try {
    load_graph(p.string());
    FAIL("expected parse error");
  } catch (const std::runtime_error& e) {
    std::string msg = e.what();
    CHECK(msg.find(":4:") != std::string::npos);
  }
  fs::remove(p);
}

TEST_CASE("unlisted measures default to one") {
  fs::path p = temp_file("mu.graph");
  {
    std::ofstream out(p);
    out << "vertices 3\nedge 0 1 1\nedge 1 2 1\nmu 1 5.0\n";
  }
  MetricGraph g = load_graph(p.string());
  CHECK(g.mu(0) == 1.0);
  CHECK(g.mu(1) == 5.0);
  CHECK(g.mu(2) == 1.0);
  fs::remove(p);
}

TEST_CASE("metric space round trip and validation") {
  FiniteMetricSpace m;
  m.dist = {{0.0, 1.0, 2.0}, {1.0, 0.0, 1.0}, {2.0, 1.0, 0.0}};
  m.validate();
  CHECK(m.diameter() == doctest::Approx(2.0));
  fs::path p = temp_file("space.txt");
  save_metric_space(m, p.string());
  FiniteMetricSpace back = load_metric_space(p.string());
  CHECK(back.size() == 3);
  CHECK(back.dist[0][2] == doctest::Approx(2.0));
  fs::remove(p);
}

TEST_CASE("metric space validation rejects broken input") {
  FiniteMetricSpace asym;
  asym.dist = {{0.0, 1.0}, {2.0, 0.0}};
  CHECK_THROWS_AS(asym.validate(), std::invalid_argument);

  FiniteMetricSpace tri;
  tri.dist = {{0.0, 1.0, 5.0}, {1.0, 0.0, 1.0}, {5.0, 1.0, 0.0}};
  CHECK_THROWS_AS(tri.validate(), std::invalid_argument);

  FiniteMetricSpace diag;
  diag.dist = {{0.5}};
  CHECK_THROWS_AS(diag.validate(), std::invalid_argument);
}

TEST_CASE("potential files default missing vertices to zero") {
  fs::path p = temp_file("pot.txt");
  {
    std::ofstream out(p);
    out << "# potential\nV 0 0.25\nV 2 1.5\n";
  }
  auto v = load_potential(p.string(), 4);
  CHECK(v[0] == doctest::Approx(0.25));
  CHECK(v[1] == 0.0);
  CHECK(v[2] == doctest::Approx(1.5));
  CHECK(v[3] == 0.0);
  fs::remove(p);
}
