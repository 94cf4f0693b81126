#include "hyperpot/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hyperpot {

namespace {

std::runtime_error parse_error(const std::string& path, int line, const std::string& what) {
  return std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

bool content_line(std::string& s) {
  auto hash = s.find('#');
  if (hash != std::string::npos) s.erase(hash);
  return s.find_first_not_of(" \t\r\n") != std::string::npos;
}

}  // namespace

MetricGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file " + path);
  int n = -1;
  std::vector<Edge> edges;
  std::vector<double> mu;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!content_line(line)) continue;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "vertices") {
      if (n >= 0) throw parse_error(path, lineno, "duplicate vertices line");
      if (!(ss >> n) || n < 1) throw parse_error(path, lineno, "bad vertex count");
      mu.assign(n, 1.0);
    } else if (tag == "edge") {
      if (n < 0) throw parse_error(path, lineno, "edge before vertices line");
      Edge e;
      if (!(ss >> e.u >> e.v >> e.length)) throw parse_error(path, lineno, "expected: edge <u> <v> <length>");
      edges.push_back(e);
    } else if (tag == "mu") {
      if (n < 0) throw parse_error(path, lineno, "mu before vertices line");
      int v;
      double m;
      if (!(ss >> v >> m)) throw parse_error(path, lineno, "expected: mu <v> <value>");
      if (v < 0 || v >= n) throw parse_error(path, lineno, "mu vertex out of range");
      mu[v] = m;
    } else {
      throw parse_error(path, lineno, "unknown record '" + tag + "'");
    }
  }
  if (n < 0) throw std::runtime_error(path + ": missing vertices line");
  try {
    return MetricGraph(n, std::move(edges), std::move(mu));
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void save_graph(const MetricGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write graph file " + path);
  out.precision(17);
  out << "vertices " << g.vertex_count() << "\n";
  for (const Edge& e : g.edges()) out << "edge " << e.u << " " << e.v << " " << e.length << "\n";
  for (int v = 0; v < g.vertex_count(); ++v)
    if (g.mu(v) != 1.0) out << "mu " << v << " " << g.mu(v) << "\n";
}

double FiniteMetricSpace::diameter() const {
  double d = 0.0;
  for (const auto& row : dist)
    for (double x : row) d = std::max(d, x);
  return d;
}

void FiniteMetricSpace::validate() const {
  int n = size();
  if (n < 1) throw std::invalid_argument("metric space needs at least one point");
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(dist[i].size()) != n) throw std::invalid_argument("distance matrix is not square");
    if (dist[i][i] != 0.0) throw std::invalid_argument("nonzero diagonal in distance matrix");
    for (int j = 0; j < n; ++j) {
      double d = dist[i][j];
      if (!std::isfinite(d) || d < 0.0) throw std::invalid_argument("distances must be finite nonnegative");
      if (i != j && d <= 0.0) throw std::invalid_argument("distinct points at distance zero");
      if (std::abs(d - dist[j][i]) > 1e-12 * (1.0 + d)) throw std::invalid_argument("distance matrix not symmetric");
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (dist[i][j] > dist[i][k] + dist[k][j] + 1e-12)
          throw std::invalid_argument("triangle inequality violated");
}

FiniteMetricSpace load_metric_space(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metric space file " + path);
  int n;
  if (!(in >> n) || n < 1) throw std::runtime_error(path + ": bad point count");
  FiniteMetricSpace z;
  z.dist.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!(in >> z.dist[i][j])) throw std::runtime_error(path + ": distance matrix truncated");
  try {
    z.validate();
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return z;
}

void save_metric_space(const FiniteMetricSpace& z, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write metric space file " + path);
  out.precision(17);
  out << z.size() << "\n";
  for (const auto& row : z.dist) {
    for (size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << row[j];
    out << "\n";
  }
}

std::vector<double> load_potential(const std::string& path, int n_vertices) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open potential file " + path);
  std::vector<double> V(n_vertices, 0.0);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!content_line(line)) continue;
    std::istringstream ss(line);
    std::string tag;
    int v;
    double val;
    if (!(ss >> tag >> v >> val) || tag != "V") throw parse_error(path, lineno, "expected: V <vertex> <value>");
    if (v < 0 || v >= n_vertices) throw parse_error(path, lineno, "potential vertex out of range");
    V[v] = val;
  }
  return V;
}

}  // namespace hyperpot
