#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hyperpot/builders.hpp"
#include "hyperpot/hyperbolic.hpp"
#include "hyperpot/io.hpp"
#include "hyperpot/metric_graph.hpp"
#include "hyperpot/potential.hpp"
#include "hyperpot/runner.hpp"
#include "hyperpot/schrodinger.hpp"
#include "hyperpot/unfold.hpp"
#include "hyperpot/verify.hpp"

namespace hp = hyperpot;
using json = nlohmann::ordered_json;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out_dir = ".";
};

// bad or unreadable inputs are usage errors (exit 2), not numerical ones
template <class F>
auto load_input(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw std::invalid_argument(e.what());
  }
}

std::string file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::filesystem::path resolve_out(const GlobalOpts& g, const std::string& out) {
  std::filesystem::path p(out);
  if (p.is_relative() && g.out_dir != ".") p = std::filesystem::path(g.out_dir) / p;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  return p;
}

json envelope(const GlobalOpts& g, const std::string& tool, std::string_view hashed) {
  json j;
  j["tool"] = tool;
  j["version"] = hp::kVersion;
  j["seed"] = g.seed;
  j["input_hash"] = hp::hash_hex(hp::fnv1a(hashed));
  return j;
}

void emit(const GlobalOpts& g, const std::string& out, const json& j) {
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  const std::filesystem::path p = resolve_out(g, out);
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << j.dump(2) << '\n';
  std::cout << "wrote " << p.string() << '\n';
}

hp::SchrodingerOperator make_operator(const hp::MetricGraph& g, const std::string& potential_path,
                                      double vconst) {
  std::vector<double> v(g.vertex_count(), 0.0);
  if (!potential_path.empty())
    v = load_input([&] { return hp::load_potential(potential_path, g.vertex_count()); });
  if (vconst != 0.0)
    for (double& x : v) x += vconst;
  return hp::schrodinger(g, std::move(v));
}

std::vector<int> parse_region(const hp::MetricGraph& g, const std::string& spec) {
  if (spec == "all") {
    std::vector<int> all(g.vertex_count());
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  if (spec.rfind("ball:", 0) == 0) {
    const std::string rest = spec.substr(5);
    const std::size_t colon = rest.find(':');
    if (colon != std::string::npos) {
      try {
        const int center = std::stoi(rest.substr(0, colon));
        const double radius = std::stod(rest.substr(colon + 1));
        return g.ball(center, radius);
      } catch (const std::exception&) {
      }
    }
  }
  throw std::invalid_argument("region must be 'all' or 'ball:<center>:<radius>', got '" + spec +
                              "'");
}

std::vector<double> parse_numbers(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad number '" + item + "' in list '" + csv + "'");
    }
  }
  if (out.empty()) throw std::invalid_argument("empty number list");
  return out;
}

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<int> read_vertex_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read " + path);
  std::vector<int> out;
  int v = 0;
  while (in >> v) out.push_back(v);
  if (out.empty()) throw std::invalid_argument(path + " lists no vertices");
  return out;
}

// Dirichlet restriction to a sub-domain: internal edges survive, conductance
// toward dropped vertices folds into the potential, so the restricted form
// agrees with the full form on functions supported in the domain.
hp::SchrodingerOperator restrict_op(const hp::SchrodingerOperator& op,
                                    const std::vector<int>& domain) {
  const hp::MetricGraph& g = op.graph;
  std::vector<int> index(g.vertex_count(), -1);
  for (std::size_t k = 0; k < domain.size(); ++k) index[domain[k]] = static_cast<int>(k);
  std::vector<hp::Edge> edges;
  std::vector<double> w;
  for (int e = 0; e < g.edge_count(); ++e) {
    const hp::Edge& ed = g.edges()[e];
    if (index[ed.u] >= 0 && index[ed.v] >= 0) {
      edges.push_back({index[ed.u], index[ed.v], ed.length});
      w.push_back(op.conductance[e]);
    }
  }
  std::vector<double> mu(domain.size()), v(domain.size());
  for (std::size_t k = 0; k < domain.size(); ++k) {
    const int x = domain[k];
    mu[k] = g.mu(x);
    double leak = 0.0;
    for (const hp::MetricGraph::Arc& arc : g.neighbors(x))
      if (index[arc.to] < 0) leak += op.conductance[arc.edge];
    v[k] = op.potential[x] + leak / g.mu(x);
  }
  return hp::SchrodingerOperator(hp::MetricGraph(static_cast<int>(domain.size()), std::move(edges),
                                                 std::move(mu)),
                                 std::move(w), std::move(v));
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"discrete potential theory on hyperbolic graphs"};
  app.require_subcommand(1);
  GlobalOpts gopt;
  app.add_option("--seed", gopt.seed, "seed for every sampled computation");
  app.add_option("--threads", gopt.threads, "worker threads for independent checks");
  app.add_option("--out-dir", gopt.out_dir, "directory for relative output paths");
  int rc = 0;

  // ---- build ----
  auto* build = app.add_subcommand("build", "construct graphs and write them to disk");
  build->require_subcommand(1);
  build->fallthrough();
  struct {
    int b = 3, depth = 8;
    std::string out;
  } tre;
  auto* bt = build->add_subcommand("tree", "regular tree with unit edges");
  bt->fallthrough();
  bt->add_option("--b", tre.b, "branching degree")->required();
  bt->add_option("--depth", tre.depth, "levels below the root")->required();
  bt->add_option("--out", tre.out, "graph file to write")->required();
  bt->callback([&] {
    const hp::MetricGraph g = hp::regular_tree(tre.b, tre.depth);
    const auto p = resolve_out(gopt, tre.out);
    hp::save_graph(g, p.string());
    std::cout << "wrote " << p.string() << " (" << g.vertex_count() << " vertices, "
              << g.edge_count() << " edges)\n";
  });
  struct {
    std::string space, out;
    int levels = 4;
  } hyp;
  auto* bh = build->add_subcommand("hypapprox", "hyperbolic approximation of a finite metric space");
  bh->fallthrough();
  bh->add_option("--space", hyp.space, "distance matrix file")->required();
  bh->add_option("--levels", hyp.levels, "number of scales")->required();
  bh->add_option("--out", hyp.out, "graph file to write")->required();
  bh->callback([&] {
    const hp::FiniteMetricSpace z = load_input([&] { return hp::load_metric_space(hyp.space); });
    const hp::HyperbolicCone cone = hp::hyperbolic_approximation(z, hyp.levels);
    const auto p = resolve_out(gopt, hyp.out);
    hp::save_graph(cone.graph, p.string());
    std::cout << "wrote " << p.string() << " (" << cone.graph.vertex_count() << " vertices, base "
              << cone.base << ")\n";
  });
  struct {
    std::string left, right, out;
  } prod;
  auto* bp = build->add_subcommand("product", "cartesian product of two graphs");
  bp->fallthrough();
  bp->add_option("--left", prod.left)->required();
  bp->add_option("--right", prod.right)->required();
  bp->add_option("--out", prod.out, "graph file to write")->required();
  bp->callback([&] {
    const hp::MetricGraph l = load_input([&] { return hp::load_graph(prod.left); });
    const hp::MetricGraph r = load_input([&] { return hp::load_graph(prod.right); });
    const hp::MetricGraph g = hp::product_graph(l, r);
    const auto p = resolve_out(gopt, prod.out);
    hp::save_graph(g, p.string());
    std::cout << "wrote " << p.string() << " (" << g.vertex_count() << " vertices)\n";
  });

  // ---- delta ----
  struct {
    std::string graph, mode = "sampled", out;
    double n = 1e6;
  } del;
  auto* dc = app.add_subcommand("delta", "four point hyperbolicity constant");
  dc->fallthrough();
  dc->add_option("--graph", del.graph)->required();
  dc->add_option("--mode", del.mode)->check(CLI::IsMember({"exhaustive", "sampled"}));
  dc->add_option("--n", del.n, "quadruples to sample");
  dc->add_option("--out", del.out, "report path (stdout when omitted)");
  dc->callback([&] {
    const hp::MetricGraph g = load_input([&] { return hp::load_graph(del.graph); });
    json j = envelope(gopt, "delta", file_bytes(del.graph));
    j["mode"] = del.mode;
    j["vertices"] = g.vertex_count();
    if (del.mode == "exhaustive") {
      j["delta"] = hp::delta_four_point_exhaustive(g);
    } else {
      const long long q = std::llround(del.n);
      j["quadruples"] = q;
      j["delta"] = hp::delta_four_point_sampled(g, q, gopt.seed);
    }
    emit(gopt, del.out, j);
  });

  // ---- phichain ----
  struct {
    std::string graph, out;
    int from = 0, to = 0;
    double delta = 0.0;
  } pc;
  auto* pcc = app.add_subcommand("phichain", "separating chain along a geodesic, with certificate");
  pcc->fallthrough();
  pcc->add_option("--graph", pc.graph)->required();
  pcc->add_option("--from", pc.from)->required();
  pcc->add_option("--to", pc.to)->required();
  pcc->add_option("--delta", pc.delta, "hyperbolicity constant of the graph");
  pcc->add_option("--out", pc.out, "chain report path")->required();
  pcc->callback([&] {
    const hp::MetricGraph g = load_input([&] { return hp::load_graph(pc.graph); });
    const hp::PhiChain chain = hp::phi_chain_along_geodesic(g, pc.from, pc.to, pc.delta);
    const hp::PhiChainReport rep = hp::verify_phi_chain(g, chain);
    json j = envelope(gopt, "phichain", file_bytes(pc.graph));
    j["from"] = pc.from;
    j["to"] = pc.to;
    j["delta"] = pc.delta;
    j["alpha"] = rep.alpha;
    j["beta"] = rep.beta;
    j["phi0"] = rep.phi0;
    j["max_track_gap"] = rep.max_track_gap;
    j["ok"] = rep.ok;
    j["violations"] = rep.violations;
    j["track"] = chain.track;
    json sizes = json::array();
    for (const auto& s : chain.sets) sizes.push_back(s.size());
    j["set_sizes"] = sizes;
    j["geodesic"] = g.geodesic(pc.from, pc.to);
    emit(gopt, pc.out, j);
  });

  // ---- green ----
  struct {
    std::string graph, potential, out;
    int pole = 0;
    double tol = 1e-8, rmax = 0.0, vconst = 0.0, lambda = 0.0;
  } grn;
  auto* gc = app.add_subcommand("green", "green function column as CSV");
  gc->fallthrough();
  gc->add_option("--graph", grn.graph)->required();
  gc->add_option("--pole", grn.pole)->required();
  gc->add_option("--tol", grn.tol, "exhaustion stability tolerance");
  gc->add_option("--rmax", grn.rmax, "solve on the ball of this radius instead of exhausting");
  gc->add_option("--potential", grn.potential, "potential file, lines 'V <vertex> <value>'");
  gc->add_option("--vconst", grn.vconst, "constant added to the potential");
  gc->add_option("--lambda", grn.lambda, "spectral shift");
  gc->add_option("--out", grn.out, "CSV path")->required();
  gc->callback([&] {
    const hp::MetricGraph g = load_input([&] { return hp::load_graph(grn.graph); });
    const hp::SchrodingerOperator op = make_operator(g, grn.potential, grn.vconst);
    const hp::GreenTable t =
        grn.rmax > 0.0
            ? hp::green_dirichlet(op, g.ball(grn.pole, grn.rmax), grn.pole, grn.lambda)
            : hp::green_global(op, grn.pole, grn.lambda, grn.tol);
    if (!t.converged) throw std::runtime_error("green exhaustion did not stabilize");
    const std::vector<double> dist = g.distances_from(grn.pole);
    std::vector<int> rows = t.domain;
    std::sort(rows.begin(), rows.end(), [&](int a, int b) {
      if (dist[a] != dist[b]) return dist[a] < dist[b];
      return a < b;
    });
    const auto p = resolve_out(gopt, grn.out);
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << "vertex,distance_to_pole,value\n";
    for (int v : rows) f << v << ',' << fmt(dist[v]) << ',' << fmt(t.values[v]) << '\n';
    std::cout << "wrote " << p.string() << " (" << rows.size() << " rows)\n";
  });

  // ---- eig ----
  struct {
    std::string graph, omega = "all", potential, out;
    double vconst = 0.0;
  } eg;
  auto* ec = app.add_subcommand("eig", "principal dirichlet eigenvalue on a region");
  ec->fallthrough();
  ec->add_option("--graph", eg.graph)->required();
  ec->add_option("--omega", eg.omega, "'all' or 'ball:<center>:<radius>'");
  ec->add_option("--potential", eg.potential);
  ec->add_option("--vconst", eg.vconst);
  ec->add_option("--out", eg.out, "report path (stdout when omitted)");
  ec->callback([&] {
    const hp::MetricGraph g = load_input([&] { return hp::load_graph(eg.graph); });
    hp::SchrodingerOperator op = make_operator(g, eg.potential, eg.vconst);
    const std::vector<int> region = parse_region(g, eg.omega);
    if (static_cast<int>(region.size()) < g.vertex_count()) op = restrict_op(op, region);
    const hp::EigenResult er = hp::principal_eigenvalue(op);
    if (!er.converged) throw std::runtime_error("eigenvalue iteration did not converge");
    json j = envelope(gopt, "eig", file_bytes(eg.graph));
    j["omega"] = eg.omega;
    j["size"] = region.size();
    j["lambda1"] = er.lambda1;
    j["iterations"] = er.iterations;
    j["coercive"] = er.lambda1 > 0.0;
    emit(gopt, eg.out, j);
  });

  // ---- martin ----
  struct {
    std::string graph, ray, depths, potential, domain = "all", out;
    int base = 0;
    double window = 4.0, vconst = 0.0, lambda = 0.0, tol = 1e-3;
  } mar;
  auto* mc = app.add_subcommand("martin", "martin kernels along a ray, with cauchy certificate");
  mc->fallthrough();
  mc->add_option("--graph", mar.graph)->required();
  mc->add_option("--base", mar.base)->required();
  mc->add_option("--ray", mar.ray, "file of ray vertices, starting at the base")->required();
  mc->add_option("--depths", mar.depths, "comma separated pole depths along the ray")->required();
  mc->add_option("--window", mar.window, "kernels are compared on the ball of this radius");
  mc->add_option("--potential", mar.potential);
  mc->add_option("--vconst", mar.vconst);
  mc->add_option("--lambda", mar.lambda);
  mc->add_option("--tol", mar.tol, "cauchy threshold for the final sup difference");
  mc->add_option("--domain", mar.domain, "'all' or 'ball:<center>:<radius>'");
  mc->add_option("--out", mar.out, "report path")->required();
  mc->callback([&] {
    const hp::MetricGraph g = load_input([&] { return hp::load_graph(mar.graph); });
    const std::vector<int> verts = read_vertex_file(mar.ray);
    if (verts.front() != mar.base)
      throw std::invalid_argument("ray file must start at the base vertex");
    hp::BoundaryRay ray{mar.base, verts};
    hp::validate_ray(g, ray);
    const hp::SchrodingerOperator op = make_operator(g, mar.potential, mar.vconst);
    const std::vector<int> region = parse_region(g, mar.domain);
    const hp::MartinConvergenceReport rep = hp::martin_convergence(
        op, region, ray.vertices, parse_numbers(mar.depths), mar.base, mar.window, mar.tol,
        mar.lambda);
    json j = envelope(gopt, "martin", file_bytes(mar.graph));
    j["base"] = mar.base;
    j["window"] = mar.window;
    j["poles"] = rep.poles;
    j["sup_diffs"] = rep.sup_diffs;
    j["monotone"] = rep.monotone;
    j["cauchy"] = rep.cauchy;
    j["final_diff"] = rep.final_diff;
    json kernel = json::array();
    for (int v : g.ball(mar.base, mar.window))
      kernel.push_back({{"vertex", v}, {"value", rep.limit.values[v]}});
    j["limit_pole"] = rep.limit.pole;
    j["kernel"] = kernel;
    emit(gopt, mar.out, j);
  });

  // ---- verify ----
  auto* ver = app.add_subcommand("verify", "green function inequality checks");
  ver->require_subcommand(1);
  ver->fallthrough();
  struct VerifyCommon {
    std::string graph, potential, domain = "all", out;
    double vconst = 0.0, lambda = 0.0, sigma = 1.0;
  };
  auto add_common = [](CLI::App* sc, VerifyCommon& c) {
    sc->fallthrough();
    sc->add_option("--graph", c.graph)->required();
    sc->add_option("--potential", c.potential, "potential file, lines 'V <vertex> <value>'");
    sc->add_option("--vconst", c.vconst, "constant added to the potential");
    sc->add_option("--lambda", c.lambda, "spectral shift");
    sc->add_option("--domain", c.domain, "'all' or 'ball:<center>:<radius>'");
    sc->add_option("--sigma", c.sigma, "ball radius for measure normalization");
    sc->add_option("--out", c.out, "report path")->required();
  };

  static VerifyCommon v3c;
  struct {
    int from = 0, to = 0;
    double delta = 0.0, min_sep = 0.0;
  } v3;
  auto* v3g = ver->add_subcommand("3g", "three green function comparison along a chain");
  add_common(v3g, v3c);
  v3g->add_option("--from", v3.from)->required();
  v3g->add_option("--to", v3.to)->required();
  v3g->add_option("--delta", v3.delta, "hyperbolicity constant of the graph");
  v3g->add_option("--min-separation", v3.min_sep, "drop middles closer than this to the ends");
  v3g->callback([&] {
    const hp::MetricGraph g = load_input([&] { return hp::load_graph(v3c.graph); });
    const hp::SchrodingerOperator op = make_operator(g, v3c.potential, v3c.vconst);
    const hp::PhiChain chain = hp::phi_chain_along_geodesic(g, v3.from, v3.to, v3.delta);
    const hp::ThreeGReport rep = hp::check_3g(op, parse_region(g, v3c.domain), chain, v3c.sigma,
                                              v3.min_sep, v3c.lambda);
    json j = envelope(gopt, "verify 3g", file_bytes(v3c.graph));
    j["from"] = v3.from;
    j["to"] = v3.to;
    j["sigma"] = v3c.sigma;
    j["c_lower"] = rep.c_lower;
    j["c_upper"] = rep.c_upper;
    j["c_emp"] = rep.c_emp;
    j["middle_indices"] = rep.middle_indices;
    j["separations"] = rep.separations;
    j["ratios"] = rep.ratios;
    emit(gopt, v3c.out, j);
  });

  static VerifyCommon bhc;
  struct {
    std::string outer, inner;
    int pole1 = 0, pole2 = 0;
  } bhv;
  auto* vbh = ver->add_subcommand("bhi", "boundary harnack constant for two green columns");
  add_common(vbh, bhc);
  vbh->add_option("--outer", bhv.outer, "region the functions are harmonic on")->required();
  vbh->add_option("--inner", bhv.inner, "region the ratio is compared on")->required();
  vbh->add_option("--pole1", bhv.pole1)->required();
  vbh->add_option("--pole2", bhv.pole2)->required();
  vbh->callback([&] {
    const hp::MetricGraph g = load_input([&] { return hp::load_graph(bhc.graph); });
    const hp::SchrodingerOperator op = make_operator(g, bhc.potential, bhc.vconst);
    const hp::BoundaryHarnackReport rep = hp::check_boundary_harnack(
        op, parse_region(g, bhc.domain), parse_region(g, bhv.outer), parse_region(g, bhv.inner),
        bhv.pole1, bhv.pole2, bhc.lambda);
    json j = envelope(gopt, "verify bhi", file_bytes(bhc.graph));
    j["outer"] = bhv.outer;
    j["inner"] = bhv.inner;
    j["pole1"] = bhv.pole1;
    j["pole2"] = bhv.pole2;
    j["hb"] = rep.hb;
    j["inner_size"] = rep.inner_size;
    emit(gopt, bhc.out, j);
  });

  static VerifyCommon dcc;
  struct {
    int pole = 0, max_pairs = 4000;
    double eps = 0.05;
  } dy;
  auto* vdc = ver->add_subcommand("decay", "exponential decay fit of a green column");
  add_common(vdc, dcc);
  vdc->add_option("--pole", dy.pole)->required();
  vdc->add_option("--eps", dy.eps, "downward shift for the ratio fit");
  vdc->add_option("--max-pairs", dy.max_pairs);
  vdc->callback([&] {
    const hp::MetricGraph g = load_input([&] { return hp::load_graph(dcc.graph); });
    const hp::SchrodingerOperator op = make_operator(g, dcc.potential, dcc.vconst);
    const hp::SchrodingerOperator op_shifted =
        make_operator(g, dcc.potential, dcc.vconst - dy.eps);
    const std::vector<int> region = parse_region(g, dcc.domain);
    std::vector<std::pair<int, int>> pairs;
    const std::size_t stride =
        std::max<std::size_t>(1, region.size() / std::max(dy.max_pairs, 1));
    for (std::size_t i = 0; i < region.size(); i += stride) pairs.emplace_back(dy.pole, region[i]);
    const hp::DecayFit rep = hp::check_exponential_decay(op, op_shifted, region, pairs, dcc.sigma);
    json j = envelope(gopt, "verify decay", file_bytes(dcc.graph));
    j["pole"] = dy.pole;
    j["eps"] = dy.eps;
    j["alpha2"] = rep.alpha2;
    j["ln_b"] = rep.ln_b;
    j["r2"] = rep.r2;
    j["alpha1"] = rep.alpha1;
    j["ln_a"] = rep.ln_a;
    j["r2_ratio"] = rep.r2_ratio;
    j["pairs_used"] = rep.pairs_used;
    emit(gopt, dcc.out, j);
  });

  static VerifyCommon rmc;
  struct {
    int x = 0, pole = 0;
    double r = 3.0, eps = 0.05;
  } rm;
  auto* vrm = ver->add_subcommand("rmp", "relative maximum principle contraction factor");
  add_common(vrm, rmc);
  vrm->add_option("--x", rm.x, "center of the comparison ball")->required();
  vrm->add_option("--r", rm.r, "radius of the comparison ball");
  vrm->add_option("--pole", rm.pole)->required();
  vrm->add_option("--eps", rm.eps, "spectral shift separating the two green columns");
  vrm->callback([&] {
    const hp::MetricGraph g = load_input([&] { return hp::load_graph(rmc.graph); });
    const hp::SchrodingerOperator op = make_operator(g, rmc.potential, rmc.vconst);
    const hp::MaxPrincipleReport rep = hp::check_relative_max_principle(
        op, parse_region(g, rmc.domain), rm.eps, rm.x, rm.r, rm.pole, rmc.sigma);
    json j = envelope(gopt, "verify rmp", file_bytes(rmc.graph));
    j["x"] = rm.x;
    j["r"] = rm.r;
    j["pole"] = rm.pole;
    j["eps"] = rm.eps;
    j["eta"] = rep.eta;
    j["boundary_ratio"] = rep.boundary_ratio;
    j["ok"] = rep.ok;
    emit(gopt, rmc.out, j);
  });

  static VerifyCommon gmc;
  struct {
    std::string triples;
  } gm;
  auto* vgm = ver->add_subcommand("greenmetric", "near additivity of the green metric");
  add_common(vgm, gmc);
  vgm->add_option("--triples", gm.triples,
                  "file of lines 'aligned a b c' or 'general a b c'")
      ->required();
  vgm->callback([&] {
    const hp::MetricGraph g = load_input([&] { return hp::load_graph(gmc.graph); });
    const hp::SchrodingerOperator op = make_operator(g, gmc.potential, gmc.vconst);
    std::ifstream in(gm.triples);
    if (!in) throw std::invalid_argument("cannot read " + gm.triples);
    std::vector<std::array<int, 3>> aligned, general;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      std::string tag;
      if (!(ls >> tag)) continue;
      std::array<int, 3> t{};
      if ((tag != "aligned" && tag != "general") || !(ls >> t[0] >> t[1] >> t[2]))
        throw std::invalid_argument(gm.triples + ":" + std::to_string(lineno) +
                                    ": expected 'aligned|general a b c'");
      (tag == "aligned" ? aligned : general).push_back(t);
    }
    const hp::GreenMetricReport rep =
        hp::green_metric_check(op, parse_region(g, gmc.domain), gmc.sigma, aligned, general);
    json j = envelope(gopt, "verify greenmetric", file_bytes(gmc.graph));
    j["sigma"] = gmc.sigma;
    j["max_aligned_defect"] = rep.max_aligned_defect;
    j["max_triangle_excess"] = rep.max_triangle_excess;
    j["aligned_used"] = rep.aligned_used;
    j["general_used"] = rep.general_used;
    emit(gopt, gmc.out, j);
  });

  // ---- unfold ----
  struct {
    std::string domain, checks = "uniformity,delta,hardy,transfer", out;
    double h = 0.1, n_dim = 3.0, c_bound = 10.0, tol = 1e-9;
    long long samples = 4000;
  } uf;
  auto* uc = app.add_subcommand("unfold", "quasi-hyperbolic unfolding checks for a plane domain");
  uc->fallthrough();
  uc->set_help_flag("--help", "print help");  // frees -h so the grid step can be --h
  uc->add_option("--domain", uf.domain, "disc | square | slit | lshape | cusp:<q>")->required();
  uc->add_option("--h", uf.h, "grid step")->required();
  uc->add_option("--checks", uf.checks, "subset of uniformity,delta,hardy,transfer");
  uc->add_option("--n-dim", uf.n_dim, "ambient dimension for the operator transfer");
  uc->add_option("--samples", uf.samples, "quadruples for the delta estimate");
  uc->add_option("--c", uf.c_bound, "uniformity threshold");
  uc->add_option("--out", uf.out, "report path")->required();
  uc->callback([&] {
    const hp::DomainSample ds = hp::sample_domain(uf.domain, uf.h);
    json j = envelope(gopt, "unfold", uf.domain + "@" + fmt(uf.h));
    j["domain"] = uf.domain;
    j["h"] = uf.h;
    j["samples"] = ds.base.vertex_count();
    for (const std::string& check : split_csv(uf.checks)) {
      if (check == "uniformity") {
        const hp::UniformityReport rep =
            hp::check_uniformity(ds, hp::canonical_pairs(ds), uf.c_bound);
        j["uniformity"] = {{"c_bound", uf.c_bound},
                           {"worst_c", rep.worst_c},
                           {"uniform_fraction", rep.uniform_fraction},
                           {"pair_c", rep.pair_c}};
      } else if (check == "delta") {
        const hp::HyperbolicityReport rep =
            hp::check_unfolding_hyperbolic(ds, uf.samples, gopt.seed);
        j["delta"] = {{"samples", uf.samples},
                      {"delta_coarse", rep.delta_coarse},
                      {"delta_fine", rep.delta_fine},
                      {"ratio", rep.ratio}};
      } else if (check == "hardy") {
        j["hardy"] = {{"tol", uf.tol},
                      {"constant", hp::hardy_constant(hp::dirichlet_operator(ds), ds, uf.tol)}};
      } else if (check == "transfer") {
        const hp::TransferCheck rep = hp::transfer_check(ds, uf.n_dim, uf.tol);
        j["transfer"] = {{"n_dim", rep.n_dim},
                         {"max_v_dsq", rep.max_v_dsq},
                         {"v_bounded", rep.v_bounded},
                         {"harmonic_residual", rep.harmonic_residual},
                         {"lambda_base", rep.lambda_base},
                         {"lambda_unfolded", rep.lambda_unfolded},
                         {"rel_gap", rep.rel_gap}};
      } else {
        throw std::invalid_argument("unknown check '" + check + "'");
      }
    }
    emit(gopt, uf.out, j);
  });

  // ---- run ----
  struct {
    std::string config;
  } rn;
  auto* rcmd = app.add_subcommand("run", "execute a config driven pipeline");
  rcmd->fallthrough();
  rcmd->add_option("config", rn.config, "flat key = value config file")->required();
  rcmd->callback([&] {
    const hp::Config cfg = hp::Config::parse_file(rn.config);
    hp::RunOptions opt;
    opt.seed = gopt.seed;
    opt.threads = gopt.threads;
    opt.out_dir = gopt.out_dir;
    std::string report;
    rc = hp::run_config(cfg, opt, &report);
    std::cout << "report: " << report << '\n';
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const hp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
  return rc;
}
