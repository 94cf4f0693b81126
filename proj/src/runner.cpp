#include "hyperpot/runner.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "hyperpot/builders.hpp"
#include "hyperpot/hyperbolic.hpp"
#include "hyperpot/schrodinger.hpp"
#include "hyperpot/verify.hpp"

namespace hyperpot {

namespace {

using json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void fail_at(const std::string& origin, int line, const std::string& what) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

Config Config::parse_text(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) fail_at(origin, lineno, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail_at(origin, lineno, "empty section name");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail_at(origin, lineno, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail_at(origin, lineno, "empty key");
    if (value.empty()) fail_at(origin, lineno, "empty value for key '" + key + "'");
    if (!cfg.data_[section].emplace(key, value).second)
      fail_at(origin, lineno, "duplicate key '" + key + "' in section [" + section + "]");
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str(), path);
}

bool Config::has(const std::string& section, const std::string& key) const {
  auto s = data_.find(section);
  return s != data_.end() && s->second.count(key) > 0;
}

const std::string& Config::get(const std::string& section, const std::string& key) const {
  auto s = data_.find(section);
  if (s != data_.end()) {
    auto k = s->second.find(key);
    if (k != s->second.end()) return k->second;
  }
  const std::string where = section.empty() ? key : section + "." + key;
  throw ConfigError(origin_ + ": missing required key '" + where + "'");
}

std::string Config::get_or(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

double Config::number(const std::string& section, const std::string& key) const {
  const std::string& v = get(section, key);
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size()) {
    const std::string where = section.empty() ? key : section + "." + key;
    throw ConfigError(origin_ + ": key '" + where + "' is not a number: '" + v + "'");
  }
  return out;
}

double Config::number_or(const std::string& section, const std::string& key,
                         double fallback) const {
  return has(section, key) ? number(section, key) : fallback;
}

long long Config::integer(const std::string& section, const std::string& key) const {
  const std::string& v = get(section, key);
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size()) {
    const std::string where = section.empty() ? key : section + "." + key;
    throw ConfigError(origin_ + ": key '" + where + "' is not an integer: '" + v + "'");
  }
  return out;
}

long long Config::integer_or(const std::string& section, const std::string& key,
                             long long fallback) const {
  return has(section, key) ? integer(section, key) : fallback;
}

std::string Config::canonical() const {
  std::ostringstream out;
  for (const auto& [section, kv] : data_) {
    for (const auto& [key, value] : kv) {
      if (!section.empty()) out << section << '.';
      out << key << " = " << value << '\n';
    }
  }
  return out.str();
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::pair<int, int>> canonical_pairs(const DomainSample& ds) {
  const int n = static_cast<int>(ds.points.size());
  auto extreme = [&](double sx, double sy) {
    int best = 0;
    for (int i = 1; i < n; ++i) {
      const double v = sx * ds.points[i][0] + sy * ds.points[i][1];
      const double b = sx * ds.points[best][0] + sy * ds.points[best][1];
      if (v > b + 1e-15) best = i;
    }
    return best;
  };
  int deepest = 0;
  for (int i = 1; i < n; ++i)
    if (ds.dj[i] > ds.dj[deepest] + 1e-15) deepest = i;

  std::vector<std::pair<int, int>> raw = {
      {extreme(-1, 0), extreme(1, 0)},   {extreme(0, -1), extreme(0, 1)},
      {extreme(-1, -1), extreme(1, 1)},  {extreme(-1, 1), extreme(1, -1)},
      {deepest, extreme(1, 0)}};
  std::vector<std::pair<int, int>> out;
  for (auto [a, b] : raw) {
    if (a == b) continue;
    std::pair<int, int> p{std::min(a, b), std::max(a, b)};
    bool seen = false;
    for (const auto& q : out) seen = seen || q == p;
    if (!seen) out.push_back(p);
  }
  return out;
}

TransferCheck transfer_check(const DomainSample& ds, double n_dim, double tol) {
  const int n = ds.base.vertex_count();
  SchrodingerOperator op = dirichlet_operator(ds);
  UnfoldedOperator uf = unfold_operator(op, ds, n_dim);

  int deepest = 0;
  for (int i = 1; i < n; ++i)
    if (ds.dj[i] > ds.dj[deepest]) deepest = i;
  double radius = 0.65 * ds.dj[deepest];
  std::vector<int> window, rim, interior;
  for (int attempt = 0; attempt < 4; ++attempt) {
    window = ds.base.ball(deepest, radius);
    rim = inner_boundary(ds.base, window);
    interior = set_interior(ds.base, window);
    if (!rim.empty() && !interior.empty() &&
        static_cast<int>(window.size()) < n)
      break;
    radius *= 0.5;
    rim.clear();
  }
  if (rim.empty() || interior.empty())
    throw std::runtime_error("transfer check window collapsed; sample too coarse");

  std::vector<double> data(rim.size());
  for (std::size_t i = 0; i < rim.size(); ++i) data[i] = 1.0 + 0.3 * std::sin(3.0 * i);
  std::vector<double> u =
      dirichlet_solve(op, window, rim, data, std::vector<double>(n, 0.0));
  std::vector<double> pushed(n);
  for (int x = 0; x < n; ++x) pushed[x] = uf.transfer[x] * u[x];
  std::vector<double> res = uf.op.apply(pushed);

  TransferCheck out;
  out.n_dim = n_dim;
  out.max_v_dsq = uf.max_v_dsq;
  out.v_bounded = uf.v_bounded;
  for (int x : interior) out.harmonic_residual = std::max(out.harmonic_residual, std::abs(res[x]));
  out.lambda_base = hardy_constant(op, ds, tol);
  out.lambda_unfolded = hardy_constant(uf.op, std::vector<double>(n, 1.0), tol);
  out.rel_gap = std::abs(out.lambda_unfolded - out.lambda_base) /
                std::max(out.lambda_base, std::numeric_limits<double>::min());
  return out;
}

namespace {

// fan independent checks over a small worker pool; every job writes only its
// own result slot, so the assembled report does not depend on thread count
void run_jobs(std::vector<std::function<void()>> jobs, int threads) {
  threads = std::min<int>(std::max(threads, 1), static_cast<int>(jobs.size()));
  std::vector<std::exception_ptr> errs(jobs.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      try {
        jobs[i]();
      } catch (...) {
        errs[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= jobs.size()) return;
          try {
            jobs[i]();
          } catch (...) {
            errs[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

std::string eigen_version() {
  return std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
         std::to_string(EIGEN_MINOR_VERSION);
}

json envelope(const Config& cfg, const RunOptions& opt, const std::string& pipeline) {
  json j;
  j["pipeline"] = pipeline;
  j["versions"] = {{"hyperpot", kVersion}, {"eigen", eigen_version()}};
  j["seed"] = opt.seed;
  j["input_hash"] = hash_hex(fnv1a(cfg.canonical()));
  return j;
}

int vertex_at_depth(const std::vector<double>& dist, double depth, int skip = 0) {
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (std::abs(dist[i] - depth) < kDistanceTol) {
      if (skip == 0) return static_cast<int>(i);
      --skip;
    }
  }
  throw std::runtime_error("no vertex at the requested depth");
}

void run_tree3g(const Config& cfg, const RunOptions& opt, json& report,
                std::vector<std::string>& failures) {
  const int b = static_cast<int>(cfg.integer_or("tree", "branching", 3));
  const int depth = static_cast<int>(cfg.integer_or("tree", "depth", 10));
  const double vconst = cfg.number_or("operator", "potential", 0.1);
  const double delta = cfg.number_or("chain", "delta", 0.0);
  const double sigma = cfg.number_or("chain", "sigma", 1.0);
  const double min_sep = cfg.number_or("chain", "min_separation", 0.0);
  const double eps = cfg.number_or("decay", "eps", vconst / 2.0);
  const int levels = static_cast<int>(cfg.integer_or("harnack", "levels", 3));
  if (depth < 6) throw ConfigError("tree.depth must be at least 6");
  if (!(eps > 0.0) || eps >= vconst)
    throw ConfigError("decay.eps must lie strictly between 0 and the potential");

  const MetricGraph g = regular_tree(b, depth);
  const int n = g.vertex_count();
  const SchrodingerOperator op = schrodinger(g, std::vector<double>(n, vconst));
  const SchrodingerOperator op_shifted = schrodinger(g, std::vector<double>(n, vconst - eps));
  // truncated exhaustion: stopping one level above the leaves keeps the
  // boundary condition honest instead of inheriting the leafy closure
  const std::vector<int> dom = g.ball(0, depth - 1.0);
  const std::vector<double> dist0 = g.distances_from(0);
  const int tip = vertex_at_depth(dist0, depth - 1.0);
  const PhiChain chain = phi_chain_along_geodesic(g, 0, tip, delta);
  const BoundaryRay ray = ray_to(g, 0, tip);

  report["graph"] = {{"branching", b}, {"depth", depth}, {"vertices", n},
                     {"edges", g.edge_count()}, {"potential", vconst}};

  ThreeGReport tg;
  BoundaryHarnackReport hb;
  DecayFit decay;
  GrowthRecoveryReport growth;

  std::vector<std::function<void()>> jobs;
  jobs.emplace_back([&] { tg = check_3g(op, dom, chain, sigma, min_sep); });
  jobs.emplace_back([&] {
    const PhiNeighborhoods basis = phi_neighborhood_basis(g, 0, ray, levels, delta);
    const std::vector<double> to_tip = g.distances_from(tip);
    // poles on branches that meet the ray at the root, so they stay outside
    // the outer neighborhood
    std::vector<int> away;
    for (int i = 0; i < n && static_cast<int>(away.size()) < 64; ++i) {
      if (std::abs(dist0[i] - levels) < kDistanceTol &&
          std::abs(to_tip[i] - (dist0[tip] + levels)) < kDistanceTol)
        away.push_back(i);
    }
    if (away.size() < 2) throw std::runtime_error("tree too small for distinct harnack poles");
    // the neighborhood basis reaches the leaves; clip it to the exhaustion domain
    auto clip = [&](std::vector<int> s) {
      std::sort(s.begin(), s.end());
      std::vector<int> out;
      std::set_intersection(s.begin(), s.end(), dom.begin(), dom.end(), std::back_inserter(out));
      return out;
    };
    hb = check_boundary_harnack(op, dom, clip(basis.sets[1]), clip(basis.sets[2]), away.front(),
                                away.back());
  });
  jobs.emplace_back([&] {
    std::vector<std::pair<int, int>> pairs;
    for (int v : dom)
      if (dist0[v] > 2.0 * sigma) pairs.emplace_back(0, v);
    decay = check_exponential_decay(op, op_shifted, dom, pairs, sigma);
  });
  jobs.emplace_back([&] { growth = check_growth_recovery(op, op_shifted, dom, chain, sigma); });
  run_jobs(std::move(jobs), opt.threads);

  report["c_3g"] = {{"c_lower", tg.c_lower},
                    {"c_upper", tg.c_upper},
                    {"c_emp", tg.c_emp},
                    {"sigma", sigma},
                    {"middle_indices", tg.middle_indices},
                    {"separations", tg.separations},
                    {"ratios", tg.ratios}};
  report["boundary_harnack"] = {{"hb", hb.hb},
                                {"inner_size", hb.inner_size},
                                {"c_emp_fourth", std::pow(tg.c_emp, 4.0)}};
  report["decay"] = {{"eps", eps},           {"alpha2", decay.alpha2},
                     {"ln_b", decay.ln_b},   {"r2", decay.r2},
                     {"alpha1", decay.alpha1}, {"ln_a", decay.ln_a},
                     {"r2_ratio", decay.r2_ratio}, {"pairs_used", decay.pairs_used}};
  report["growth_recovery"] = {{"per_link_max", growth.per_link_max},
                               {"overall_max", growth.overall_max},
                               {"flatness", growth.flatness},
                               {"flat", growth.flat}};

  if (!(tg.c_emp >= 1.0 - 1e-9)) failures.push_back("3g constant below 1");
  if (!(tg.c_emp <= 100.0)) failures.push_back("3g constant blew past 100");
  if (!(hb.hb >= 1.0 - 1e-9 && hb.hb <= std::pow(tg.c_emp, 4.0) * (1.0 + 1e-9)))
    failures.push_back("boundary harnack constant outside [1, c_3g^4]");
  if (!(decay.alpha2 > 0.0)) failures.push_back("green decay rate not positive");
  if (!(decay.r2 >= 0.9)) failures.push_back("green decay fit r2 below 0.9");
  if (!growth.flat) failures.push_back("growth recovery links not flat");
}

void run_discunfold(const Config& cfg, const RunOptions& opt, json& report,
                    std::vector<std::string>& failures) {
  const std::string spec = cfg.get_or("domain", "spec", "disc");
  const double h = cfg.number("domain", "h");
  const long long samples = cfg.integer_or("delta", "samples", 4000);
  const double hardy_tol = cfg.number_or("hardy", "tol", 1e-9);
  const double n_dim = cfg.number_or("transfer", "n_dim", 3.0);
  const double c_bound = cfg.number_or("uniformity", "c", 10.0);

  const DomainSample ds = sample_domain(spec, h);
  report["domain"] = {{"spec", spec}, {"h", h}, {"samples", ds.base.vertex_count()}};

  UniformityReport uni;
  HyperbolicityReport hyp;
  double hardy = 0.0, hardy_fine = 0.0;
  TransferCheck transfer;

  std::vector<std::function<void()>> jobs;
  jobs.emplace_back([&] { uni = check_uniformity(ds, canonical_pairs(ds), c_bound); });
  jobs.emplace_back([&] { hyp = check_unfolding_hyperbolic(ds, samples, opt.seed); });
  jobs.emplace_back([&] {
    hardy = hardy_constant(dirichlet_operator(ds), ds, hardy_tol);
    const DomainSample fine = sample_domain(spec, h / 2.0);
    hardy_fine = hardy_constant(dirichlet_operator(fine), fine, hardy_tol);
  });
  jobs.emplace_back([&] { transfer = transfer_check(ds, n_dim, hardy_tol); });
  run_jobs(std::move(jobs), opt.threads);

  report["uniformity"] = {{"c_bound", c_bound},
                          {"worst_c", uni.worst_c},
                          {"uniform_fraction", uni.uniform_fraction},
                          {"pair_c", uni.pair_c}};
  report["delta"] = {{"samples", samples},
                     {"delta_coarse", hyp.delta_coarse},
                     {"delta_fine", hyp.delta_fine},
                     {"ratio", hyp.ratio}};
  report["hardy"] = {{"tol", hardy_tol},
                     {"constant", hardy},
                     {"constant_refined", hardy_fine},
                     {"rel_drift", std::abs(hardy_fine - hardy) / hardy}};
  report["transfer"] = {{"n_dim", transfer.n_dim},
                        {"max_v_dsq", transfer.max_v_dsq},
                        {"v_bounded", transfer.v_bounded},
                        {"harmonic_residual", transfer.harmonic_residual},
                        {"lambda_base", transfer.lambda_base},
                        {"lambda_unfolded", transfer.lambda_unfolded},
                        {"rel_gap", transfer.rel_gap}};

  if (uni.uniform_fraction < 1.0) failures.push_back("a probe pair exceeded the uniformity bound");
  if (!(hyp.ratio > 0.5 && hyp.ratio < 2.0))
    failures.push_back("hyperbolicity constant unstable under refinement");
  if (!(hardy > 0.0)) failures.push_back("hardy constant not positive");
  if (!(transfer.harmonic_residual < 1e-9))
    failures.push_back("transferred harmonics have visible residual");
  if (!(transfer.rel_gap < 1e-6))
    failures.push_back("spectral bottom moved under the unfolding");
}

}  // namespace

int run_config(const Config& cfg, const RunOptions& opt, std::string* report_path) {
  const std::string pipeline = cfg.get("", "pipeline");
  json report = envelope(cfg, opt, pipeline);
  std::vector<std::string> failures;
  if (pipeline == "tree3g") {
    run_tree3g(cfg, opt, report, failures);
  } else if (pipeline == "discunfold") {
    run_discunfold(cfg, opt, report, failures);
  } else {
    throw ConfigError("unknown pipeline '" + pipeline + "'");
  }
  report["failures"] = failures;
  report["ok"] = failures.empty();

  std::filesystem::create_directories(opt.out_dir);
  const std::filesystem::path path = std::filesystem::path(opt.out_dir) / (pipeline + ".json");
  {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report " + path.string());
    out << report.dump(2) << '\n';
  }
  if (report_path) *report_path = path.string();
  if (!failures.empty()) {
    std::cerr << "numerical failure in pipeline '" << pipeline << "':\n";
    for (const std::string& f : failures) std::cerr << "  - " << f << '\n';
    std::cerr << "full report: " << path.string() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace hyperpot
