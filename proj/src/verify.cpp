#include "hyperpot/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace hyperpot {

namespace {

// One factorization per (operator, domain, shift); columns solved on demand.
class GreenCache {
 public:
  GreenCache(const SchrodingerOperator& op, const std::vector<int>& domain, double lambda)
      : solver_(op, domain, lambda) {}

  const std::vector<double>& column(int pole) {
    auto it = cols_.find(pole);
    if (it == cols_.end()) it = cols_.emplace(pole, solver_.green_column(pole)).first;
    return it->second;
  }

 private:
  DirichletSolver solver_;
  std::map<int, std::vector<double>> cols_;
};

double checked(double green_value) {
  if (!(green_value > 1e-250)) {
    throw std::runtime_error("Green value below solver tolerance; increase exhaustion");
  }
  return green_value;
}

double ball_measure(const MetricGraph& g, int center, double sigma) {
  return g.measure_of(g.ball(center, sigma));
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& t, const std::vector<double>& y) {
  const double n = static_cast<double>(t.size());
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += y[i];
    stt += t[i] * t[i];
    sty += t[i] * y[i];
    syy += y[i] * y[i];
  }
  LineFit f;
  const double vt = stt - st * st / n;
  const double vy = syy - sy * sy / n;
  const double cv = sty - st * sy / n;
  if (vt <= 0.0) throw std::invalid_argument("degenerate fit: all distances equal");
  f.slope = cv / vt;
  f.intercept = (sy - f.slope * st) / n;
  f.r2 = vy > 0.0 ? (cv * cv) / (vt * vy) : 1.0;
  return f;
}

}  // namespace

ThreeGReport check_3g(const SchrodingerOperator& op, const std::vector<int>& domain,
                      const PhiChain& chain, double sigma, double min_separation, double lambda) {
  const MetricGraph& g = op.graph;
  if (chain.track.size() < 3) throw std::invalid_argument("chain needs at least one middle point");
  if (sigma <= 0.0) throw std::invalid_argument("sigma must be positive");

  GreenCache cache(op, domain, lambda);
  const int x1 = chain.track.front();
  const int xm = chain.track.back();
  const std::vector<double>& col1 = cache.column(x1);
  const std::vector<double>& colm = cache.column(xm);
  const double g_m1 = checked(colm[x1]);

  std::vector<double> d1 = g.distances_from(x1);
  std::vector<double> dm = g.distances_from(xm);

  ThreeGReport rep;
  for (std::size_t j = 1; j + 1 < chain.track.size(); ++j) {
    const int xj = chain.track[j];
    const double sep = std::min(d1[xj], dm[xj]);
    if (sep < min_separation) continue;
    const double mu_b = ball_measure(g, xj, sigma);
    const double rho = g_m1 / (mu_b * checked(colm[xj]) * checked(col1[xj]));
    rep.middle_indices.push_back(static_cast<int>(j));
    rep.separations.push_back(sep);
    rep.ratios.push_back(rho);
  }
  if (rep.ratios.empty()) throw std::invalid_argument("no middle points at the requested separation");
  rep.c_lower = *std::min_element(rep.ratios.begin(), rep.ratios.end());
  rep.c_upper = *std::max_element(rep.ratios.begin(), rep.ratios.end());
  rep.c_emp = std::max(1.0 / rep.c_lower, rep.c_upper);
  return rep;
}

GrowthRecoveryReport check_growth_recovery(const SchrodingerOperator& op,
                                           const SchrodingerOperator& op_shifted,
                                           const std::vector<int>& domain, const PhiChain& chain,
                                           double sigma) {
  const MetricGraph& g = op.graph;
  if (op_shifted.graph.vertex_count() != g.vertex_count()) {
    throw std::invalid_argument("operators must share the graph");
  }
  if (chain.sets.empty()) throw std::invalid_argument("chain has no sets");
  if (chain.sets.size() != chain.track.size()) {
    throw std::invalid_argument("chain sets and track out of step");
  }
  if (chain.track.size() < 2) throw std::invalid_argument("chain too short");

  GreenCache cache(op, domain, 0.0);
  GreenCache shifted(op_shifted, domain, 0.0);
  const int x1 = chain.track.front();
  const std::vector<double>& col1 = cache.column(x1);

  GrowthRecoveryReport rep;
  for (std::size_t j = 1; j < chain.track.size(); ++j) {
    const int xj = chain.track[j - 1];
    const int xj1 = chain.track[j];
    const double mu_b = ball_measure(g, xj, sigma);
    const std::vector<double>& shift_col = shifted.column(xj);
    const double g_next = checked(col1[xj1]);
    double link_max = 0.0;
    for (int z : inner_boundary(g, chain.sets[j])) {
      const double ratio = checked(col1[z]) / (mu_b * checked(shift_col[z]) * g_next);
      link_max = std::max(link_max, ratio);
    }
    if (link_max == 0.0) throw std::invalid_argument("link boundary is empty");
    rep.per_link_max.push_back(link_max);
  }
  rep.overall_max = *std::max_element(rep.per_link_max.begin(), rep.per_link_max.end());
  rep.flatness = rep.overall_max / rep.per_link_max.front();
  rep.flat = rep.flatness <= 1.5;
  return rep;
}

DecayFit check_exponential_decay(const SchrodingerOperator& op,
                                 const SchrodingerOperator& op_shifted,
                                 const std::vector<int>& domain,
                                 const std::vector<std::pair<int, int>>& pairs, double sigma) {
  const MetricGraph& g = op.graph;
  if (op_shifted.graph.vertex_count() != g.vertex_count()) {
    throw std::invalid_argument("operators must share the graph");
  }
  GreenCache cache(op, domain, 0.0);
  GreenCache shifted(op_shifted, domain, 0.0);
  std::map<int, std::vector<double>> dists;

  std::vector<double> d_used, ln_g, ln_ratio;
  for (const auto& [x, y] : pairs) {
    auto it = dists.find(x);
    if (it == dists.end()) it = dists.emplace(x, g.distances_from(x)).first;
    const double d = it->second[y];
    if (!(d > 2.0 * sigma)) continue;
    const double gv = checked(cache.column(x)[y]);
    const double gs = checked(shifted.column(x)[y]);
    d_used.push_back(d);
    ln_g.push_back(std::log(gv));
    ln_ratio.push_back(std::log(gv / gs));
  }
  if (d_used.size() < 10) throw std::invalid_argument("need at least 10 pairs beyond 2 sigma");

  DecayFit fit;
  fit.pairs_used = static_cast<int>(d_used.size());
  LineFit f = fit_line(d_used, ln_g);
  fit.alpha2 = -f.slope;
  fit.ln_b = f.intercept;
  fit.r2 = f.r2;
  LineFit fr = fit_line(d_used, ln_ratio);
  fit.alpha1 = -fr.slope;
  fit.ln_a = fr.intercept;
  fit.r2_ratio = fr.r2;
  return fit;
}

MaxPrincipleReport check_relative_max_principle(const SchrodingerOperator& op,
                                                const std::vector<int>& domain, double eps, int x,
                                                double r, int pole, double sigma) {
  const MetricGraph& g = op.graph;
  if (r <= 0.0) throw std::invalid_argument("radius must be positive");
  std::vector<int> dom = domain;
  std::sort(dom.begin(), dom.end());
  std::vector<int> big = g.ball(x, r + sigma);
  if (!is_subset(big, dom)) throw std::invalid_argument("ball exceeds the domain");
  if (std::binary_search(big.begin(), big.end(), pole)) {
    throw std::invalid_argument("pole must lie outside the enlarged ball");
  }

  GreenCache plain(op, domain, 0.0);
  GreenCache lifted(op, domain, eps);
  const std::vector<double>& u = plain.column(pole);
  const std::vector<double>& ub = lifted.column(pole);

  std::vector<int> sphere = inner_boundary(g, g.ball(x, r));
  if (sphere.empty()) throw std::invalid_argument("sphere is empty; shrink the radius");

  double s = std::numeric_limits<double>::infinity();
  for (int z : sphere) s = std::min(s, checked(ub[z]) / checked(u[z]));

  MaxPrincipleReport rep;
  rep.boundary_ratio = s;
  rep.eta = std::pow(s * checked(u[x]) / checked(ub[x]), 1.0 / r);
  rep.ok = rep.eta < 1.0;
  return rep;
}

BoundaryHarnackReport check_boundary_harnack(const SchrodingerOperator& op,
                                             const std::vector<int>& domain,
                                             const std::vector<int>& outer,
                                             const std::vector<int>& inner, int pole1, int pole2,
                                             double lambda) {
  if (inner.empty()) throw std::invalid_argument("inner set is empty");
  if (!is_subset(inner, outer)) throw std::invalid_argument("inner set must lie in the outer set");
  std::vector<int> out_sorted = outer;
  std::sort(out_sorted.begin(), out_sorted.end());
  if (std::binary_search(out_sorted.begin(), out_sorted.end(), pole1) ||
      std::binary_search(out_sorted.begin(), out_sorted.end(), pole2)) {
    throw std::invalid_argument("poles must lie outside the outer set");
  }

  GreenCache cache(op, domain, lambda);
  const std::vector<double>& u = cache.column(pole1);
  const std::vector<double>& v = cache.column(pole2);

  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (int z : inner) {
    const double ratio = checked(u[z]) / checked(v[z]);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  BoundaryHarnackReport rep;
  rep.hb = hi / lo;
  rep.inner_size = static_cast<int>(inner.size());
  return rep;
}

GreenMetricReport green_metric_check(const SchrodingerOperator& op, const std::vector<int>& domain,
                                     double sigma,
                                     const std::vector<std::array<int, 3>>& aligned_triples,
                                     const std::vector<std::array<int, 3>>& general_triples) {
  const MetricGraph& g = op.graph;
  GreenCache cache(op, domain, 0.0);
  std::map<int, double> mu_b;
  auto half_mass = [&](int v) {
    auto it = mu_b.find(v);
    if (it == mu_b.end()) it = mu_b.emplace(v, ball_measure(g, v, sigma)).first;
    return it->second;
  };
  auto d_green = [&](int x, int y) {
    const double gv = checked(cache.column(x)[y]);
    return -std::log(gv * std::sqrt(half_mass(x) * half_mass(y)));
  };

  GreenMetricReport rep;
  for (const auto& [x, y, z] : aligned_triples) {
    const double defect = std::abs(d_green(x, z) - d_green(x, y) - d_green(y, z));
    rep.max_aligned_defect = std::max(rep.max_aligned_defect, defect);
    ++rep.aligned_used;
  }
  for (const auto& [x, y, z] : general_triples) {
    const double excess = d_green(x, z) - d_green(x, y) - d_green(y, z);
    rep.max_triangle_excess = std::max(rep.max_triangle_excess, excess);
    ++rep.general_used;
  }
  return rep;
}

}  // namespace hyperpot
