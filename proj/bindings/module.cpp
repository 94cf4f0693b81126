// Python bindings. Thin: every function forwards to the C++ API with the same
// name and defaults, reports are plain attribute holders. The only renames are
// the lambda shift parameters, which become "lam" because of the keyword.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <tuple>

#include "hyperpot/builders.hpp"
#include "hyperpot/hyperbolic.hpp"
#include "hyperpot/io.hpp"
#include "hyperpot/metric_graph.hpp"
#include "hyperpot/potential.hpp"
#include "hyperpot/runner.hpp"
#include "hyperpot/schrodinger.hpp"
#include "hyperpot/unfold.hpp"
#include "hyperpot/verify.hpp"

namespace py = pybind11;
namespace hp = hyperpot;

namespace {

using EdgeTuple = std::tuple<int, int, double>;

hp::MetricGraph make_graph(int n, const std::vector<EdgeTuple>& edges,
                           const std::optional<std::vector<double>>& mu) {
  std::vector<hp::Edge> es;
  es.reserve(edges.size());
  for (const auto& [u, v, len] : edges) es.push_back(hp::Edge{u, v, len});
  if (mu) return hp::MetricGraph(n, std::move(es), *mu);
  return hp::MetricGraph(n, std::move(es));
}

}  // namespace

PYBIND11_MODULE(_hyperpot, m) {
  m.doc() = "Green functions, Martin kernels, and hyperbolic unfoldings on weighted graphs";
  m.attr("__version__") = hp::kVersion;

  py::register_exception<hp::ConfigError>(m, "ConfigError", PyExc_RuntimeError);

  // graphs

  py::class_<hp::Edge>(m, "Edge")
      .def(py::init([](int u, int v, double length) { return hp::Edge{u, v, length}; }),
           py::arg("u"), py::arg("v"), py::arg("length") = 1.0)
      .def_readonly("u", &hp::Edge::u)
      .def_readonly("v", &hp::Edge::v)
      .def_readonly("length", &hp::Edge::length)
      .def("__repr__", [](const hp::Edge& e) {
        std::ostringstream s;
        s << "Edge(" << e.u << ", " << e.v << ", " << e.length << ")";
        return s.str();
      });

  py::class_<hp::MetricGraph>(m, "MetricGraph")
      .def(py::init(&make_graph), py::arg("n"), py::arg("edges"),
           py::arg("mu") = std::nullopt)
      .def("vertex_count", &hp::MetricGraph::vertex_count)
      .def("edge_count", &hp::MetricGraph::edge_count)
      .def("edges", &hp::MetricGraph::edges)
      .def("mu", &hp::MetricGraph::mu, py::arg("v"))
      .def("measures", &hp::MetricGraph::measures)
      .def("total_measure", &hp::MetricGraph::total_measure)
      .def("min_edge_length", &hp::MetricGraph::min_edge_length)
      .def("degree", &hp::MetricGraph::degree, py::arg("v"))
      .def("distance", &hp::MetricGraph::distance, py::arg("x"), py::arg("y"))
      .def("distances_from", &hp::MetricGraph::distances_from, py::arg("x"))
      .def("geodesic", &hp::MetricGraph::geodesic, py::arg("x"), py::arg("y"))
      .def("ball", &hp::MetricGraph::ball, py::arg("x"), py::arg("r"))
      .def("measure_of", &hp::MetricGraph::measure_of, py::arg("set"))
      .def("eccentricity", &hp::MetricGraph::eccentricity, py::arg("x"))
      .def("__repr__", [](const hp::MetricGraph& g) {
        std::ostringstream s;
        s << "MetricGraph(" << g.vertex_count() << " vertices, " << g.edge_count()
          << " edges)";
        return s.str();
      });

  m.def("distances_to_set", &hp::distances_to_set, py::arg("g"), py::arg("sources"));
  m.def("inner_boundary", &hp::inner_boundary, py::arg("g"), py::arg("set"));
  m.def("set_closure", &hp::set_closure, py::arg("g"), py::arg("set"));
  m.def("set_interior", &hp::set_interior, py::arg("g"), py::arg("set"));
  m.def("is_subset", &hp::is_subset, py::arg("inner"), py::arg("outer"));
  m.def("doubling_exponent", &hp::doubling_exponent, py::arg("g"), py::arg("sigma"),
        py::arg("max_centers") = 256);

  // builders and files

  m.def("regular_tree", &hp::regular_tree, py::arg("b"), py::arg("depth"),
        py::arg("max_vertices") = 4000000LL);
  m.def("path_graph", &hp::path_graph, py::arg("n"));
  m.def("product_graph", &hp::product_graph, py::arg("g1"), py::arg("g2"));

  py::class_<hp::FiniteMetricSpace>(m, "FiniteMetricSpace")
      .def(py::init([](std::vector<std::vector<double>> dist) {
             return hp::FiniteMetricSpace{std::move(dist)};
           }),
           py::arg("dist"))
      .def_readonly("dist", &hp::FiniteMetricSpace::dist)
      .def("size", &hp::FiniteMetricSpace::size)
      .def("diameter", &hp::FiniteMetricSpace::diameter)
      .def("validate", &hp::FiniteMetricSpace::validate);

  py::class_<hp::HyperbolicCone>(m, "HyperbolicCone")
      .def_readonly("graph", &hp::HyperbolicCone::graph)
      .def_readonly("base", &hp::HyperbolicCone::base)
      .def_readonly("level_of", &hp::HyperbolicCone::level_of)
      .def_readonly("point_of", &hp::HyperbolicCone::point_of)
      .def_readonly("level_sets", &hp::HyperbolicCone::level_sets);

  m.def("hyperbolic_approximation", &hp::hyperbolic_approximation, py::arg("z"),
        py::arg("levels"));

  m.def("load_graph", &hp::load_graph, py::arg("path"));
  m.def("save_graph", &hp::save_graph, py::arg("g"), py::arg("path"));
  m.def("load_metric_space", &hp::load_metric_space, py::arg("path"));
  m.def("save_metric_space", &hp::save_metric_space, py::arg("z"), py::arg("path"));
  m.def("load_potential", &hp::load_potential, py::arg("path"), py::arg("n_vertices"));

  // hyperbolicity

  m.def("gromov_product", &hp::gromov_product, py::arg("g"), py::arg("x"), py::arg("y"),
        py::arg("base"));
  m.def("delta_four_point_exhaustive", &hp::delta_four_point_exhaustive, py::arg("g"));
  m.def("delta_four_point_sampled", &hp::delta_four_point_sampled, py::arg("g"),
        py::arg("n_quadruples"), py::arg("seed"), py::arg("pool_cap") = 1024);
  m.def("delta_thin_triangles", &hp::delta_thin_triangles, py::arg("g"),
        py::arg("n_triangles"), py::arg("seed"));

  py::class_<hp::BoundaryRay>(m, "BoundaryRay")
      .def(py::init([](int base, std::vector<int> vertices) {
             return hp::BoundaryRay{base, std::move(vertices)};
           }),
           py::arg("base"), py::arg("vertices"))
      .def_readonly("base", &hp::BoundaryRay::base)
      .def_readonly("vertices", &hp::BoundaryRay::vertices)
      .def("tip", &hp::BoundaryRay::tip);

  m.def("ray_to", &hp::ray_to, py::arg("g"), py::arg("base"), py::arg("target"));
  m.def("validate_ray", &hp::validate_ray, py::arg("g"), py::arg("ray"));
  m.def("boundary_quasi_metric", &hp::boundary_quasi_metric, py::arg("g"), py::arg("base"),
        py::arg("rays"));
  m.def("quasi_ultrametric_constant", &hp::quasi_ultrametric_constant, py::arg("d"));

  py::class_<hp::PhiChain>(m, "PhiChain")
      .def_readonly("sets", &hp::PhiChain::sets)
      .def_readonly("track", &hp::PhiChain::track)
      .def_readonly("delta_eff", &hp::PhiChain::delta_eff)
      .def_readonly("phi0", &hp::PhiChain::phi0)
      .def("length", &hp::PhiChain::length);

  m.def("phi_chain_along_geodesic", &hp::phi_chain_along_geodesic, py::arg("g"),
        py::arg("a"), py::arg("b"), py::arg("delta"));
  m.def("track_chain", &hp::track_chain, py::arg("g"), py::arg("track"), py::arg("delta"));
  m.def("set_chain", &hp::set_chain, py::arg("g"), py::arg("sets"), py::arg("track"),
        py::arg("delta"));
  m.def("reverse_chain", &hp::reverse_chain, py::arg("g"), py::arg("chain"));

  py::class_<hp::PhiChainReport>(m, "PhiChainReport")
      .def_readonly("ok", &hp::PhiChainReport::ok)
      .def_readonly("alpha", &hp::PhiChainReport::alpha)
      .def_readonly("beta", &hp::PhiChainReport::beta)
      .def_readonly("phi0", &hp::PhiChainReport::phi0)
      .def_readonly("max_track_gap", &hp::PhiChainReport::max_track_gap)
      .def_readonly("violations", &hp::PhiChainReport::violations);

  m.def("verify_phi_chain", &hp::verify_phi_chain, py::arg("g"), py::arg("chain"));

  py::class_<hp::PhiNeighborhoods>(m, "PhiNeighborhoods")
      .def_readonly("sets", &hp::PhiNeighborhoods::sets)
      .def_readonly("hubs", &hp::PhiNeighborhoods::hubs)
      .def_readonly("c_delta", &hp::PhiNeighborhoods::c_delta)
      .def_readonly("ray", &hp::PhiNeighborhoods::ray);

  m.def("phi_neighborhood_basis", &hp::phi_neighborhood_basis, py::arg("g"),
        py::arg("base"), py::arg("ray"), py::arg("levels"), py::arg("delta"));
  m.def("hub_gap_radius", &hp::hub_gap_radius, py::arg("g"), py::arg("n_i"),
        py::arg("n_ip1"), py::arg("hub"));

  // operators and Green functions

  py::class_<hp::SchrodingerOperator>(m, "SchrodingerOperator")
      .def(py::init<hp::MetricGraph, std::vector<double>, std::vector<double>>(),
           py::arg("graph"), py::arg("conductance"), py::arg("potential"))
      .def_readonly("graph", &hp::SchrodingerOperator::graph)
      .def_readonly("conductance", &hp::SchrodingerOperator::conductance)
      .def_readonly("potential", &hp::SchrodingerOperator::potential)
      .def("size", &hp::SchrodingerOperator::size)
      .def("mu", &hp::SchrodingerOperator::mu, py::arg("v"))
      .def("conductance_sum", &hp::SchrodingerOperator::conductance_sum, py::arg("x"))
      .def("apply", &hp::SchrodingerOperator::apply, py::arg("u"))
      .def("energy", &hp::SchrodingerOperator::energy, py::arg("u"))
      .def("shifted", &hp::SchrodingerOperator::shifted, py::arg("lam"));

  m.def("laplacian", &hp::laplacian, py::arg("g"));
  m.def("schrodinger", &hp::schrodinger, py::arg("g"), py::arg("v"));

  py::class_<hp::EigenResult>(m, "EigenResult")
      .def_readonly("lambda1", &hp::EigenResult::lambda1)
      .def_readonly("eigenvector", &hp::EigenResult::eigenvector)
      .def_readonly("iterations", &hp::EigenResult::iterations)
      .def_readonly("converged", &hp::EigenResult::converged);

  m.def("principal_eigenvalue", &hp::principal_eigenvalue, py::arg("op"));
  m.def("rayleigh", &hp::rayleigh, py::arg("op"), py::arg("u"));
  m.def("is_coercive", &hp::is_coercive, py::arg("op"), py::arg("lam"));

  py::class_<hp::DirichletSolver>(m, "DirichletSolver")
      .def(py::init<const hp::SchrodingerOperator&, std::vector<int>, double>(),
           py::arg("op"), py::arg("domain"), py::arg("lam") = 0.0,
           py::keep_alive<1, 2>())
      .def("domain", &hp::DirichletSolver::domain)
      .def("lam", &hp::DirichletSolver::lambda)
      .def("solve", &hp::DirichletSolver::solve, py::arg("rhs"))
      .def("apply_green", &hp::DirichletSolver::apply_green, py::arg("f"))
      .def("green_column", &hp::DirichletSolver::green_column, py::arg("pole"));

  py::class_<hp::GreenTable>(m, "GreenTable")
      .def_readonly("domain", &hp::GreenTable::domain)
      .def_readonly("pole", &hp::GreenTable::pole)
      .def_readonly("values", &hp::GreenTable::values)
      .def_readonly("lambda_shift", &hp::GreenTable::lambda_shift)
      .def_readonly("converged", &hp::GreenTable::converged)
      .def_readonly("residual", &hp::GreenTable::residual);

  m.def("green_dirichlet", &hp::green_dirichlet, py::arg("op"), py::arg("domain"),
        py::arg("pole"), py::arg("lam") = 0.0);
  m.def("green_global", &hp::green_global, py::arg("op"), py::arg("pole"),
        py::arg("lam") = 0.0, py::arg("tol") = 1e-8, py::arg("start_radius") = 4.0);
  m.def("resolvent_apply", &hp::resolvent_apply, py::arg("op"), py::arg("domain"),
        py::arg("lam"), py::arg("f"));

  py::class_<hp::ResolventCheck>(m, "ResolventCheck")
      .def_readonly("equation_residual", &hp::ResolventCheck::equation_residual)
      .def_readonly("positive", &hp::ResolventCheck::positive)
      .def_readonly("monotone", &hp::ResolventCheck::monotone)
      .def_readonly("min_entry", &hp::ResolventCheck::min_entry);

  m.def("check_resolvent_equation", &hp::check_resolvent_equation, py::arg("op"),
        py::arg("domain"), py::arg("lambda_a"), py::arg("lambda_b"));

  py::enum_<hp::SolveMode>(m, "SolveMode")
      .value("direct", hp::SolveMode::direct)
      .value("iterated", hp::SolveMode::iterated);

  m.def("dirichlet_solve", &hp::dirichlet_solve, py::arg("op"), py::arg("omega"),
        py::arg("boundary"), py::arg("boundary_values"), py::arg("rhs"),
        py::arg("mode") = hp::SolveMode::direct);

  py::class_<hp::NeumannReport>(m, "NeumannReport")
      .def_readonly("green", &hp::NeumannReport::green)
      .def_readonly("terms", &hp::NeumannReport::terms)
      .def_readonly("last_term_norm", &hp::NeumannReport::last_term_norm)
      .def_readonly("precondition_ok", &hp::NeumannReport::precondition_ok)
      .def_readonly("precondition_value", &hp::NeumannReport::precondition_value);

  m.def("neumann_series_green", &hp::neumann_series_green, py::arg("op"), py::arg("domain"),
        py::arg("pole"), py::arg("term_tol") = 1e-12, py::arg("max_terms") = 200);
  m.def("h_transform", &hp::h_transform, py::arg("op"), py::arg("h"));
  m.def("harnack_constant", &hp::harnack_constant, py::arg("op"), py::arg("center"),
        py::arg("r"), py::arg("seed"), py::arg("n_random") = 32);

  // obstacle problems and Martin kernels

  py::class_<hp::ReduitResult>(m, "ReduitResult")
      .def_readonly("values", &hp::ReduitResult::values)
      .def_readonly("contact", &hp::ReduitResult::contact)
      .def_readonly("sweeps", &hp::ReduitResult::sweeps)
      .def_readonly("converged", &hp::ReduitResult::converged)
      .def_readonly("residual", &hp::ReduitResult::residual);

  m.def("reduit", &hp::reduit, py::arg("op"), py::arg("domain"), py::arg("active"),
        py::arg("obstacle"), py::arg("lam") = 0.0, py::arg("tol") = 1e-10,
        py::arg("max_sweeps") = 10000);

  py::class_<hp::ReduitPropertiesReport>(m, "ReduitPropertiesReport")
      .def_readonly("max_harmonic_residual", &hp::ReduitPropertiesReport::max_harmonic_residual)
      .def_readonly("max_equality_gap", &hp::ReduitPropertiesReport::max_equality_gap)
      .def_readonly("max_scaling_gap", &hp::ReduitPropertiesReport::max_scaling_gap)
      .def_readonly("max_additivity_gap", &hp::ReduitPropertiesReport::max_additivity_gap)
      .def_readonly("min_subadditivity_margin",
                    &hp::ReduitPropertiesReport::min_subadditivity_margin)
      .def_readonly("max_symmetry_gap", &hp::ReduitPropertiesReport::max_symmetry_gap)
      .def_readonly("ok", &hp::ReduitPropertiesReport::ok);

  m.def("reduit_properties_check", &hp::reduit_properties_check, py::arg("op"),
        py::arg("domain"), py::arg("seed"), py::arg("tol") = 1e-8, py::arg("lam") = 0.0);

  py::class_<hp::MartinKernel>(m, "MartinKernel")
      .def_readonly("base", &hp::MartinKernel::base)
      .def_readonly("pole", &hp::MartinKernel::pole)
      .def_readonly("values", &hp::MartinKernel::values);

  m.def("martin_kernel", &hp::martin_kernel, py::arg("op"), py::arg("domain"),
        py::arg("pole"), py::arg("base"), py::arg("lam") = 0.0);

  py::class_<hp::MartinConvergenceReport>(m, "MartinConvergenceReport")
      .def_readonly("poles", &hp::MartinConvergenceReport::poles)
      .def_readonly("sup_diffs", &hp::MartinConvergenceReport::sup_diffs)
      .def_readonly("monotone", &hp::MartinConvergenceReport::monotone)
      .def_readonly("cauchy", &hp::MartinConvergenceReport::cauchy)
      .def_readonly("final_diff", &hp::MartinConvergenceReport::final_diff)
      .def_readonly("limit", &hp::MartinConvergenceReport::limit);

  m.def("martin_convergence", &hp::martin_convergence, py::arg("op"), py::arg("domain"),
        py::arg("ray"), py::arg("depths"), py::arg("base"), py::arg("window_radius"),
        py::arg("tol") = 1e-3, py::arg("lam") = 0.0);

  py::class_<hp::VanishingReport>(m, "VanishingReport")
      .def_readonly("radii", &hp::VanishingReport::radii)
      .def_readonly("scores", &hp::VanishingReport::scores)
      .def_readonly("score", &hp::VanishingReport::score)
      .def_readonly("vanishing", &hp::VanishingReport::vanishing);

  m.def("l_vanishing_test", &hp::l_vanishing_test, py::arg("op"), py::arg("domain"),
        py::arg("base"), py::arg("u"), py::arg("v_set"), py::arg("radii"),
        py::arg("vanish_tol") = 0.25, py::arg("lam") = 0.0);

  py::class_<hp::TreeDecomposition>(m, "TreeDecomposition")
      .def_readonly("leaves", &hp::TreeDecomposition::leaves)
      .def_readonly("weights", &hp::TreeDecomposition::weights)
      .def_readonly("residual", &hp::TreeDecomposition::residual)
      .def_readonly("ok", &hp::TreeDecomposition::ok);

  m.def("martin_decompose_tree", &hp::martin_decompose_tree, py::arg("op"),
        py::arg("domain"), py::arg("base"), py::arg("u"), py::arg("tol") = 1e-6,
        py::arg("lam") = 0.0);

  // inequality checks

  py::class_<hp::ThreeGReport>(m, "ThreeGReport")
      .def_readonly("middle_indices", &hp::ThreeGReport::middle_indices)
      .def_readonly("ratios", &hp::ThreeGReport::ratios)
      .def_readonly("separations", &hp::ThreeGReport::separations)
      .def_readonly("c_lower", &hp::ThreeGReport::c_lower)
      .def_readonly("c_upper", &hp::ThreeGReport::c_upper)
      .def_readonly("c_emp", &hp::ThreeGReport::c_emp);

  m.def("check_3g", &hp::check_3g, py::arg("op"), py::arg("domain"), py::arg("chain"),
        py::arg("sigma"), py::arg("min_separation") = 0.0, py::arg("lam") = 0.0);

  py::class_<hp::GrowthRecoveryReport>(m, "GrowthRecoveryReport")
      .def_readonly("per_link_max", &hp::GrowthRecoveryReport::per_link_max)
      .def_readonly("overall_max", &hp::GrowthRecoveryReport::overall_max)
      .def_readonly("flatness", &hp::GrowthRecoveryReport::flatness)
      .def_readonly("flat", &hp::GrowthRecoveryReport::flat);

  m.def("check_growth_recovery", &hp::check_growth_recovery, py::arg("op"),
        py::arg("op_shifted"), py::arg("domain"), py::arg("chain"), py::arg("sigma"));

  py::class_<hp::DecayFit>(m, "DecayFit")
      .def_readonly("alpha2", &hp::DecayFit::alpha2)
      .def_readonly("ln_b", &hp::DecayFit::ln_b)
      .def_readonly("r2", &hp::DecayFit::r2)
      .def_readonly("alpha1", &hp::DecayFit::alpha1)
      .def_readonly("ln_a", &hp::DecayFit::ln_a)
      .def_readonly("r2_ratio", &hp::DecayFit::r2_ratio)
      .def_readonly("pairs_used", &hp::DecayFit::pairs_used);

  m.def("check_exponential_decay", &hp::check_exponential_decay, py::arg("op"),
        py::arg("op_shifted"), py::arg("domain"), py::arg("pairs"), py::arg("sigma"));

  py::class_<hp::MaxPrincipleReport>(m, "MaxPrincipleReport")
      .def_readonly("eta", &hp::MaxPrincipleReport::eta)
      .def_readonly("boundary_ratio", &hp::MaxPrincipleReport::boundary_ratio)
      .def_readonly("ok", &hp::MaxPrincipleReport::ok);

  m.def("check_relative_max_principle", &hp::check_relative_max_principle, py::arg("op"),
        py::arg("domain"), py::arg("eps"), py::arg("x"), py::arg("r"), py::arg("pole"),
        py::arg("sigma") = 1.0);

  py::class_<hp::BoundaryHarnackReport>(m, "BoundaryHarnackReport")
      .def_readonly("hb", &hp::BoundaryHarnackReport::hb)
      .def_readonly("inner_size", &hp::BoundaryHarnackReport::inner_size);

  m.def("check_boundary_harnack", &hp::check_boundary_harnack, py::arg("op"),
        py::arg("domain"), py::arg("outer"), py::arg("inner"), py::arg("pole1"),
        py::arg("pole2"), py::arg("lam") = 0.0);

  py::class_<hp::GreenMetricReport>(m, "GreenMetricReport")
      .def_readonly("max_aligned_defect", &hp::GreenMetricReport::max_aligned_defect)
      .def_readonly("max_triangle_excess", &hp::GreenMetricReport::max_triangle_excess)
      .def_readonly("aligned_used", &hp::GreenMetricReport::aligned_used)
      .def_readonly("general_used", &hp::GreenMetricReport::general_used);

  m.def("green_metric_check", &hp::green_metric_check, py::arg("op"), py::arg("domain"),
        py::arg("sigma"), py::arg("aligned_triples"), py::arg("general_triples"));

  // planar unfoldings

  py::class_<hp::DomainSample>(m, "DomainSample")
      .def_readonly("spec", &hp::DomainSample::spec)
      .def_readonly("h", &hp::DomainSample::h)
      .def_readonly("points", &hp::DomainSample::points)
      .def_readonly("dj", &hp::DomainSample::dj)
      .def_readonly("base", &hp::DomainSample::base);

  m.def("sample_domain", &hp::sample_domain, py::arg("spec"), py::arg("h"));
  m.def("nearest_sample", &hp::nearest_sample, py::arg("ds"), py::arg("x"), py::arg("y"));
  m.def("quasi_hyperbolic_graph", &hp::quasi_hyperbolic_graph, py::arg("ds"));
  m.def("dirichlet_operator", &hp::dirichlet_operator, py::arg("ds"),
        py::arg("v") = std::vector<double>{});

  py::class_<hp::UniformityReport>(m, "UniformityReport")
      .def_readonly("pair_c", &hp::UniformityReport::pair_c)
      .def_readonly("worst_c", &hp::UniformityReport::worst_c)
      .def_readonly("uniform_fraction", &hp::UniformityReport::uniform_fraction);

  m.def("check_uniformity", &hp::check_uniformity, py::arg("ds"), py::arg("pairs"),
        py::arg("c"));
  m.def("canonical_pairs", &hp::canonical_pairs, py::arg("ds"));

  py::class_<hp::HyperbolicityReport>(m, "HyperbolicityReport")
      .def_readonly("delta_coarse", &hp::HyperbolicityReport::delta_coarse)
      .def_readonly("delta_fine", &hp::HyperbolicityReport::delta_fine)
      .def_readonly("ratio", &hp::HyperbolicityReport::ratio);

  m.def("check_unfolding_hyperbolic", &hp::check_unfolding_hyperbolic, py::arg("ds"),
        py::arg("samples") = 4000LL, py::arg("seed") = 1);

  m.def(
      "hardy_constant",
      [](const hp::SchrodingerOperator& op, const std::vector<double>& dj, double tol) {
        return hp::hardy_constant(op, dj, tol);
      },
      py::arg("op"), py::arg("dj"), py::arg("tol") = 1e-9);
  m.def(
      "hardy_constant",
      [](const hp::SchrodingerOperator& op, const hp::DomainSample& ds, double tol) {
        return hp::hardy_constant(op, ds, tol);
      },
      py::arg("op"), py::arg("ds"), py::arg("tol") = 1e-9);

  py::class_<hp::UnfoldedOperator>(m, "UnfoldedOperator")
      .def_readonly("op", &hp::UnfoldedOperator::op)
      .def_readonly("transfer", &hp::UnfoldedOperator::transfer)
      .def_readonly("max_v_dsq", &hp::UnfoldedOperator::max_v_dsq)
      .def_readonly("v_bounded", &hp::UnfoldedOperator::v_bounded);

  m.def("unfold_operator", &hp::unfold_operator, py::arg("op"), py::arg("ds"),
        py::arg("n_dim") = 2.0, py::arg("v_cap") = 1e6);

  py::class_<hp::TransferCheck>(m, "TransferCheck")
      .def_readonly("n_dim", &hp::TransferCheck::n_dim)
      .def_readonly("max_v_dsq", &hp::TransferCheck::max_v_dsq)
      .def_readonly("v_bounded", &hp::TransferCheck::v_bounded)
      .def_readonly("harmonic_residual", &hp::TransferCheck::harmonic_residual)
      .def_readonly("lambda_base", &hp::TransferCheck::lambda_base)
      .def_readonly("lambda_unfolded", &hp::TransferCheck::lambda_unfolded)
      .def_readonly("rel_gap", &hp::TransferCheck::rel_gap);

  m.def("transfer_check", &hp::transfer_check, py::arg("ds"), py::arg("n_dim"),
        py::arg("tol") = 1e-9);

  // configured pipelines

  py::class_<hp::Config>(m, "Config")
      .def_static("parse_text", &hp::Config::parse_text, py::arg("text"),
                  py::arg("origin") = "<config>")
      .def_static("parse_file", &hp::Config::parse_file, py::arg("path"))
      .def("has", &hp::Config::has, py::arg("section"), py::arg("key"))
      .def("get", &hp::Config::get, py::arg("section"), py::arg("key"))
      .def("number", &hp::Config::number, py::arg("section"), py::arg("key"))
      .def("integer", &hp::Config::integer, py::arg("section"), py::arg("key"))
      .def("canonical", &hp::Config::canonical);

  m.def(
      "run_config",
      [](const hp::Config& cfg, std::uint64_t seed, int threads, const std::string& out_dir) {
        hp::RunOptions opt;
        opt.seed = seed;
        opt.threads = threads;
        opt.out_dir = out_dir;
        std::string report;
        const int rc = hp::run_config(cfg, opt, &report);
        return py::make_tuple(rc, report);
      },
      py::arg("cfg"), py::arg("seed") = 1, py::arg("threads") = 1, py::arg("out_dir") = ".",
      "Runs the configured pipeline; returns (exit_code, report_path).");
}
