#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rcgossip/analytic.hpp"
#include "rcgossip/core.hpp"
#include "rcgossip/experiments.hpp"
#include "rcgossip/simulator.hpp"

namespace py = pybind11;
namespace rg = rcgossip;

namespace {

void add_core(py::module_& m)
{
    py::enum_<rg::GossipPolicy>(m, "GossipPolicy")
        .value("DC_noRC", rg::GossipPolicy::DC_noRC)
        .value("DC_RC", rg::GossipPolicy::DC_RC)
        .value("FC_noRC", rg::GossipPolicy::FC_noRC)
        .value("FC_sRC", rg::GossipPolicy::FC_sRC)
        .value("FC_allRC", rg::GossipPolicy::FC_allRC);

    py::class_<rg::Rates>(m, "Rates")
        .def(py::init([](double e, double s, double c, double g) { return rg::Rates{e, s, c, g}; }),
             py::arg("lambda_e") = 1.0, py::arg("lambda_s") = 1.0, py::arg("lambda_c") = 1.0,
             py::arg("lambda_g") = 1.0)
        .def_readwrite("lambda_e", &rg::Rates::lambda_e)
        .def_readwrite("lambda_s", &rg::Rates::lambda_s)
        .def_readwrite("lambda_c", &rg::Rates::lambda_c)
        .def_readwrite("lambda_g", &rg::Rates::lambda_g)
        .def("scaled", &rg::Rates::scaled)
        .def("__repr__", [](const rg::Rates& r) {
            return "Rates(lambda_e=" + std::to_string(r.lambda_e) +
                   ", lambda_s=" + std::to_string(r.lambda_s) +
                   ", lambda_c=" + std::to_string(r.lambda_c) +
                   ", lambda_g=" + std::to_string(r.lambda_g) + ")";
        });

    py::class_<rg::NetworkSpec>(m, "NetworkSpec")
        .def_static("flat", &rg::NetworkSpec::flat, py::arg("n"), py::arg("policy"),
                    py::arg("rates"))
        .def_static("clustered", &rg::NetworkSpec::clustered, py::arg("m"), py::arg("k"),
                    py::arg("source_policy"), py::arg("cluster_policy"), py::arg("rates"))
        .def_property_readonly("is_clustered", &rg::NetworkSpec::is_clustered)
        .def_property_readonly("end_nodes", &rg::NetworkSpec::end_nodes)
        .def_readwrite("rates", &rg::NetworkSpec::rates);

    m.def("per_stale_rate", &rg::per_stale_rate, py::arg("policy"), py::arg("source"),
          py::arg("gossip"), py::arg("n"), py::arg("fresh"),
          "Per-stale-node delivery intensity with `fresh` of `n` receivers up to date.");
    m.def(
        "validate",
        [](const rg::NetworkSpec& spec) {
            std::vector<std::string> out;
            for (const auto& v : rg::validate(spec)) out.push_back(v.field + ": " + v.message);
            return out;
        },
        py::arg("spec"), "List of violated invariants; empty when valid.");
}

void add_analytic(py::module_& m)
{
    m.def("freshness_dc_norc", &rg::freshness_dc_norc, py::arg("lambda_s"), py::arg("lambda_e"),
          py::arg("n"));
    m.def("freshness_dc_rc", &rg::freshness_dc_rc, py::arg("lambda_s"), py::arg("lambda_e"),
          py::arg("n"));
    m.def("freshness_fc_allrc", &rg::freshness_fc_allrc, py::arg("lambda_s"),
          py::arg("lambda_g"), py::arg("lambda_e"), py::arg("n"));
    m.def("freshness_fc_norc", &rg::freshness_fc_norc, py::arg("lambda_s"), py::arg("lambda_g"),
          py::arg("lambda_e"), py::arg("n"));

    py::class_<rg::RecursionTrace>(m, "RecursionTrace")
        .def_readonly("q", &rg::RecursionTrace::q)
        .def_readonly("tau", &rg::RecursionTrace::tau)
        .def_readonly("absorption", &rg::RecursionTrace::absorption)
        .def_readonly("p", &rg::RecursionTrace::p);

    m.def("renewal_freshness",
          py::overload_cast<rg::GossipPolicy, double, double, int, double>(
              &rg::renewal_freshness),
          py::arg("policy"), py::arg("source"), py::arg("gossip"), py::arg("n"),
          py::arg("lambda_e"));
    m.def("renewal_freshness",
          py::overload_cast<const rg::StaleRateFn&, int, double>(&rg::renewal_freshness),
          py::arg("rate"), py::arg("n"), py::arg("lambda_e"),
          "Generic recursion for any per-stale-rate callable rate(fresh) -> float.");
    m.def("flat_freshness", &rg::flat_freshness, py::arg("policy"), py::arg("source"),
          py::arg("gossip"), py::arg("lambda_e"), py::arg("n"));

    py::class_<rg::ClusteredBreakdown>(m, "ClusteredBreakdown")
        .def_readonly("p_ch", &rg::ClusteredBreakdown::p_ch)
        .def_readonly("p_node_given_ch", &rg::ClusteredBreakdown::p_node_given_ch)
        .def_readonly("p", &rg::ClusteredBreakdown::p);

    m.def("clustered_freshness",
          py::overload_cast<int, int, rg::GossipPolicy, rg::GossipPolicy, const rg::Rates&>(
              &rg::clustered_freshness),
          py::arg("m"), py::arg("k"), py::arg("source_policy"), py::arg("cluster_policy"),
          py::arg("rates"));
    m.def("tabulated_clustered_freshness", &rg::tabulated_clustered_freshness,
          py::arg("source_policy"), py::arg("cluster_policy"), py::arg("m"), py::arg("k"),
          py::arg("rates"));

    py::class_<rg::OptimalClusterSize>(m, "OptimalClusterSize")
        .def_readonly("k_star", &rg::OptimalClusterSize::k_star)
        .def_readonly("m_star", &rg::OptimalClusterSize::m_star)
        .def_readonly("p_star", &rg::OptimalClusterSize::p_star)
        .def_property_readonly("profile", [](const rg::OptimalClusterSize& o) {
            std::vector<std::tuple<int, int, double>> out;
            for (const auto& pt : o.profile) out.emplace_back(pt.k, pt.m, pt.p);
            return out;
        });
    m.def("optimal_cluster_size", &rg::optimal_cluster_size, py::arg("n"), py::arg("rates"),
          py::arg("source_policy"), py::arg("cluster_policy"));
}

void add_simulator(py::module_& m)
{
    py::enum_<rg::Estimator>(m, "Estimator")
        .value("cycle", rg::Estimator::cycle)
        .value("time_average", rg::Estimator::time_average);

    py::class_<rg::FreshnessEstimate>(m, "FreshnessEstimate")
        .def_readonly("p_hat", &rg::FreshnessEstimate::p_hat)
        .def_readonly("std_error", &rg::FreshnessEstimate::std_error)
        .def_readonly("ci_lo", &rg::FreshnessEstimate::ci_lo)
        .def_readonly("ci_hi", &rg::FreshnessEstimate::ci_hi)
        .def_readonly("samples", &rg::FreshnessEstimate::samples)
        .def_readonly("seed", &rg::FreshnessEstimate::seed)
        .def_readonly("estimator", &rg::FreshnessEstimate::estimator)
        .def_readonly("per_node", &rg::FreshnessEstimate::per_node)
        .def_readonly("warning", &rg::FreshnessEstimate::warning);

    m.def("estimate_freshness_cycles", &rg::estimate_freshness_cycles, py::arg("spec"),
          py::arg("num_cycles"), py::arg("seed"), py::arg("threads") = 0,
          py::call_guard<py::gil_scoped_release>());
    m.def("estimate_freshness_time", &rg::estimate_freshness_time, py::arg("spec"),
          py::arg("horizon"), py::arg("seed"), py::arg("batches") = 50,
          py::call_guard<py::gil_scoped_release>());

    py::class_<rg::DecompositionReport>(m, "DecompositionReport")
        .def_readonly("simulated", &rg::DecompositionReport::simulated)
        .def_readonly("analytic", &rg::DecompositionReport::analytic)
        .def_readonly("z", &rg::DecompositionReport::z);
    m.def("decomposition_check", &rg::decomposition_check, py::arg("spec"),
          py::arg("num_cycles"), py::arg("seed"), py::call_guard<py::gil_scoped_release>());
}

void add_experiments(py::module_& m)
{
    py::register_exception<rg::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<rg::IoError>(m, "IoError", PyExc_OSError);

    m.def(
        "run_experiment_json",
        [](const std::string& json_text) {
            return rg::to_csv(rg::run_experiment(rg::parse_config(json_text)));
        },
        py::arg("config_json"),
        "Runs a JSON experiment config and returns the CSV text (files are written as "
        "configured).");
    m.def(
        "optimal_k_report_json",
        [](const std::string& json_text) {
            return rg::report_optimal_k(rg::parse_config(json_text)).to_text();
        },
        py::arg("config_json"));
    m.attr("CSV_HEADER") = std::string(rg::kCsvHeader);
}

}  // namespace

PYBIND11_MODULE(_rcgossip, m)
{
    m.doc() = "Freshness of gossip networks under traditional and rate-changing gossip";
    m.attr("__version__") = "0.1.0";
    add_core(m);
    add_analytic(m);
    add_simulator(m);
    add_experiments(m);
}
