#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "edgeopt/baselines.hpp"
#include "edgeopt/experiment.hpp"
#include "edgeopt/ice.hpp"
#include "edgeopt/model.hpp"
#include "edgeopt/oracle.hpp"
#include "edgeopt/scenario.hpp"
#include "edgeopt/waterfill.hpp"

namespace py = pybind11;
using namespace edgeopt;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Joint service caching and workload scheduling for edge clusters";

  py::register_exception<InfeasibleError>(m, "InfeasibleError");

  py::class_<EdgeNode>(m, "EdgeNode")
      .def(py::init<>())
      .def_readwrite("storage_cap", &EdgeNode::storage_cap)
      .def_readwrite("compute_cap", &EdgeNode::compute_cap)
      .def_readwrite("lan_delay", &EdgeNode::lan_delay);

  py::class_<Service>(m, "Service")
      .def(py::init<>())
      .def_readwrite("storage_req", &Service::storage_req)
      .def_readwrite("compute_req", &Service::compute_req)
      .def_readwrite("data_ratio", &Service::data_ratio)
      .def_readwrite("core_bandwidth", &Service::core_bandwidth)
      .def_readwrite("outsource_weight", &Service::outsource_weight);

  py::class_<Topology>(m, "Topology")
      .def(py::init<>())
      .def_readwrite("neighbors", &Topology::neighbors);

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("nodes", &Scenario::nodes)
      .def_readwrite("services", &Scenario::services)
      .def_readwrite("arrivals", &Scenario::arrivals)
      .def_readwrite("topology", &Scenario::topology)
      .def_readwrite("epsilon", &Scenario::epsilon)
      .def_property_readonly("n_nodes", &Scenario::n_nodes)
      .def_property_readonly("n_services", &Scenario::n_services)
      .def("arrival", [](const Scenario& s, int n, int svc) { return s.arrival(n, svc); })
      .def("total_arrival", &Scenario::total_arrival)
      .def("validate", &Scenario::validate);

  py::class_<CachingPolicy>(m, "CachingPolicy")
      .def(py::init<int, int>(), py::arg("nodes"), py::arg("services"))
      .def_readonly("node_count", &CachingPolicy::node_count)
      .def_readonly("service_count", &CachingPolicy::service_count)
      .def("at", &CachingPolicy::at)
      .def("set", &CachingPolicy::set)
      .def("rows", [](const CachingPolicy& c) {
        std::vector<std::vector<int>> rows(c.node_count, std::vector<int>(c.service_count));
        for (int n = 0; n < c.node_count; ++n) {
          for (int s = 0; s < c.service_count; ++s) rows[n][s] = c.at(n, s) ? 1 : 0;
        }
        return rows;
      });

  py::class_<SchedulingPolicy>(m, "SchedulingPolicy")
      .def(py::init<int, int>(), py::arg("nodes"), py::arg("services"))
      .def_readonly("node_count", &SchedulingPolicy::node_count)
      .def_readonly("service_count", &SchedulingPolicy::service_count)
      .def("at", [](const SchedulingPolicy& p, int n, int s) { return p.at(n, s); })
      .def("cloud", [](const SchedulingPolicy& p, int s) { return p.cloud(s); });

  py::class_<SolveDiagnostics>(m, "SolveDiagnostics")
      .def_readonly("bisection_iters", &SolveDiagnostics::bisection_iters)
      .def_readonly("bracket_widths", &SolveDiagnostics::bracket_widths)
      .def_readonly("outer_iterations", &SolveDiagnostics::outer_iterations);

  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("objective", &SolveReport::objective)
      .def_readonly("response_time", &SolveReport::response_time)
      .def_readonly("outsourcing_rate", &SolveReport::outsourcing_rate)
      .def_readonly("schedule", &SolveReport::schedule)
      .def_readonly("caching", &SolveReport::caching)
      .def_readonly("diagnostics", &SolveReport::diagnostics)
      .def("total_response_time", &SolveReport::total_response_time)
      .def("total_outsourcing", &SolveReport::total_outsourcing);

  py::class_<Interval>(m, "Interval")
      .def(py::init<double, double>(), py::arg("lo"), py::arg("hi"))
      .def_readwrite("lo", &Interval::lo)
      .def_readwrite("hi", &Interval::hi);

  py::class_<TopologyKind>(m, "TopologyKind")
      .def_static("parse", &TopologyKind::parse)
      .def("__str__", &TopologyKind::to_string);

  py::class_<GenParams>(m, "GenParams")
      .def(py::init<>())
      .def_readwrite("n_nodes", &GenParams::n_nodes)
      .def_readwrite("n_services", &GenParams::n_services)
      .def_readwrite("storage_cap_gb", &GenParams::storage_cap_gb)
      .def_readwrite("compute_cap_gcps", &GenParams::compute_cap_gcps)
      .def_readwrite("service_storage_gb", &GenParams::service_storage_gb)
      .def_readwrite("service_compute_gcycles", &GenParams::service_compute_gcycles)
      .def_readwrite("data_ratio_mb_per_gcycle", &GenParams::data_ratio_mb_per_gcycle)
      .def_readwrite("core_bandwidth_mbps", &GenParams::core_bandwidth_mbps)
      .def_readwrite("zipf_skew", &GenParams::zipf_skew)
      .def_readwrite("node_arrival_tps", &GenParams::node_arrival_tps)
      .def_readwrite("lan_delay_s", &GenParams::lan_delay_s)
      .def_readwrite("outsource_weight", &GenParams::outsource_weight)
      .def_readwrite("epsilon_tps", &GenParams::epsilon_tps)
      .def_readwrite("topology", &GenParams::topology)
      .def_readwrite("seed", &GenParams::seed);

  py::class_<ice::IceConfig>(m, "IceConfig")
      .def(py::init<>())
      .def_readwrite("omega", &ice::IceConfig::omega)
      .def_readwrite("max_iters", &ice::IceConfig::max_iters)
      .def_readwrite("stall_window", &ice::IceConfig::stall_window)
      .def_readwrite("stall_tol", &ice::IceConfig::stall_tol)
      .def_readwrite("rng_seed", &ice::IceConfig::rng_seed);

  py::class_<ice::TraceRecord>(m, "TraceRecord")
      .def_readonly("iter", &ice::TraceRecord::iter)
      .def_readonly("node", &ice::TraceRecord::node)
      .def_readonly("proposal", &ice::TraceRecord::proposal)
      .def_readonly("y", &ice::TraceRecord::y)
      .def_readonly("y_star", &ice::TraceRecord::y_star)
      .def_readonly("rho", &ice::TraceRecord::rho)
      .def_readonly("accepted", &ice::TraceRecord::accepted)
      .def_readonly("best", &ice::TraceRecord::best);

  py::class_<ice::IceResult>(m, "IceResult")
      .def_readonly("report", &ice::IceResult::report)
      .def_readonly("trace", &ice::IceResult::trace);

  m.def("generate", &generate, py::arg("params"));
  m.def("zipf_weights", &zipf_weights, py::arg("count"), py::arg("skew"));
  m.def("save", &save, py::arg("scenario"), py::arg("path"));
  m.def("load", &load, py::arg("path"));
  m.def("scenario_to_json", &to_json_text, py::arg("scenario"));
  m.def("scenario_from_json", &from_json_text, py::arg("text"));

  m.def("objective", py::overload_cast<const Scenario&, const CachingPolicy&,
                                       const SchedulingPolicy&>(&objective));
  m.def("check_caching_feasible", [](const Scenario& s, const CachingPolicy& c) {
    const FeasibilityReport report = check_caching_feasible(s, c);
    return py::make_tuple(report.ok, report.violations);
  });
  m.def("check_schedule_feasible",
        [](const Scenario& s, const CachingPolicy& c, const SchedulingPolicy& p) {
          const FeasibilityReport report = check_schedule_feasible(s, c, p);
          return py::make_tuple(report.ok, report.violations);
        });

  m.def(
      "solve_p2",
      [](const Scenario& s, const CachingPolicy& c, bool local_only) {
        waterfill::Options options;
        options.local_only = local_only;
        return waterfill::solve_p2(s, c, options);
      },
      py::arg("scenario"), py::arg("caching"), py::arg("local_only") = false);

  py::class_<waterfill::Options>(m, "WaterfillOptions")
      .def(py::init<>())
      .def_readwrite("xi", &waterfill::Options::xi)
      .def_readwrite("local_only", &waterfill::Options::local_only);

  m.def("run_ice", &ice::run_ice, py::arg("scenario"), py::arg("config"),
        py::arg("solve_options") = waterfill::Options{});
  m.def("run_noncooperation", &baselines::run_noncooperation, py::arg("scenario"),
        py::arg("config"));
  m.def("run_greedy", &baselines::run_greedy, py::arg("scenario"));
  m.def("greedy_caching", &baselines::greedy_caching, py::arg("scenario"));

  m.def(
      "solve_p2_reference",
      [](const Scenario& s, const CachingPolicy& c) { return oracle::solve_p2_reference(s, c); },
      py::arg("scenario"), py::arg("caching"));
  m.def(
      "exhaustive_caching_search",
      [](const Scenario& s) {
        const oracle::ExhaustiveResult result = oracle::exhaustive_caching_search(s);
        return py::make_tuple(result.best, result.report, result.candidates);
      },
      py::arg("scenario"));

  py::class_<oracle::StationaryDistribution>(m, "StationaryDistribution")
      .def_readonly("states", &oracle::StationaryDistribution::states)
      .def_readonly("frequency", &oracle::StationaryDistribution::frequency)
      .def_readonly("objective", &oracle::StationaryDistribution::objective);
  m.def("empirical_stationary_distribution", &oracle::empirical_stationary_distribution,
        py::arg("scenario"), py::arg("omega"), py::arg("steps"), py::arg("seed"));

  py::class_<oracle::ConvexityReport>(m, "ConvexityReport")
      .def_readonly("chords", &oracle::ConvexityReport::chords)
      .def_readonly("midpoint_violations", &oracle::ConvexityReport::midpoint_violations)
      .def_readonly("max_midpoint_gap", &oracle::ConvexityReport::max_midpoint_gap)
      .def_readonly("hessian_checks", &oracle::ConvexityReport::hessian_checks)
      .def_readonly("max_hessian_rel_err", &oracle::ConvexityReport::max_hessian_rel_err)
      .def("ok", &oracle::ConvexityReport::ok);
  m.def("convexity_probe", &oracle::convexity_probe, py::arg("scenario"), py::arg("caching"),
        py::arg("trials"), py::arg("seed"));
}
