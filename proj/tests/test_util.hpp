#pragma once
#include <algorithm>
#include <cmath>

#include <utility>
#include <vector>

#include "edgeopt/model.hpp"
#include "edgeopt/scenario.hpp"

namespace testutil {

inline edgeopt::EdgeNode node(double storage, double compute, double lan = 0.02) {
  return {storage, compute, lan};
}

inline edgeopt::Service service(double p, double beta, double t, double bandwidth, double w) {
  return {p, beta, t, bandwidth, w};
}

inline edgeopt::Scenario make_scenario(std::vector<edgeopt::EdgeNode> nodes,
                                       std::vector<edgeopt::Service> services,
                                       std::vector<double> arrivals,
                                       edgeopt::TopologyKind kind = edgeopt::TopologyKind::isolated(),
                                       double epsilon = 1e-3) {
  edgeopt::Scenario s;
  s.nodes = std::move(nodes);
  s.services = std::move(services);
  s.arrivals = std::move(arrivals);
  s.topology = edgeopt::build_topology(kind, static_cast<int>(s.nodes.size()));
  s.epsilon = epsilon;
  s.validate();
  return s;
}

// 3 nodes / 2 services, 18 feasible caching policies, cloud ample enough
// that every policy admits a schedule.
inline edgeopt::Scenario tiny_ice_instance() {
  return make_scenario(
      {node(100, 80), node(100, 60), node(55, 50)},
      {service(60, 0.2, 0.5, 40, 6e-4), service(50, 0.25, 0.5, 40, 6e-4)},
      {24, 16,  //
       18, 12,  //
       12, 8},
      edgeopt::TopologyKind::fully_connected());
}

// 2 nodes / 2 services, 9 feasible caching policies.
inline edgeopt::Scenario tiny_chain_instance() {
  return make_scenario(
      {node(100, 60), node(100, 40)},
      {service(60, 0.25, 0.5, 30, 1e-3), service(50, 0.3, 0.5, 30, 1e-3)},
      {16, 10,  //
       12, 9},
      edgeopt::TopologyKind::fully_connected());
}

// Generated 3-node / 2-service instance (27 feasible policies) whose
// objective landscape is descent-friendly, so low-omega chains reach the
// global optimum reliably.
inline edgeopt::Scenario small_search_instance() {
  edgeopt::GenParams params;
  params.n_nodes = 3;
  params.n_services = 2;
  params.seed = 11;
  params.node_arrival_tps = {15, 30};
  params.core_bandwidth_mbps = 40;
  return edgeopt::generate(params);
}

// Distance from -eta to the subdifferential of one coordinate's cost.
inline double edge_stationarity_residual(double share, double mu, double local, double total,
                                         double lan_delay, double eta) {
  const double load = share * total;
  const double slack = mu - load;
  const double base = mu / (slack * slack);
  const double kink_tol = 1e-9 * std::max(1.0, local);
  double lo = base, hi = base;
  if (load > local + kink_tol) {
    lo = hi = base + lan_delay;
  } else if (load >= local - kink_tol) {
    hi = base + lan_delay;  // subdifferential spans the LAN jump at the kink
  }
  const double target = -eta;
  if (target < lo) return lo - target;
  if (target > hi) return target - hi;
  return 0;
}

inline double cloud_stationarity_residual(double share, double cloud_rate, double total,
                                          double weight_term, double eta) {
  const double slack = cloud_rate - share * total;
  return std::abs(cloud_rate / (slack * slack) + weight_term + eta);
}

}  // namespace testutil
