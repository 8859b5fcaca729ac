#include "edgeopt/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace edgeopt {

namespace {

std::string describe(const char* what, int node, int service, double lhs, double rhs) {
  std::ostringstream os;
  os << what << " at node " << node << ", service " << service << ": " << lhs << " vs " << rhs;
  return os.str();
}

}  // namespace

bool Topology::connected(int a, int b) const {
  const auto& adj = neighbors[a];
  return std::binary_search(adj.begin(), adj.end(), b);
}

void Topology::validate() const {
  const int n = n_nodes();
  for (int a = 0; a < n; ++a) {
    const auto& adj = neighbors[a];
    if (!std::is_sorted(adj.begin(), adj.end())) {
      throw Error("topology: adjacency list of node " + std::to_string(a) + " is not sorted");
    }
    if (std::adjacent_find(adj.begin(), adj.end()) != adj.end()) {
      throw Error("topology: duplicate edge at node " + std::to_string(a));
    }
    for (int b : adj) {
      if (b < 0 || b >= n) {
        throw Error("topology: neighbor index " + std::to_string(b) + " out of range");
      }
      if (b == a) {
        throw Error("topology: node " + std::to_string(a) + " is its own neighbor");
      }
      if (!connected(b, a)) {
        throw Error("topology: edge " + std::to_string(a) + "-" + std::to_string(b) +
                    " is not symmetric");
      }
    }
  }
}

double Scenario::total_arrival(int service) const {
  double total = 0;
  for (int n = 0; n < n_nodes(); ++n) total += arrival(n, service);
  return total;
}

double Scenario::reachable_arrival(int node, int service) const {
  double total = arrival(node, service);
  for (int m : topology.neighbors[node]) total += arrival(m, service);
  return total;
}

void Scenario::validate() const {
  if (nodes.empty()) throw Error("scenario: no edge nodes");
  if (services.empty()) throw Error("scenario: no services");
  if (!(epsilon > 0)) throw Error("scenario: epsilon must be positive");
  if (arrivals.size() != nodes.size() * services.size()) {
    throw Error("scenario: arrival matrix must be N x S");
  }
  if (topology.n_nodes() != n_nodes()) {
    throw Error("scenario: topology size does not match node count");
  }
  for (int n = 0; n < n_nodes(); ++n) {
    const auto& node = nodes[n];
    if (!(node.storage_cap > 0)) throw Error("scenario: node " + std::to_string(n) +
                                             " storage capacity must be positive");
    if (!(node.compute_cap > 0)) throw Error("scenario: node " + std::to_string(n) +
                                             " compute capacity must be positive");
    if (node.lan_delay < 0) throw Error("scenario: node " + std::to_string(n) +
                                        " LAN delay must be nonnegative");
  }
  for (int s = 0; s < n_services(); ++s) {
    const auto& svc = services[s];
    if (!(svc.storage_req > 0)) throw Error("scenario: service " + std::to_string(s) +
                                            " storage requirement must be positive");
    if (!(svc.compute_req > 0)) throw Error("scenario: service " + std::to_string(s) +
                                            " compute requirement must be positive");
    if (!(svc.data_ratio > 0)) throw Error("scenario: service " + std::to_string(s) +
                                           " data ratio must be positive");
    if (!(svc.core_bandwidth > 0)) throw Error("scenario: service " + std::to_string(s) +
                                               " core bandwidth must be positive");
    if (svc.outsource_weight < 0) throw Error("scenario: service " + std::to_string(s) +
                                              " outsource weight must be nonnegative");
  }
  for (double a : arrivals) {
    if (a < 0 || !std::isfinite(a)) throw Error("scenario: arrival rates must be finite and >= 0");
  }
  topology.validate();
}

int CachingPolicy::cached_count(int node) const {
  int count = 0;
  for (int s = 0; s < service_count; ++s) count += at(node, s) ? 1 : 0;
  return count;
}

void CachingPolicy::set_row(int node, const std::vector<std::uint8_t>& decision) {
  std::copy(decision.begin(), decision.end(),
            cached.begin() + static_cast<std::size_t>(node) * service_count);
}

std::vector<std::uint8_t> CachingPolicy::row(int node) const {
  const auto begin = cached.begin() + static_cast<std::size_t>(node) * service_count;
  return {begin, begin + service_count};
}

Allocation compute_allocation(const Scenario& scenario, const CachingPolicy& caching,
                              AllocationRule rule) {
  (void)rule;  // EqualSplit is the only rule so far
  const int n_nodes = scenario.n_nodes();
  const int n_services = scenario.n_services();
  Allocation alloc;
  alloc.node_count = n_nodes;
  alloc.service_count = n_services;
  alloc.compute_rate.assign(static_cast<std::size_t>(n_nodes) * n_services, 0.0);
  alloc.service_rate.assign(static_cast<std::size_t>(n_nodes) * n_services, 0.0);
  for (int n = 0; n < n_nodes; ++n) {
    const int count = caching.cached_count(n);
    if (count == 0) continue;
    const double rate = scenario.nodes[n].compute_cap / count;
    for (int s = 0; s < n_services; ++s) {
      if (!caching.at(n, s)) continue;
      const std::size_t idx = static_cast<std::size_t>(n) * n_services + s;
      alloc.compute_rate[idx] = rate;
      alloc.service_rate[idx] = rate / scenario.services[s].compute_req;
    }
  }
  return alloc;
}

double edge_queue_delay(double mu, double share, double total_arrival) {
  const double load = share * total_arrival;
  if (load >= mu) {
    throw InfeasibleError("edge queue unstable: load " + std::to_string(load) +
                          " >= service rate " + std::to_string(mu));
  }
  return 1.0 / (mu - load);
}

double cloud_service_rate(const Service& service) {
  return service.core_bandwidth / (service.data_ratio * service.compute_req);
}

double cloud_delay(const Service& service, double cloud_share, double total_arrival) {
  const double rate = cloud_service_rate(service);
  const double load = cloud_share * total_arrival;
  if (load >= rate) {
    throw InfeasibleError("core network overloaded: load " + std::to_string(load) +
                          " >= bandwidth-limited rate " + std::to_string(rate));
  }
  return 1.0 / (rate - load);
}

double service_response_time(const Scenario& scenario, int service,
                             const SchedulingPolicy& schedule, const Allocation& allocation) {
  const double total = scenario.total_arrival(service);
  if (total <= 0) return 0.0;
  double response = 0;
  for (int n = 0; n < scenario.n_nodes(); ++n) {
    const double mu = allocation.mu(n, service);
    if (mu <= 0) continue;  // not cached here
    const double share = schedule.at(n, service);
    response += share * edge_queue_delay(mu, share, total);
    const double offloaded = share * total - scenario.arrival(n, service);
    if (offloaded > 0) {
      response += offloaded / total * scenario.nodes[n].lan_delay;
    }
  }
  const double cloud_share = schedule.cloud(service);
  response += cloud_share * cloud_delay(scenario.services[service], cloud_share, total);
  return response;
}

double objective(const Scenario& scenario, const CachingPolicy& caching,
                 const SchedulingPolicy& schedule, const Allocation& allocation) {
  double value = 0;
  for (int s = 0; s < scenario.n_services(); ++s) {
    const double total = scenario.total_arrival(s);
    if (total <= 0) continue;
    value += service_response_time(scenario, s, schedule, allocation);
    value += scenario.services[s].outsource_weight * schedule.cloud(s) * total;
  }
  (void)caching;
  return value;
}

double objective(const Scenario& scenario, const CachingPolicy& caching,
                 const SchedulingPolicy& schedule) {
  return objective(scenario, caching, schedule, compute_allocation(scenario, caching));
}

FeasibilityReport check_caching_feasible(const Scenario& scenario, const CachingPolicy& caching) {
  FeasibilityReport report;
  for (int n = 0; n < scenario.n_nodes(); ++n) {
    double used = 0;
    for (int s = 0; s < scenario.n_services(); ++s) {
      if (caching.at(n, s)) used += scenario.services[s].storage_req;
    }
    if (used > scenario.nodes[n].storage_cap) {
      report.ok = false;
      report.violations.push_back(
          describe("storage capacity exceeded", n, -1, used, scenario.nodes[n].storage_cap));
    }
  }
  return report;
}

ScheduleBounds scheduling_upper_bounds(const Scenario& scenario, const Allocation& allocation) {
  const int n_nodes = scenario.n_nodes();
  const int n_services = scenario.n_services();
  ScheduleBounds bounds;
  bounds.node_count = n_nodes;
  bounds.service_count = n_services;
  bounds.edge.assign(static_cast<std::size_t>(n_nodes) * n_services, 0.0);
  bounds.cloud.assign(n_services, 0.0);
  for (int s = 0; s < n_services; ++s) {
    bounds.cloud[s] = cloud_service_rate(scenario.services[s]) - scenario.epsilon;
    for (int n = 0; n < n_nodes; ++n) {
      const double mu = allocation.mu(n, s);
      if (mu <= 0) continue;
      const double bound =
          std::min(scenario.reachable_arrival(n, s), mu - scenario.epsilon);
      bounds.edge[static_cast<std::size_t>(n) * n_services + s] = std::max(0.0, bound);
    }
  }
  return bounds;
}

FeasibilityReport check_schedule_feasible(const Scenario& scenario, const CachingPolicy& caching,
                                          const SchedulingPolicy& schedule,
                                          const ScheduleBounds* bounds) {
  FeasibilityReport report;
  ScheduleBounds computed;
  if (bounds == nullptr) {
    computed = scheduling_upper_bounds(scenario, compute_allocation(scenario, caching));
    bounds = &computed;
  }
  const double sum_tol = 1e-9;
  for (int s = 0; s < scenario.n_services(); ++s) {
    const double total = scenario.total_arrival(s);
    if (total <= 0) continue;  // excluded from scheduling
    double sum = 0;
    for (int n = 0; n <= scenario.n_nodes(); ++n) {
      const double share = schedule.at(n, s);
      sum += share;
      if (share < 0) {
        report.ok = false;
        report.violations.push_back(describe("negative share", n, s, share, 0.0));
      }
    }
    if (std::abs(sum - 1.0) > sum_tol) {
      report.ok = false;
      report.violations.push_back(describe("shares do not sum to 1", -1, s, sum, 1.0));
    }
    for (int n = 0; n < scenario.n_nodes(); ++n) {
      const double share = schedule.at(n, s);
      if (!caching.at(n, s) && share > 0) {
        report.ok = false;
        report.violations.push_back(describe("share at non-caching node", n, s, share, 0.0));
        continue;
      }
      const double load = share * total;
      const double cap = bounds->at(n, s);
      if (load > cap + sum_tol * std::max(1.0, cap)) {
        report.ok = false;
        report.violations.push_back(describe("edge bound exceeded", n, s, load, cap));
      }
    }
    const double cloud_load = schedule.cloud(s) * total;
    const double cloud_cap = bounds->cloud[s];
    if (cloud_load > cloud_cap + sum_tol * std::max(1.0, cloud_cap)) {
      report.ok = false;
      report.violations.push_back(describe("cloud bound exceeded", -1, s, cloud_load, cloud_cap));
    }
  }
  return report;
}

double SolveReport::total_response_time() const {
  return std::accumulate(response_time.begin(), response_time.end(), 0.0);
}

double SolveReport::total_outsourcing() const {
  return std::accumulate(outsourcing_rate.begin(), outsourcing_rate.end(), 0.0);
}

}  // namespace edgeopt
