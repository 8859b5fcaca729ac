#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace edgeopt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configuration (caching policy, schedule, or load) that cannot be served
// within the queue-stability and bandwidth limits.
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what, std::vector<int> services = {})
      : Error(what), services_(std::move(services)) {}
  const std::vector<int>& services() const { return services_; }

 private:
  std::vector<int> services_;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

// One service type offered by the system.
struct Service {
  double storage_req = 0;       // GB needed to cache the service at a node
  double compute_req = 0;       // mean giga-cycles per task
  double data_ratio = 0;        // Mb transferred per giga-cycle outsourced
  double core_bandwidth = 0;    // Mbps available toward the cloud
  double outsource_weight = 0;  // penalty weight per outsourced task/s
  bool operator==(const Service&) const = default;
};

struct EdgeNode {
  double storage_cap = 0;  // GB
  double compute_cap = 0;  // giga-cycles per second
  double lan_delay = 0;    // seconds per task offloaded to this node over LAN
  bool operator==(const EdgeNode&) const = default;
};

// Undirected connectivity between edge nodes. Adjacency lists are kept
// sorted; symmetry and absence of self-loops are validated.
struct Topology {
  std::vector<std::vector<int>> neighbors;

  int n_nodes() const { return static_cast<int>(neighbors.size()); }
  bool connected(int a, int b) const;
  void validate() const;
  bool operator==(const Topology&) const = default;
};

// A full problem instance.
struct Scenario {
  std::vector<EdgeNode> nodes;
  std::vector<Service> services;
  std::vector<double> arrivals;  // row-major N x S, tasks/s
  Topology topology;
  double epsilon = 1e-3;  // queue-stability margin, tasks/s

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_services() const { return static_cast<int>(services.size()); }
  double arrival(int node, int service) const {
    return arrivals[static_cast<std::size_t>(node) * services.size() + service];
  }
  double& arrival(int node, int service) {
    return arrivals[static_cast<std::size_t>(node) * services.size() + service];
  }
  // A_s: system-wide arrival rate of one service.
  double total_arrival(int service) const;
  // Arrivals reachable by node n for a service: its own plus its LAN neighbors'.
  double reachable_arrival(int node, int service) const;
  void validate() const;  // throws Error on any violated invariant
  bool operator==(const Scenario&) const = default;
};

// Binary caching matrix c_ns.
struct CachingPolicy {
  int node_count = 0;
  int service_count = 0;
  std::vector<std::uint8_t> cached;  // row-major N x S

  CachingPolicy() = default;
  CachingPolicy(int nodes, int services)
      : node_count(nodes),
        service_count(services),
        cached(static_cast<std::size_t>(nodes) * services, 0) {}

  bool at(int node, int service) const {
    return cached[static_cast<std::size_t>(node) * service_count + service] != 0;
  }
  void set(int node, int service, bool value) {
    cached[static_cast<std::size_t>(node) * service_count + service] = value ? 1 : 0;
  }
  int cached_count(int node) const;
  void set_row(int node, const std::vector<std::uint8_t>& decision);
  std::vector<std::uint8_t> row(int node) const;
  bool operator==(const CachingPolicy&) const = default;
};

// Fractional workload split lambda_ns; row `node_count` holds the cloud share.
struct SchedulingPolicy {
  int node_count = 0;
  int service_count = 0;
  std::vector<double> shares;  // row-major (N+1) x S

  SchedulingPolicy() = default;
  SchedulingPolicy(int nodes, int services)
      : node_count(nodes),
        service_count(services),
        shares(static_cast<std::size_t>(nodes + 1) * services, 0.0) {}

  double at(int node, int service) const {
    return shares[static_cast<std::size_t>(node) * service_count + service];
  }
  double& at(int node, int service) {
    return shares[static_cast<std::size_t>(node) * service_count + service];
  }
  double cloud(int service) const { return at(node_count, service); }
  double& cloud(int service) { return at(node_count, service); }
  bool operator==(const SchedulingPolicy&) const = default;
};

// How a node divides its compute among the services it caches.
enum class AllocationRule {
  EqualSplit,  // r_ns = R_n / |cached services at n|
};

// Compute rates r_ns and the resulting per-service rates mu_ns = r_ns / beta_s.
struct Allocation {
  int node_count = 0;
  int service_count = 0;
  std::vector<double> compute_rate;  // r_ns, giga-cycles/s
  std::vector<double> service_rate;  // mu_ns, tasks/s

  double r(int node, int service) const {
    return compute_rate[static_cast<std::size_t>(node) * service_count + service];
  }
  double mu(int node, int service) const {
    return service_rate[static_cast<std::size_t>(node) * service_count + service];
  }
};

Allocation compute_allocation(const Scenario& scenario, const CachingPolicy& caching,
                              AllocationRule rule = AllocationRule::EqualSplit);

// M/M/1 sojourn time 1/(mu - lambda*A). Throws InfeasibleError when the
// scheduled load reaches the service rate.
double edge_queue_delay(double mu, double share, double total_arrival);

// Effective service rate of the core-network pipe, B_s / (t_s * beta_s).
double cloud_service_rate(const Service& service);

// Core-network transmission delay 1/(M - lambda_os*A). Throws on overload.
double cloud_delay(const Service& service, double cloud_share, double total_arrival);

// Expected response time D_s of one service under a schedule: queueing at
// every caching node, LAN transfer for the offloaded fraction, and the
// core-network delay for the outsourced fraction. Nodes not caching the
// service (mu == 0) are skipped. Zero-arrival services return 0.
double service_response_time(const Scenario& scenario, int service,
                             const SchedulingPolicy& schedule, const Allocation& allocation);

// Objective value: sum over services of D_s + w_s * lambda_os * A_s.
// Services with A_s = 0 contribute nothing.
double objective(const Scenario& scenario, const CachingPolicy& caching,
                 const SchedulingPolicy& schedule);
double objective(const Scenario& scenario, const CachingPolicy& caching,
                 const SchedulingPolicy& schedule, const Allocation& allocation);

struct FeasibilityReport {
  bool ok = true;
  std::vector<std::string> violations;
};

// Storage check: sum of cached storage per node within capacity.
FeasibilityReport check_caching_feasible(const Scenario& scenario, const CachingPolicy& caching);

// Scheduling upper bounds in tasks/s: pi_ns limits each node by both the
// demand reachable over LAN and its stability margin; pi_os limits the cloud
// by core bandwidth. Non-caching nodes get 0.
struct ScheduleBounds {
  int node_count = 0;
  int service_count = 0;
  std::vector<double> edge;   // pi_ns, row-major N x S
  std::vector<double> cloud;  // pi_os per service

  double at(int node, int service) const {
    return edge[static_cast<std::size_t>(node) * service_count + service];
  }
};

ScheduleBounds scheduling_upper_bounds(const Scenario& scenario, const Allocation& allocation);

// Verifies simplex sums, box bounds, nonnegativity, and that nothing is
// scheduled onto nodes that do not cache the service. When `bounds` is null
// the cooperative bounds are computed from the allocation.
FeasibilityReport check_schedule_feasible(const Scenario& scenario, const CachingPolicy& caching,
                                          const SchedulingPolicy& schedule,
                                          const ScheduleBounds* bounds = nullptr);

// Per-service bisection diagnostics plus whatever the outer search adds.
struct SolveDiagnostics {
  std::vector<int> bisection_iters;     // per service; 0 for skipped services
  std::vector<double> bracket_widths;   // eta_hi - eta_lo at bisection start
  std::vector<int> bracket_doublings;   // doublings used to find eta_lo
  int outer_iterations = 0;             // Gibbs iterations for chain-based solvers
};

struct SolveReport {
  double objective = 0;
  std::vector<double> response_time;     // D_s per service, seconds
  std::vector<double> outsourcing_rate;  // lambda_os * A_s per service, tasks/s
  SchedulingPolicy schedule;
  CachingPolicy caching;
  SolveDiagnostics diagnostics;

  double total_response_time() const;
  double total_outsourcing() const;
};

}  // namespace edgeopt
