#pragma once

#include <vector>

#include "edgeopt/model.hpp"

namespace edgeopt::waterfill {

// Which penalty multiplies the cloud share in the stationary-point formula.
// WeightTimesArrival matches the objective actually minimized (w_s * lambda_os
// * A_s); BareWeight reproduces the multiplier map with w_s alone.
enum class CloudPenalty { WeightTimesArrival, BareWeight };

struct Options {
  double xi = 1e-9;     // bisection stops when the bracket is narrower than this
  int max_bisect = 200;
  bool local_only = false;  // cap each node at its own arrivals (no LAN offload)
  CloudPenalty cloud_penalty = CloudPenalty::WeightTimesArrival;
};

// Everything the per-service solve needs, with non-caching nodes dropped.
struct ServiceContext {
  int service = -1;
  double total_arrival = 0;           // A_s
  std::vector<int> node_ids;          // caching nodes only
  std::vector<double> mu;             // tasks/s
  std::vector<double> local_arrival;  // A_ns
  std::vector<double> lan_delay;      // d_n
  std::vector<double> share_cap;      // pi_ns / A_s
  double cloud_rate = 0;              // B_s / (t_s * beta_s)
  double cloud_share_cap = 0;         // pi_os / A_s
  double cloud_weight = 0;            // W_s used in the cloud stationary point
};

ServiceContext make_service_context(const Scenario& scenario, const CachingPolicy& caching,
                                    const Allocation& allocation, int service,
                                    const Options& options = {});

// Unconstrained stationary share of one edge node for multiplier eta < 0.
// Piecewise: offloading-active branch, the kink at A_ns/A_s, and the
// local-only branch. The result is not clamped; values outside [0, cap] are
// the caller's signal to clamp. When mu <= A_ns the kink is outside the
// stable region and only the local-only branch applies.
double lambda_edge_of_eta(double eta, double mu, double local_arrival, double total_arrival,
                          double lan_delay);

// Unconstrained stationary cloud share. Returns -infinity when the penalty
// gradient is positive everywhere (cloud_weight + eta >= 0); callers clamp
// that to 0.
double lambda_cloud_of_eta(double eta, double cloud_rate, double total_arrival,
                           double cloud_weight);

// Sum of clamped shares minus one; nonincreasing in eta.
double excess(double eta, const ServiceContext& ctx);

struct EtaBracket {
  double lo = 0;  // excess(lo) > 0
  double hi = 0;  // excess(hi) < 0
  int doublings = 0;
};

// hi starts at -1e-12 where every share clamps to zero; lo doubles downward
// from -1 until the excess turns positive. Throws InfeasibleError when the
// aggregate capacity cannot absorb the service demand.
EtaBracket bracket_eta(const ServiceContext& ctx);

struct ServiceSolveResult {
  double eta = 0;
  std::vector<double> shares;  // aligned with ctx.node_ids
  double cloud_share = 0;
  double residual = 0;  // |sum of shares - 1| after the final adjustment
  int bisection_iters = 0;
  double bracket_width = 0;
  int bracket_doublings = 0;
};

// Bisection on eta until the bracket is narrower than options.xi, then the
// leftover simplex residual is spread over coordinates strictly inside their
// bounds, proportionally to their shares.
ServiceSolveResult solve_service(const ServiceContext& ctx, const Options& options = {});

struct P2Result {
  bool feasible = false;
  SolveReport report;
  std::vector<int> infeasible_services;
};

// Per-service decomposition of the scheduling subproblem. Zero-arrival
// services are skipped (their row is all-cloud by convention).
P2Result try_solve_p2(const Scenario& scenario, const CachingPolicy& caching,
                      const Options& options = {});

// Throwing variant; the InfeasibleError carries the offending service ids.
SolveReport solve_p2(const Scenario& scenario, const CachingPolicy& caching,
                     const Options& options = {});

}  // namespace edgeopt::waterfill
