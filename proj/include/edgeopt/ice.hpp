#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "edgeopt/model.hpp"
#include "edgeopt/rng.hpp"
#include "edgeopt/waterfill.hpp"

namespace edgeopt::ice {

struct IceConfig {
  double omega = 1e-6;     // smoothing temperature
  int max_iters = 3000;
  int stall_window = 300;  // stop after this many iterations without improvement
  double stall_tol = 1e-8;
  std::uint64_t rng_seed = 0;
};

struct TraceRecord {
  int iter = 0;
  int node = -1;
  std::vector<std::uint8_t> proposal;  // proposed caching row for the node
  double y = 0;       // objective of the state the step started from
  double y_star = 0;  // objective of the proposal (+inf when unschedulable)
  double rho = 0;
  bool accepted = false;
  double best = 0;  // best objective seen after this step
};

using Trace = std::vector<TraceRecord>;

// All storage-feasible caching vectors of one node, in ascending bitmask
// order (bit s = service s).
std::vector<std::vector<std::uint8_t>> enumerate_feasible_decisions(const Scenario& scenario,
                                                                    int node);

// 1 / (1 + exp((y_star - y) / omega)), saturated once the exponent passes
// +-700 so extreme objective gaps cannot overflow.
double acceptance_probability(double y, double y_star, double omega);

// One Gibbs chain over caching policies: uniform node pick, uniform feasible
// decision pick, Boltzmann acceptance on the scheduling optimum. Objectives
// are memoized per policy since the chain revisits states constantly.
class GibbsChain {
 public:
  GibbsChain(const Scenario& scenario, const IceConfig& config,
             waterfill::Options solve_options = {});

  TraceRecord step();

  const CachingPolicy& state() const { return state_; }
  double state_objective() const { return state_objective_; }
  const CachingPolicy& best_policy() const { return best_policy_; }
  double best_objective() const { return best_objective_; }
  int iterations() const { return iterations_; }
  const std::vector<std::vector<std::vector<std::uint8_t>>>& decisions() const {
    return decisions_;
  }

 private:
  // NaN marks a policy whose scheduling subproblem is infeasible.
  double evaluate(const CachingPolicy& policy);

  const Scenario& scenario_;
  IceConfig config_;
  waterfill::Options solve_options_;
  std::vector<std::vector<std::vector<std::uint8_t>>> decisions_;
  Rng rng_;
  CachingPolicy state_;
  double state_objective_ = 0;
  CachingPolicy best_policy_;
  double best_objective_ = 0;
  int iterations_ = 0;
  std::unordered_map<std::string, double> memo_;
};

struct IceResult {
  SolveReport report;  // best-so-far policy, re-solved
  Trace trace;
};

// Starts from the empty caching policy and runs the chain until max_iters or
// until the best objective stalls. Returns the best policy seen, not the
// final chain state.
IceResult run_ice(const Scenario& scenario, const IceConfig& config,
                  const waterfill::Options& solve_options = {});

void write_trace_csv(const Trace& trace, std::ostream& out);

}  // namespace edgeopt::ice
