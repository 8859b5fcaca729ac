#pragma once

#include <cstdint>
#include <vector>

#include "edgeopt/model.hpp"
#include "edgeopt/waterfill.hpp"

namespace edgeopt::oracle {

// Desk-scale reference solver: projected subgradient on the per-service
// objective over the box-bounded simplex, with its own projection routine.
// Shares no solution path with the water-filling solver.
struct ReferenceConfig {
  double step_size = 0;  // 0 picks 1e-3 * (initial objective)
  long max_iters = 200000;
  double tolerance = 1e-8;  // gradient-mapping stop threshold
};

SolveReport solve_p2_reference(const Scenario& scenario, const CachingPolicy& caching,
                               const ReferenceConfig& config = {},
                               const waterfill::Options& bounds_options = {});

struct ExhaustiveResult {
  CachingPolicy best;
  SolveReport report;
  long candidates = 0;
};

// Enumerates every storage-feasible caching matrix (ties resolved to the
// lexicographically smallest), solving the scheduling subproblem for each.
// Throws Error when the product space exceeds `limit`.
ExhaustiveResult exhaustive_caching_search(const Scenario& scenario,
                                           const waterfill::Options& solve_options = {},
                                           std::size_t limit = 1000000);

struct StationaryDistribution {
  std::vector<CachingPolicy> states;  // full feasible policy space
  std::vector<double> frequency;      // empirical visit frequency
  std::vector<double> objective;      // exact scheduling optimum per state
};

// Runs the pure Gibbs chain (no best-so-far shortcut) for `steps` counted
// iterations after a burn-in of steps/10 and reports visit frequencies.
// Requires the feasible policy space to hold at most 64 states.
StationaryDistribution empirical_stationary_distribution(const Scenario& scenario, double omega,
                                                         long steps, std::uint64_t seed);

struct ConvexityReport {
  int chords = 0;
  int midpoint_violations = 0;
  double max_midpoint_gap = 0;  // worst f(mid) - (f1+f2)/2 observed
  int hessian_checks = 0;
  double max_hessian_rel_err = 0;
  bool ok() const { return midpoint_violations == 0 && max_hessian_rel_err <= 1e-4; }
};

// Samples random feasible schedule pairs and tests midpoint convexity of the
// objective; also compares the analytic queue-term second derivative
// 2*mu*A / (mu - A*lambda)^3 against central finite differences.
ConvexityReport convexity_probe(const Scenario& scenario, const CachingPolicy& caching,
                                int trials, std::uint64_t seed);

}  // namespace edgeopt::oracle
