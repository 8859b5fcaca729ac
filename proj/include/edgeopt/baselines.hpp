#pragma once

#include "edgeopt/ice.hpp"
#include "edgeopt/model.hpp"

namespace edgeopt::baselines {

enum class BaselineKind { NonCooperation, Greedy };

// Gibbs-sampled caching as in the cooperative algorithm, but every node may
// only serve its own arrivals or push work to the cloud; the cloud pipe per
// service is still shared across nodes.
ice::IceResult run_noncooperation(const Scenario& scenario, const ice::IceConfig& config);

// Popularity-ranked first-fit caching: services ordered by total arrival
// mass (ties to the lower id), each node caches what still fits.
CachingPolicy greedy_caching(const Scenario& scenario);

// Greedy caching plus the local-or-cloud scheduling solve.
SolveReport run_greedy(const Scenario& scenario);

}  // namespace edgeopt::baselines
