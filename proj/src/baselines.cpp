#include "edgeopt/baselines.hpp"

#include <algorithm>
#include <numeric>

namespace edgeopt::baselines {

ice::IceResult run_noncooperation(const Scenario& scenario, const ice::IceConfig& config) {
  waterfill::Options options;
  options.local_only = true;
  return ice::run_ice(scenario, config, options);
}

CachingPolicy greedy_caching(const Scenario& scenario) {
  const int s_count = scenario.n_services();
  std::vector<int> order(s_count);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> mass(s_count);
  for (int s = 0; s < s_count; ++s) mass[s] = scenario.total_arrival(s);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return mass[a] > mass[b]; });

  CachingPolicy policy(scenario.n_nodes(), s_count);
  for (int n = 0; n < scenario.n_nodes(); ++n) {
    double remaining = scenario.nodes[n].storage_cap;
    for (int s : order) {
      const double need = scenario.services[s].storage_req;
      if (need <= remaining) {
        policy.set(n, s, true);
        remaining -= need;
      }
    }
  }
  return policy;
}

SolveReport run_greedy(const Scenario& scenario) {
  waterfill::Options options;
  options.local_only = true;
  return waterfill::solve_p2(scenario, greedy_caching(scenario), options);
}

}  // namespace edgeopt::baselines
