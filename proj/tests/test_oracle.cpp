#include <cmath>

#include <doctest.h>

#include "edgeopt/baselines.hpp"
#include "edgeopt/oracle.hpp"
#include "edgeopt/rng.hpp"
#include "test_util.hpp"

using namespace edgeopt;
using namespace edgeopt::oracle;
using testutil::make_scenario;
using testutil::node;
using testutil::service;

TEST_CASE("reference solver reproduces the forced all-cloud closed form") {
  // Storage below every requirement: lambda_os = 1 is the only feasible point.
  const Scenario s = make_scenario({node(10, 10)}, {service(20, 1.0, 1.0, 4, 0.5)}, {2});
  const SolveReport report = solve_p2_reference(s, CachingPolicy(1, 1));
  CHECK(report.objective == doctest::Approx(1.0 / (4 - 2) + 0.5 * 2).epsilon(1e-8));
  CHECK(report.schedule.cloud(0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("reference solver agrees with an independent 1-D line search") {
  // One caching node plus the cloud: the simplex leaves a single free share.
  const Scenario s = make_scenario({node(100, 20)}, {service(20, 0.5, 0.5, 30, 5e-3)}, {30});
  CachingPolicy caching(1, 1);
  caching.set(0, 0, true);
  const Allocation alloc = compute_allocation(s, caching);
  const double mu = alloc.mu(0, 0);  // 40 tasks/s
  const double total = 30, cloud_rate = cloud_service_rate(s.services[0]);
  auto value = [&](double local_share) {
    const double cloud_share = 1 - local_share;
    return local_share / (mu - local_share * total) +
           cloud_share / (cloud_rate - cloud_share * total) + 5e-3 * cloud_share * total;
  };
  // ternary search over the single degree of freedom
  double lo = 0, hi = std::min(1.0, (mu - s.epsilon) / total);
  for (int i = 0; i < 200; ++i) {
    const double a = lo + (hi - lo) / 3, b = hi - (hi - lo) / 3;
    if (value(a) < value(b)) {
      hi = b;
    } else {
      lo = a;
    }
  }
  const double expected = value(0.5 * (lo + hi));
  const SolveReport report = solve_p2_reference(s, caching);
  CHECK(report.objective == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("exhaustive search candidate counts") {
  SUBCASE("one node, both services fit") {
    const Scenario s = make_scenario(
        {node(200, 20)}, {service(60, 0.5, 0.5, 80, 1e-3), service(50, 0.5, 0.5, 80, 1e-3)},
        {5, 4});
    CHECK(exhaustive_caching_search(s).candidates == 4);
  }
  SUBCASE("three nodes with three decisions each") {
    const Scenario s = make_scenario(
        {node(100, 20), node(100, 20), node(100, 20)},
        {service(60, 0.5, 0.5, 80, 1e-3), service(50, 0.5, 0.5, 80, 1e-3)},
        {5, 4, 3, 2, 2, 1}, TopologyKind::fully_connected());
    CHECK(exhaustive_caching_search(s).candidates == 27);
  }
  SUBCASE("limit guard") {
    const Scenario s = make_scenario(
        {node(100, 20), node(100, 20), node(100, 20)},
        {service(60, 0.5, 0.5, 80, 1e-3), service(50, 0.5, 0.5, 80, 1e-3)},
        {5, 4, 3, 2, 2, 1}, TopologyKind::fully_connected());
    CHECK_THROWS_AS(exhaustive_caching_search(s, {}, 10), Error);
  }
}

TEST_CASE("exhaustive ties resolve to the lexicographically smallest matrix") {
  // Tiny compute and a fast cheap cloud: caching never helps, so every
  // policy yields the same all-cloud objective and the empty matrix wins.
  const Scenario s =
      make_scenario({node(200, 0.1)}, {service(60, 1.0, 0.1, 500, 0), service(50, 1.0, 0.1, 500, 0)},
                    {3, 2});
  const ExhaustiveResult result = exhaustive_caching_search(s);
  CHECK(result.candidates == 4);
  CHECK(result.best == CachingPolicy(1, 2));
}

TEST_CASE("exhaustive optimum lower-bounds seeded chain searches") {
  const Scenario s = testutil::small_search_instance();
  const ExhaustiveResult ex = exhaustive_caching_search(s);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ice::IceConfig config;
    config.max_iters = 400;
    config.rng_seed = seed;
    const ice::IceResult run = ice::run_ice(s, config);
    CHECK(ex.report.objective <= run.report.objective + 1e-9);
  }
}

TEST_CASE("two states with equal objectives are visited evenly") {
  // Single node; only the zero-arrival service fits, so caching it changes
  // nothing and both states share the same objective.
  const Scenario s = make_scenario(
      {node(60, 10)}, {service(100, 1.0, 1.0, 40, 1e-3), service(50, 1.0, 1.0, 40, 1e-3)},
      {8, 0});
  const StationaryDistribution dist = empirical_stationary_distribution(s, 0.05, 20000, 7);
  REQUIRE(dist.states.size() == 2);
  CHECK(dist.objective[0] == doctest::Approx(dist.objective[1]).epsilon(1e-12));
  CHECK(dist.frequency[0] == doctest::Approx(0.5).epsilon(0.04));
  CHECK(dist.frequency[1] == doctest::Approx(0.5).epsilon(0.04));
}

namespace {

double tv_to_boltzmann(const StationaryDistribution& dist, double omega) {
  double y_min = dist.objective[0];
  for (double y : dist.objective) y_min = std::min(y_min, y);
  double z = 0;
  std::vector<double> target(dist.objective.size());
  for (std::size_t i = 0; i < target.size(); ++i) {
    target[i] = std::exp(-(dist.objective[i] - y_min) / omega);
    z += target[i];
  }
  double tv = 0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    tv += std::abs(dist.frequency[i] - target[i] / z);
  }
  return tv / 2;
}

}  // namespace

TEST_CASE("chain visit frequencies match the Boltzmann law") {
  const Scenario s = testutil::tiny_chain_instance();
  const StationaryDistribution dist = empirical_stationary_distribution(s, 0.05, 200000, 12345);
  CHECK(dist.states.size() == 9);
  CHECK(tv_to_boltzmann(dist, 0.05) <= 0.05);
}

TEST_CASE("a huge temperature flattens the distribution") {
  const Scenario s = testutil::tiny_chain_instance();
  const double omega = 1e3;  // orders of magnitude above the objective spread
  const StationaryDistribution dist = empirical_stationary_distribution(s, omega, 100000, 9);
  CHECK(tv_to_boltzmann(dist, omega) <= 0.05);
  for (double f : dist.frequency) CHECK(f == doctest::Approx(1.0 / 9).epsilon(0.35));
}

TEST_CASE("convexity probe sees no midpoint violations") {
  const Scenario s = testutil::tiny_ice_instance();
  CachingPolicy caching(3, 2);
  caching.set(0, 0, true);
  caching.set(1, 1, true);
  caching.set(2, 1, true);
  const ConvexityReport report = convexity_probe(s, caching, 1000, 31);
  CHECK(report.chords == 1000);
  CHECK(report.midpoint_violations == 0);
  CHECK(report.hessian_checks > 0);
  CHECK(report.max_hessian_rel_err <= 1e-4);
  CHECK(report.ok());
}

TEST_CASE("water-filling matches the reference on random desk instances") {
  Rng rng(2024);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GenParams params;
    params.n_nodes = 1 + static_cast<int>(uniform_index(rng, 4));
    params.n_services = 1 + static_cast<int>(uniform_index(rng, 2));
    params.seed = seed * 131;
    params.node_arrival_tps = {4, 12};
    const Scenario s = generate(params);
    CachingPolicy caching(params.n_nodes, params.n_services);
    for (int n = 0; n < params.n_nodes; ++n) {
      const auto choices = ice::enumerate_feasible_decisions(s, n);
      caching.set_row(n, choices[uniform_index(rng, choices.size())]);
    }
    const SolveReport wf = waterfill::solve_p2(s, caching);
    const SolveReport ref = solve_p2_reference(s, caching);
    CHECK(std::abs(wf.objective - ref.objective) <=
          1e-6 * std::max(1e-12, std::abs(ref.objective)));
  }
}

TEST_CASE("both solvers reject an infeasible instance") {
  const Scenario s = make_scenario({node(10, 10)}, {service(20, 1.0, 1.0, 1, 0)}, {10});
  const CachingPolicy none(1, 1);
  CHECK_THROWS_AS(waterfill::solve_p2(s, none), InfeasibleError);
  CHECK_THROWS_AS(solve_p2_reference(s, none), InfeasibleError);
}
