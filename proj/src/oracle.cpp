#include "edgeopt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "edgeopt/ice.hpp"
#include "edgeopt/rng.hpp"

namespace edgeopt::oracle {

namespace {

// ---- reference solver -----------------------------------------------------

// Per-service view of the scheduling feasible set; index m = cloud.
struct ServiceProblem {
  double total_arrival = 0;
  std::vector<double> mu;       // edge coordinates only
  std::vector<double> local;    // A_ns
  std::vector<double> lan;      // d_n
  std::vector<double> cap;      // share upper bounds, cloud last
  double cloud_rate = 0;
  double weight = 0;            // w_s
  std::size_t size() const { return cap.size(); }
};

double service_value(const ServiceProblem& p, const std::vector<double>& x) {
  double value = 0;
  const double total = p.total_arrival;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const double load = x[i] * total;
    value += x[i] / (p.mu[i] - load);
    const double offloaded = load - p.local[i];
    if (offloaded > 0) value += offloaded / total * p.lan[i];
  }
  const double cloud = x.back();
  value += cloud / (p.cloud_rate - cloud * total);
  value += p.weight * cloud * total;
  return value;
}

// Subgradient; at the LAN kink the right derivative is used.
void service_subgradient(const ServiceProblem& p, const std::vector<double>& x,
                         std::vector<double>& grad) {
  const double total = p.total_arrival;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const double slack = p.mu[i] - x[i] * total;
    grad[i] = p.mu[i] / (slack * slack);
    if (x[i] * total >= p.local[i]) grad[i] += p.lan[i];
  }
  const double slack = p.cloud_rate - x.back() * total;
  grad.back() = p.cloud_rate / (slack * slack) + p.weight * total;
}

// Euclidean projection onto { sum x = 1, 0 <= x_i <= cap_i } by breakpoint
// search on the shift tau.
std::vector<double> project_box_simplex(const std::vector<double>& v,
                                        const std::vector<double>& cap) {
  const std::size_t m = v.size();
  double cap_sum = std::accumulate(cap.begin(), cap.end(), 0.0);
  if (cap_sum < 1.0) {
    throw InfeasibleError("projection: box capacity below the simplex requirement");
  }
  auto shifted_sum = [&](double tau) {
    double sum = 0;
    for (std::size_t i = 0; i < m; ++i) {
      sum += std::clamp(v[i] - tau, 0.0, cap[i]);
    }
    return sum;
  };
  std::vector<double> points;
  points.reserve(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    points.push_back(v[i]);
    points.push_back(v[i] - cap[i]);
  }
  std::sort(points.begin(), points.end());
  double lo = points.front(), hi = points.back();
  double sum_lo = shifted_sum(lo);  // = cap_sum >= 1
  double tau = 0;
  bool found = false;
  for (std::size_t k = 1; k < points.size(); ++k) {
    const double sum_k = shifted_sum(points[k]);
    if (sum_k <= 1.0) {
      hi = points[k];
      lo = points[k - 1];
      sum_lo = shifted_sum(lo);
      // linear between adjacent breakpoints
      const double sum_hi = sum_k;
      tau = sum_lo == sum_hi ? lo : lo + (sum_lo - 1.0) * (hi - lo) / (sum_lo - sum_hi);
      found = true;
      break;
    }
  }
  if (!found) tau = hi;  // sum stays above 1 until the last breakpoint
  std::vector<double> x(m);
  for (std::size_t i = 0; i < m; ++i) x[i] = std::clamp(v[i] - tau, 0.0, cap[i]);
  // One Newton-style cleanup pass: spread any tiny leftover over free coords.
  double leftover = 1.0 - std::accumulate(x.begin(), x.end(), 0.0);
  if (leftover != 0.0) {
    int free_count = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (x[i] > 0 && x[i] < cap[i]) ++free_count;
    }
    if (free_count > 0) {
      const double shift = leftover / free_count;
      for (std::size_t i = 0; i < m; ++i) {
        if (x[i] > 0 && x[i] < cap[i]) x[i] = std::clamp(x[i] + shift, 0.0, cap[i]);
      }
    }
  }
  return x;
}

// Cost of one coordinate as a function of its share; everything else in the
// objective is separable.
double coordinate_cost(const ServiceProblem& p, std::size_t i, double share) {
  const double total = p.total_arrival;
  if (i + 1 == p.size()) {
    return share / (p.cloud_rate - share * total) + p.weight * share * total;
  }
  double cost = share / (p.mu[i] - share * total);
  const double offloaded = share * total - p.local[i];
  if (offloaded > 0) cost += offloaded / total * p.lan[i];
  return cost;
}

// Exact 1-D minimization of a convex function on [lo, hi] by golden section;
// safe at kinks where derivatives jump.
template <typename F>
double golden_section(F&& f, double lo, double hi) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-14 * std::max(1.0, hi - lo) && b - a > 0) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

std::vector<double> solve_service_reference(const ServiceProblem& p,
                                            const ReferenceConfig& config) {
  const std::size_t m = p.size();
  std::vector<double> x(m, 0.0);
  x.back() = 1.0;
  x = project_box_simplex(x, p.cap);

  double f = service_value(p, x);
  const double t0 = config.step_size > 0 ? config.step_size : 1e-3 * std::max(1.0, f);
  std::vector<double> best_x = x;
  double best_f = f;
  std::vector<double> grad(m), trial(m);

  // Phase 1: diminishing-step projected subgradient toward the optimum basin.
  const long phase1 = std::min<long>(config.max_iters, 20000);
  for (long k = 0; k < phase1; ++k) {
    service_subgradient(p, x, grad);
    double norm = 0;
    for (double g : grad) norm = std::max(norm, std::abs(g));
    if (norm == 0) break;
    const double t = t0 / (norm * std::sqrt(static_cast<double>(k + 1)));
    for (std::size_t i = 0; i < m; ++i) trial[i] = x[i] - t * grad[i];
    x = project_box_simplex(trial, p.cap);
    f = service_value(p, x);
    if (f < best_f) {
      best_f = f;
      best_x = x;
    }
  }

  // Phase 2: cyclic two-coordinate exchange minimization. A single scalar
  // projected step cannot settle on the LAN kink, where the subdifferential
  // jumps; pairwise exchanges with golden-section line search are exact for
  // a separable convex objective on the box-bounded simplex.
  x = best_x;
  f = best_f;
  const int max_sweeps = 400;
  double sweep_gain = 0;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    sweep_gain = 0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (i == j) continue;
        const double room = std::min(x[i], p.cap[j] - x[j]);
        if (room <= 0) continue;
        const double base = coordinate_cost(p, i, x[i]) + coordinate_cost(p, j, x[j]);
        auto pair_cost = [&](double delta) {
          return coordinate_cost(p, i, x[i] - delta) + coordinate_cost(p, j, x[j] + delta);
        };
        const double delta = golden_section(pair_cost, 0.0, room);
        const double moved = pair_cost(delta);
        if (moved < base) {
          x[i] -= delta;
          x[j] += delta;
          sweep_gain += base - moved;
        }
      }
    }
    f = service_value(p, x);
    if (sweep_gain <= 1e-15 * std::max(1.0, f)) break;
  }
  if (sweep_gain > config.tolerance * std::max(1.0, f)) {
    throw SolverError("reference solver still improving after " + std::to_string(max_sweeps) +
                      " exchange sweeps; gain " + std::to_string(sweep_gain));
  }
  if (f > best_f) return best_x;
  return x;
}

// ---- policy-space enumeration ----------------------------------------------

std::vector<std::vector<std::vector<std::uint8_t>>> all_node_decisions(const Scenario& scenario) {
  std::vector<std::vector<std::vector<std::uint8_t>>> decisions;
  decisions.reserve(scenario.n_nodes());
  for (int n = 0; n < scenario.n_nodes(); ++n) {
    decisions.push_back(ice::enumerate_feasible_decisions(scenario, n));
  }
  return decisions;
}

double policy_space_size(const std::vector<std::vector<std::vector<std::uint8_t>>>& decisions) {
  double size = 1;
  for (const auto& d : decisions) size *= static_cast<double>(d.size());
  return size;
}

template <typename Visit>
void for_each_policy(const Scenario& scenario,
                     const std::vector<std::vector<std::vector<std::uint8_t>>>& decisions,
                     Visit&& visit) {
  const int n_nodes = scenario.n_nodes();
  std::vector<std::size_t> index(n_nodes, 0);
  CachingPolicy policy(n_nodes, scenario.n_services());
  for (int n = 0; n < n_nodes; ++n) policy.set_row(n, decisions[n][0]);
  while (true) {
    visit(policy);
    int n = n_nodes - 1;
    while (n >= 0) {
      if (++index[n] < decisions[n].size()) {
        policy.set_row(n, decisions[n][index[n]]);
        break;
      }
      index[n] = 0;
      policy.set_row(n, decisions[n][0]);
      --n;
    }
    if (n < 0) break;
  }
}

}  // namespace

SolveReport solve_p2_reference(const Scenario& scenario, const CachingPolicy& caching,
                               const ReferenceConfig& config,
                               const waterfill::Options& bounds_options) {
  if (scenario.n_nodes() > 8 || scenario.n_services() > 4) {
    throw Error("solve_p2_reference: desk-scale solver, at most 8 nodes and 4 services");
  }
  const auto storage = check_caching_feasible(scenario, caching);
  if (!storage.ok) {
    throw Error("solve_p2_reference: caching policy violates storage capacity");
  }
  const Allocation allocation = compute_allocation(scenario, caching);
  const int n_services = scenario.n_services();

  SolveReport report;
  report.schedule = SchedulingPolicy(scenario.n_nodes(), n_services);
  report.caching = caching;
  report.response_time.assign(n_services, 0.0);
  report.outsourcing_rate.assign(n_services, 0.0);
  std::vector<int> infeasible;

  for (int s = 0; s < n_services; ++s) {
    const double total = scenario.total_arrival(s);
    if (total <= 0) {
      report.schedule.cloud(s) = 1.0;
      continue;
    }
    const waterfill::ServiceContext ctx =
        waterfill::make_service_context(scenario, caching, allocation, s, bounds_options);
    ServiceProblem problem;
    problem.total_arrival = total;
    problem.mu = ctx.mu;
    problem.local = ctx.local_arrival;
    problem.lan = ctx.lan_delay;
    problem.cap = ctx.share_cap;
    problem.cap.push_back(ctx.cloud_share_cap);
    problem.cloud_rate = ctx.cloud_rate;
    problem.weight = scenario.services[s].outsource_weight;

    double cap_sum = std::accumulate(problem.cap.begin(), problem.cap.end(), 0.0);
    if (cap_sum < 1.0) {
      infeasible.push_back(s);
      continue;
    }
    const std::vector<double> shares = solve_service_reference(problem, config);
    for (std::size_t i = 0; i < ctx.node_ids.size(); ++i) {
      report.schedule.at(ctx.node_ids[i], s) = shares[i];
    }
    report.schedule.cloud(s) = shares.back();
  }
  if (!infeasible.empty()) {
    std::string what = "reference: P2 infeasible for service(s)";
    for (int s : infeasible) what += ' ' + std::to_string(s);
    throw InfeasibleError(what, infeasible);
  }
  for (int s = 0; s < n_services; ++s) {
    const double total = scenario.total_arrival(s);
    if (total <= 0) continue;
    report.response_time[s] = service_response_time(scenario, s, report.schedule, allocation);
    report.outsourcing_rate[s] = report.schedule.cloud(s) * total;
  }
  report.objective = objective(scenario, caching, report.schedule, allocation);
  return report;
}

ExhaustiveResult exhaustive_caching_search(const Scenario& scenario,
                                           const waterfill::Options& solve_options,
                                           std::size_t limit) {
  const auto decisions = all_node_decisions(scenario);
  const double space = policy_space_size(decisions);
  if (space > static_cast<double>(limit)) {
    throw Error("exhaustive_caching_search: policy space holds " + std::to_string(space) +
                " candidates, above the limit of " + std::to_string(limit));
  }
  ExhaustiveResult result;
  bool found = false;
  for_each_policy(scenario, decisions, [&](const CachingPolicy& policy) {
    ++result.candidates;
    waterfill::P2Result solved = waterfill::try_solve_p2(scenario, policy, solve_options);
    if (!solved.feasible) return;
    const double value = solved.report.objective;
    if (!found || value < result.report.objective ||
        (value == result.report.objective && policy.cached < result.best.cached)) {
      found = true;
      result.best = policy;
      result.report = std::move(solved.report);
    }
  });
  if (!found) {
    throw InfeasibleError("exhaustive_caching_search: no caching policy admits a schedule");
  }
  return result;
}

StationaryDistribution empirical_stationary_distribution(const Scenario& scenario, double omega,
                                                         long steps, std::uint64_t seed) {
  const auto decisions = all_node_decisions(scenario);
  const double space = policy_space_size(decisions);
  if (space > 64) {
    throw Error("empirical_stationary_distribution: policy space exceeds 64 states");
  }
  StationaryDistribution dist;
  std::unordered_map<std::string, std::size_t> index;
  for_each_policy(scenario, decisions, [&](const CachingPolicy& policy) {
    index.emplace(std::string(policy.cached.begin(), policy.cached.end()), dist.states.size());
    dist.states.push_back(policy);
  });
  dist.frequency.assign(dist.states.size(), 0.0);
  dist.objective.assign(dist.states.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < dist.states.size(); ++i) {
    const waterfill::P2Result solved = waterfill::try_solve_p2(scenario, dist.states[i]);
    if (solved.feasible) dist.objective[i] = solved.report.objective;
  }

  ice::IceConfig config;
  config.omega = omega;
  config.max_iters = std::numeric_limits<int>::max();
  config.rng_seed = seed;
  ice::GibbsChain chain(scenario, config);
  const long burn_in = steps / 10;
  for (long i = 0; i < burn_in; ++i) chain.step();
  for (long i = 0; i < steps; ++i) {
    chain.step();
    const auto& policy = chain.state();
    dist.frequency[index.at(std::string(policy.cached.begin(), policy.cached.end()))] += 1.0;
  }
  for (double& f : dist.frequency) f /= static_cast<double>(steps);
  return dist;
}

ConvexityReport convexity_probe(const Scenario& scenario, const CachingPolicy& caching,
                                int trials, std::uint64_t seed) {
  ConvexityReport report;
  const Allocation allocation = compute_allocation(scenario, caching);
  const int n_services = scenario.n_services();
  Rng rng(seed);

  // Per-service anchors: a feasible point to pull random simplex samples
  // toward whenever they breach a box bound.
  std::vector<waterfill::ServiceContext> contexts;
  std::vector<std::vector<double>> anchors;  // cloud share last
  std::vector<int> active;
  for (int s = 0; s < n_services; ++s) {
    if (scenario.total_arrival(s) <= 0) continue;
    waterfill::ServiceContext ctx =
        waterfill::make_service_context(scenario, caching, allocation, s);
    std::vector<double> anchor(ctx.node_ids.size() + 1, 0.0);
    if (ctx.cloud_share_cap >= 1.0) {
      anchor.back() = 1.0;
    } else {
      const waterfill::ServiceSolveResult solved = waterfill::solve_service(ctx);
      std::copy(solved.shares.begin(), solved.shares.end(), anchor.begin());
      anchor.back() = solved.cloud_share;
    }
    contexts.push_back(std::move(ctx));
    anchors.push_back(std::move(anchor));
    active.push_back(s);
  }
  if (active.empty()) return report;

  auto sample_schedule = [&](SchedulingPolicy& schedule) {
    for (std::size_t k = 0; k < contexts.size(); ++k) {
      const auto& ctx = contexts[k];
      const std::size_t m = ctx.node_ids.size() + 1;
      std::vector<double> x(m);
      double sum = 0;
      for (std::size_t i = 0; i < m; ++i) {
        x[i] = -std::log(1.0 - uniform_unit(rng));
        sum += x[i];
      }
      for (double& xi : x) xi /= sum;
      // Pull toward the anchor just enough to satisfy every upper bound.
      double t = 1.0;
      const auto& anchor = anchors[k];
      for (std::size_t i = 0; i < m; ++i) {
        const double cap = i + 1 < m ? ctx.share_cap[i] : ctx.cloud_share_cap;
        if (x[i] > cap) {
          t = std::min(t, 0.95 * (cap - anchor[i]) / (x[i] - anchor[i]));
        }
      }
      const int s = active[k];
      for (std::size_t i = 0; i < m; ++i) {
        const double value = anchor[i] + t * (x[i] - anchor[i]);
        if (i + 1 < m) {
          schedule.at(ctx.node_ids[i], s) = value;
        } else {
          schedule.cloud(s) = value;
        }
      }
    }
  };

  SchedulingPolicy a(scenario.n_nodes(), n_services), b = a, mid = a;
  for (int s = 0; s < n_services; ++s) {
    if (scenario.total_arrival(s) <= 0) {
      a.cloud(s) = b.cloud(s) = mid.cloud(s) = 1.0;
    }
  }
  for (int trial = 0; trial < trials; ++trial) {
    sample_schedule(a);
    sample_schedule(b);
    for (std::size_t i = 0; i < a.shares.size(); ++i) {
      mid.shares[i] = 0.5 * (a.shares[i] + b.shares[i]);
    }
    const double fa = objective(scenario, caching, a, allocation);
    const double fb = objective(scenario, caching, b, allocation);
    const double fm = objective(scenario, caching, mid, allocation);
    const double gap = fm - 0.5 * (fa + fb);
    report.max_midpoint_gap = std::max(report.max_midpoint_gap, gap);
    if (gap > 1e-9) ++report.midpoint_violations;
    ++report.chords;
  }

  // Analytic second derivative of the queue term vs central differences.
  const int checks = std::min(trials, 200);
  for (int check = 0; check < checks; ++check) {
    const auto& ctx = contexts[uniform_index(rng, contexts.size())];
    if (ctx.node_ids.empty()) continue;
    const std::size_t i = uniform_index(rng, ctx.node_ids.size());
    const double mu = ctx.mu[i];
    const double total = ctx.total_arrival;
    const double share = uniform_in(rng, 0.1, 0.9) * mu / total;
    const double slack = mu - share * total;
    const double analytic = 2.0 * mu * total / (slack * slack * slack);
    const double h = 3e-4 * slack / total;
    auto queue_term = [&](double lam) { return lam / (mu - lam * total); };
    const double fd =
        (queue_term(share + h) - 2.0 * queue_term(share) + queue_term(share - h)) / (h * h);
    const double rel = std::abs(fd - analytic) / analytic;
    report.max_hessian_rel_err = std::max(report.max_hessian_rel_err, rel);
    ++report.hessian_checks;
  }
  return report;
}

}  // namespace edgeopt::oracle
