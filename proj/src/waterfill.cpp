#include "edgeopt/waterfill.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace edgeopt::waterfill {

namespace {

constexpr double kEtaHigh = -1e-12;
constexpr int kMaxDoublings = 60;

double clamp(double x, double lo, double hi) { return std::min(hi, std::max(lo, x)); }

}  // namespace

ServiceContext make_service_context(const Scenario& scenario, const CachingPolicy& caching,
                                    const Allocation& allocation, int service,
                                    const Options& options) {
  ServiceContext ctx;
  ctx.service = service;
  ctx.total_arrival = scenario.total_arrival(service);
  const Service& svc = scenario.services[service];
  ctx.cloud_rate = cloud_service_rate(svc);
  if (ctx.total_arrival <= 0) return ctx;

  for (int n = 0; n < scenario.n_nodes(); ++n) {
    if (!caching.at(n, service)) continue;
    const double mu = allocation.mu(n, service);
    const double reach = options.local_only ? scenario.arrival(n, service)
                                            : scenario.reachable_arrival(n, service);
    const double bound = std::max(0.0, std::min(reach, mu - scenario.epsilon));
    ctx.node_ids.push_back(n);
    ctx.mu.push_back(mu);
    ctx.local_arrival.push_back(scenario.arrival(n, service));
    ctx.lan_delay.push_back(scenario.nodes[n].lan_delay);
    ctx.share_cap.push_back(bound / ctx.total_arrival);
  }
  ctx.cloud_share_cap = std::max(0.0, (ctx.cloud_rate - scenario.epsilon) / ctx.total_arrival);
  const double weight = svc.outsource_weight;
  ctx.cloud_weight = options.cloud_penalty == CloudPenalty::WeightTimesArrival
                         ? weight * ctx.total_arrival
                         : weight;
  return ctx;
}

double lambda_edge_of_eta(double eta, double mu, double local_arrival, double total_arrival,
                          double lan_delay) {
  if (mu <= local_arrival) {
    // The kink at A_ns/A_s lies beyond the stable load region; only the
    // local-only stationary branch is valid there.
    return (mu - std::sqrt(-mu / eta)) / total_arrival;
  }
  const double gap = mu - local_arrival;
  const double kink_eta = -mu / (gap * gap);
  if (eta <= kink_eta - lan_delay) {
    return (mu - std::sqrt(-mu / (eta + lan_delay))) / total_arrival;
  }
  if (eta >= kink_eta) {
    return (mu - std::sqrt(-mu / eta)) / total_arrival;
  }
  return local_arrival / total_arrival;
}

double lambda_cloud_of_eta(double eta, double cloud_rate, double total_arrival,
                           double cloud_weight) {
  const double level = cloud_weight + eta;
  if (level >= 0) return -std::numeric_limits<double>::infinity();
  return (cloud_rate - std::sqrt(-cloud_rate / level)) / total_arrival;
}

double excess(double eta, const ServiceContext& ctx) {
  double sum = 0;
  for (std::size_t i = 0; i < ctx.mu.size(); ++i) {
    const double raw = lambda_edge_of_eta(eta, ctx.mu[i], ctx.local_arrival[i],
                                          ctx.total_arrival, ctx.lan_delay[i]);
    sum += clamp(raw, 0.0, ctx.share_cap[i]);
  }
  const double cloud =
      lambda_cloud_of_eta(eta, ctx.cloud_rate, ctx.total_arrival, ctx.cloud_weight);
  sum += clamp(cloud, 0.0, ctx.cloud_share_cap);
  return sum - 1.0;
}

EtaBracket bracket_eta(const ServiceContext& ctx) {
  EtaBracket bracket;
  bracket.hi = kEtaHigh;
  if (excess(bracket.hi, ctx) >= 0) {
    throw SolverError("bracket_eta: excess is nonnegative at eta ~ 0");
  }
  bracket.lo = -1.0;
  while (excess(bracket.lo, ctx) <= 0) {
    if (++bracket.doublings > kMaxDoublings) {
      std::ostringstream os;
      os << "service " << ctx.service << ": demand " << ctx.total_arrival
         << " tasks/s exceeds the aggregate edge + cloud capacity";
      throw InfeasibleError(os.str(), {ctx.service});
    }
    bracket.lo *= 2.0;
  }
  return bracket;
}

ServiceSolveResult solve_service(const ServiceContext& ctx, const Options& options) {
  const EtaBracket bracket = bracket_eta(ctx);
  ServiceSolveResult result;
  result.bracket_width = bracket.hi - bracket.lo;
  result.bracket_doublings = bracket.doublings;

  // Bisection on the sign of the excess. The product form of the textbook
  // test loses the bracket invariant when the excess plateaus at exactly 0
  // (common under full connectivity, where every share cap is 1), so the
  // predicate keeps excess(lo) > 0 >= excess(hi) explicitly.
  double lo = bracket.lo;
  double hi = bracket.hi;
  double excess_lo = excess(lo, ctx);
  double excess_hi = -1.0;  // excess at kEtaHigh, checked in bracket_eta
  while (hi - lo >= options.xi && result.bisection_iters < options.max_bisect) {
    const double mid = 0.5 * (lo + hi);
    const double excess_mid = excess(mid, ctx);
    if (excess_mid > 0) {
      lo = mid;
      excess_lo = excess_mid;
    } else {
      hi = mid;
      excess_hi = excess_mid;
    }
    ++result.bisection_iters;
  }
  result.eta = 0.5 * (lo + hi);

  // The excess curve can be steep (slope up to ~M^2/A_s where a coordinate
  // is barely interior), so the xi-wide bracket alone does not pin the share
  // sum to 1e-6. A short Illinois refinement inside the final bracket drives
  // the excess itself to ~1e-9; bisection_iters counts only the loop above.
  double excess_mid = excess(result.eta, ctx);
  if (std::abs(excess_mid) > 1e-9) {
    if (excess_mid > 0) {
      lo = result.eta;
      excess_lo = excess_mid;
    } else {
      hi = result.eta;
      excess_hi = excess_mid;
    }
    double best_eta = excess_mid > 0 ? result.eta : hi;
    double best_excess = std::abs(excess_mid);
    if (std::abs(excess_hi) < best_excess) {
      best_eta = hi;
      best_excess = std::abs(excess_hi);
    }
    int side = 0;
    for (int k = 0; k < 60 && best_excess > 1e-9; ++k) {
      const double denom = excess_lo - excess_hi;
      double eta = denom > 0 ? lo + excess_lo / denom * (hi - lo) : 0.5 * (lo + hi);
      if (!(eta > lo) || !(eta < hi)) eta = 0.5 * (lo + hi);
      const double value = excess(eta, ctx);
      if (std::abs(value) < best_excess) {
        best_excess = std::abs(value);
        best_eta = eta;
      }
      if (value > 0) {
        lo = eta;
        excess_lo = value;
        if (side == 1) excess_hi *= 0.5;
        side = 1;
      } else {
        hi = eta;
        excess_hi = value;
        if (side == -1) excess_lo *= 0.5;
        side = -1;
      }
    }
    result.eta = best_eta;
  }

  const std::size_t edges = ctx.mu.size();
  result.shares.resize(edges);
  double sum = 0;
  for (std::size_t i = 0; i < edges; ++i) {
    const double raw = lambda_edge_of_eta(result.eta, ctx.mu[i], ctx.local_arrival[i],
                                          ctx.total_arrival, ctx.lan_delay[i]);
    result.shares[i] = clamp(raw, 0.0, ctx.share_cap[i]);
    sum += result.shares[i];
  }
  const double cloud_raw =
      lambda_cloud_of_eta(result.eta, ctx.cloud_rate, ctx.total_arrival, ctx.cloud_weight);
  result.cloud_share = clamp(cloud_raw, 0.0, ctx.cloud_share_cap);
  sum += result.cloud_share;

  // The bisection stops at finite width, so the simplex constraint can be
  // off by a hair; spread the leftover over coordinates strictly inside
  // their bounds, proportionally to their current shares.
  const double leftover = 1.0 - sum;
  if (std::abs(leftover) > 1e-6) {
    std::ostringstream os;
    os << "service " << ctx.service << ": bisection residual " << leftover
       << " exceeds tolerance; eta bracket may be degenerate";
    throw SolverError(os.str());
  }
  if (leftover != 0.0) {
    double interior_sum = 0;
    for (std::size_t i = 0; i < edges; ++i) {
      if (result.shares[i] > 0 && result.shares[i] < ctx.share_cap[i]) {
        interior_sum += result.shares[i];
      }
    }
    const bool cloud_interior =
        result.cloud_share > 0 && result.cloud_share < ctx.cloud_share_cap;
    if (cloud_interior) interior_sum += result.cloud_share;
    if (interior_sum > 0) {
      const double scale = leftover / interior_sum;
      for (std::size_t i = 0; i < edges; ++i) {
        if (result.shares[i] > 0 && result.shares[i] < ctx.share_cap[i]) {
          result.shares[i] = clamp(result.shares[i] * (1.0 + scale), 0.0, ctx.share_cap[i]);
        }
      }
      if (cloud_interior) {
        result.cloud_share = clamp(result.cloud_share * (1.0 + scale), 0.0, ctx.cloud_share_cap);
      }
    }
    // With every coordinate pinned at a bound there is nothing to adjust;
    // the leftover already passed the 1e-6 gate above.
  }
  double final_sum = result.cloud_share;
  for (double s : result.shares) final_sum += s;
  result.residual = std::abs(final_sum - 1.0);
  if (result.residual > 1e-6) {
    throw SolverError("solve_service: simplex residual above 1e-6 after adjustment");
  }
  return result;
}

P2Result try_solve_p2(const Scenario& scenario, const CachingPolicy& caching,
                      const Options& options) {
  const auto storage = check_caching_feasible(scenario, caching);
  if (!storage.ok) {
    throw Error("solve_p2: caching policy violates storage capacity: " + storage.violations[0]);
  }
  const Allocation allocation = compute_allocation(scenario, caching);
  const int n_services = scenario.n_services();

  P2Result result;
  result.report.schedule = SchedulingPolicy(scenario.n_nodes(), n_services);
  result.report.caching = caching;
  result.report.response_time.assign(n_services, 0.0);
  result.report.outsourcing_rate.assign(n_services, 0.0);
  result.report.diagnostics.bisection_iters.assign(n_services, 0);
  result.report.diagnostics.bracket_widths.assign(n_services, 0.0);
  result.report.diagnostics.bracket_doublings.assign(n_services, 0);

  for (int s = 0; s < n_services; ++s) {
    const double total = scenario.total_arrival(s);
    if (total <= 0) {
      // Excluded from scheduling; park the row on the cloud so it still
      // sums to one.
      result.report.schedule.cloud(s) = 1.0;
      continue;
    }
    ServiceContext ctx = make_service_context(scenario, caching, allocation, s, options);
    try {
      const ServiceSolveResult solved = solve_service(ctx, options);
      for (std::size_t i = 0; i < ctx.node_ids.size(); ++i) {
        result.report.schedule.at(ctx.node_ids[i], s) = solved.shares[i];
      }
      result.report.schedule.cloud(s) = solved.cloud_share;
      result.report.diagnostics.bisection_iters[s] = solved.bisection_iters;
      result.report.diagnostics.bracket_widths[s] = solved.bracket_width;
      result.report.diagnostics.bracket_doublings[s] = solved.bracket_doublings;
    } catch (const InfeasibleError&) {
      result.infeasible_services.push_back(s);
    }
  }
  if (!result.infeasible_services.empty()) {
    result.feasible = false;
    return result;
  }
  for (int s = 0; s < n_services; ++s) {
    const double total = scenario.total_arrival(s);
    if (total <= 0) continue;
    result.report.response_time[s] =
        service_response_time(scenario, s, result.report.schedule, allocation);
    result.report.outsourcing_rate[s] = result.report.schedule.cloud(s) * total;
  }
  result.report.objective = objective(scenario, caching, result.report.schedule, allocation);
  result.feasible = true;
  return result;
}

SolveReport solve_p2(const Scenario& scenario, const CachingPolicy& caching,
                     const Options& options) {
  P2Result result = try_solve_p2(scenario, caching, options);
  if (!result.feasible) {
    std::ostringstream os;
    os << "P2 infeasible for service(s)";
    for (int s : result.infeasible_services) os << ' ' << s;
    throw InfeasibleError(os.str(), result.infeasible_services);
  }
  return std::move(result.report);
}

}  // namespace edgeopt::waterfill
