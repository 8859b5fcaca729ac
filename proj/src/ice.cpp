#include "edgeopt/ice.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace edgeopt::ice {

namespace {

std::string policy_key(const CachingPolicy& policy) {
  return std::string(policy.cached.begin(), policy.cached.end());
}

void append_double(std::string& row, double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  row += buf;
}

}  // namespace

std::vector<std::vector<std::uint8_t>> enumerate_feasible_decisions(const Scenario& scenario,
                                                                    int node) {
  const int s_count = scenario.n_services();
  if (s_count > 20) {
    throw Error("enumerate_feasible_decisions: decision space 2^" + std::to_string(s_count) +
                " is too large to enumerate");
  }
  std::vector<std::vector<std::uint8_t>> feasible;
  const double capacity = scenario.nodes[node].storage_cap;
  for (std::uint32_t mask = 0; mask < (1u << s_count); ++mask) {
    double used = 0;
    for (int s = 0; s < s_count; ++s) {
      if (mask & (1u << s)) used += scenario.services[s].storage_req;
    }
    if (used > capacity) continue;
    std::vector<std::uint8_t> decision(s_count, 0);
    for (int s = 0; s < s_count; ++s) decision[s] = (mask >> s) & 1u;
    feasible.push_back(std::move(decision));
  }
  return feasible;
}

double acceptance_probability(double y, double y_star, double omega) {
  const double z = (y_star - y) / omega;
  if (z > 700) return 0.0;
  if (z < -700) return 1.0;
  return 1.0 / (1.0 + std::exp(z));
}

GibbsChain::GibbsChain(const Scenario& scenario, const IceConfig& config,
                       waterfill::Options solve_options)
    : scenario_(scenario),
      config_(config),
      solve_options_(solve_options),
      rng_(config.rng_seed),
      state_(scenario.n_nodes(), scenario.n_services()) {
  if (config_.omega <= 0) throw Error("ice: omega must be positive");
  if (config_.max_iters < 1) throw Error("ice: max_iters must be >= 1");
  if (config_.stall_window < 1) throw Error("ice: stall_window must be >= 1");
  decisions_.reserve(scenario.n_nodes());
  for (int n = 0; n < scenario.n_nodes(); ++n) {
    decisions_.push_back(enumerate_feasible_decisions(scenario, n));
  }
  state_objective_ = evaluate(state_);
  if (std::isnan(state_objective_)) {
    throw InfeasibleError(
        "ice: the initial empty caching policy cannot be scheduled; "
        "some service exceeds the cloud capacity");
  }
  best_policy_ = state_;
  best_objective_ = state_objective_;
}

double GibbsChain::evaluate(const CachingPolicy& policy) {
  const std::string key = policy_key(policy);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  const waterfill::P2Result solved = waterfill::try_solve_p2(scenario_, policy, solve_options_);
  const double value =
      solved.feasible ? solved.report.objective : std::numeric_limits<double>::quiet_NaN();
  memo_.emplace(key, value);
  return value;
}

TraceRecord GibbsChain::step() {
  TraceRecord record;
  record.iter = ++iterations_;
  const int node = static_cast<int>(uniform_index(rng_, decisions_.size()));
  record.node = node;
  record.y = state_objective_;

  const auto& choices = decisions_[node];
  const auto& proposal = choices[uniform_index(rng_, choices.size())];
  record.proposal = proposal;

  if (proposal == state_.row(node)) {
    record.y_star = state_objective_;
    record.rho = 0.5;
    record.accepted = uniform_unit(rng_) < record.rho;
    // state unchanged either way
  } else {
    CachingPolicy candidate = state_;
    candidate.set_row(node, proposal);
    const double y_star = evaluate(candidate);
    if (std::isnan(y_star)) {
      // Unschedulable proposal: rejected outright (rho -> 0 anyway).
      record.y_star = std::numeric_limits<double>::infinity();
      record.rho = 0.0;
      record.accepted = false;
    } else {
      record.y_star = y_star;
      record.rho = acceptance_probability(state_objective_, y_star, config_.omega);
      record.accepted = uniform_unit(rng_) < record.rho;
      if (record.accepted) {
        state_ = std::move(candidate);
        state_objective_ = y_star;
      }
    }
  }
  if (state_objective_ < best_objective_) {
    best_objective_ = state_objective_;
    best_policy_ = state_;
  }
  record.best = best_objective_;
  return record;
}

IceResult run_ice(const Scenario& scenario, const IceConfig& config,
                  const waterfill::Options& solve_options) {
  GibbsChain chain(scenario, config, solve_options);
  IceResult result;
  result.trace.reserve(config.max_iters);
  double last_best = chain.best_objective();
  int stall = 0;
  for (int iter = 0; iter < config.max_iters; ++iter) {
    result.trace.push_back(chain.step());
    if (last_best - chain.best_objective() > config.stall_tol) {
      last_best = chain.best_objective();
      stall = 0;
    } else if (++stall >= config.stall_window) {
      break;
    }
  }
  result.report = waterfill::solve_p2(scenario, chain.best_policy(), solve_options);
  result.report.diagnostics.outer_iterations = chain.iterations();
  return result;
}

void write_trace_csv(const Trace& trace, std::ostream& out) {
  out << "iter,node,y,y_star,rho,accepted,best\n";
  std::string row;
  for (const TraceRecord& rec : trace) {
    row.clear();
    row += std::to_string(rec.iter);
    row += ',';
    row += std::to_string(rec.node);
    row += ',';
    append_double(row, rec.y);
    row += ',';
    append_double(row, rec.y_star);
    row += ',';
    append_double(row, rec.rho);
    row += ',';
    row += rec.accepted ? '1' : '0';
    row += ',';
    append_double(row, rec.best);
    row += '\n';
    out << row;
  }
}

}  // namespace edgeopt::ice
