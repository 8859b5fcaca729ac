#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "edgeopt/model.hpp"

namespace edgeopt {

struct Interval {
  double lo = 0;
  double hi = 0;
  bool operator==(const Interval&) const = default;
};

struct TopologyKind {
  enum class Tag { FullyConnected, Isolated, Clusters, RandomGeometric };
  Tag tag = Tag::FullyConnected;
  int clusters = 1;     // Clusters only
  double radius = 30;   // RandomGeometric only, meters

  static TopologyKind fully_connected() { return {}; }
  static TopologyKind isolated() { return {Tag::Isolated, 1, 0}; }
  static TopologyKind cluster_groups(int k) { return {Tag::Clusters, k, 0}; }
  static TopologyKind random_geometric(double radius) {
    return {Tag::RandomGeometric, 1, radius};
  }
  // "full" | "isolated" | "clusters:<k>" | "geometric:<radius>"
  static TopologyKind parse(const std::string& text);
  std::string to_string() const;
  bool operator==(const TopologyKind&) const = default;
};

// Random-instance knobs. Defaults: 12 nodes, 8 services, uniform capacity
// draws, Zipf(0.5) popularity.
struct GenParams {
  int n_nodes = 12;
  int n_services = 8;
  Interval storage_cap_gb{100, 200};             // P_n
  Interval compute_cap_gcps{50, 100};            // R_n, giga-cycles/s
  Interval service_storage_gb{20, 80};           // p_s
  Interval service_compute_gcycles{0.1, 0.5};    // beta_s per task
  Interval data_ratio_mb_per_gcycle{0.1, 1.0};   // t_s
  double core_bandwidth_mbps = 160;              // B_s
  double zipf_skew = 0.5;
  Interval node_arrival_tps{50, 100};            // total A_n per node
  double lan_delay_s = 0.02;                     // d_n
  double outsource_weight = 6e-4;                // w_s
  double epsilon_tps = 1e-3;
  TopologyKind topology;
  std::uint64_t seed = 0;

  void validate() const;
};

// Normalized popularity weights by rank: weight[r] proportional to (r+1)^-skew.
std::vector<double> zipf_weights(int count, double skew);

// Deterministic for a fixed seed, bit-identical across platforms.
Scenario generate(const GenParams& params);

// Positions are required for RandomGeometric and ignored otherwise.
Topology build_topology(const TopologyKind& kind, int n_nodes,
                        const std::vector<std::pair<double, double>>* positions = nullptr);

// Scenario files are JSON with unit-bearing field names and a format_version.
// Optionally a caching matrix, schedule matrix, and objective may be embedded
// (solver reports); `load` validates whatever is present.
void save(const Scenario& scenario, const std::string& path);
Scenario load(const std::string& path);
std::string to_json_text(const Scenario& scenario);
Scenario from_json_text(const std::string& text);

void save_report(const std::string& path, const Scenario& scenario, const SolveReport& report);

// A scenario file with whatever optional report sections it carries.
struct ScenarioDocument {
  Scenario scenario;
  std::optional<CachingPolicy> caching;
  std::optional<SchedulingPolicy> schedule;
  std::optional<double> objective;
};

ScenarioDocument load_document(const std::string& path);

}  // namespace edgeopt
