#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "edgeopt/ice.hpp"
#include "edgeopt/scenario.hpp"

namespace edgeopt::experiment {

enum class Algorithm { Ice, NonCooperation, Greedy };

Algorithm parse_algorithm(const std::string& name);  // "ice" | "noncoop" | "greedy"
std::string algorithm_name(Algorithm algorithm);

// One experiment: a sweep variable crossed with seeds and algorithms.
// sweep.variable is one of "arrival_rate" (rescales the node-arrival range to
// the given mean), "omega", or "topology".
struct SweepSpec {
  std::string variable = "arrival_rate";
  std::vector<std::string> values;
};

struct ExperimentConfig {
  std::optional<GenParams> generate;  // either generated per cell...
  std::string scenario_file;          // ...or loaded once from a file
  std::vector<Algorithm> algorithms{Algorithm::Ice, Algorithm::NonCooperation,
                                    Algorithm::Greedy};
  SweepSpec sweep;
  std::vector<std::uint64_t> seeds{1};
  ice::IceConfig ice_config;
  std::string output_dir = "results";
  bool write_traces = false;
  bool record_timing = false;  // off by default so outputs stay byte-deterministic

  void validate() const;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

// Generator knobs as a JSON object (same keys the experiment config uses).
GenParams parse_gen_params_text(const std::string& text);

struct RunSummary {
  int rows = 0;
  int infeasible = 0;
  std::string csv_path;
};

// Runs every (sweep value x seed x algorithm) cell sequentially and appends
// one CSV row per cell to <output_dir>/results.csv. Infeasible cells are
// recorded with status=infeasible; every objective is re-verified against
// the model formulas before the row is written.
RunSummary run_experiment(const ExperimentConfig& config);

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> messages;
};

// Loads a scenario (or report) file and runs every feasibility check on
// whatever the document contains.
ValidationReport validate_file(const std::string& path);

}  // namespace edgeopt::experiment
