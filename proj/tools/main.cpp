#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "edgeopt/experiment.hpp"
#include "edgeopt/scenario.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw edgeopt::Error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint service caching and workload scheduling for edge clusters"};
  app.require_subcommand(1);

  // --- gen -----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "Generate a random scenario file");
  std::string gen_out = "scenario.json";
  std::string gen_params_file;
  std::uint64_t gen_seed = 0;
  int gen_nodes = -1, gen_services = -1;
  std::string gen_topology;
  double gen_arrival_mean = -1;
  gen->add_option("--out", gen_out, "Output scenario file")->capture_default_str();
  gen->add_option("--params", gen_params_file, "JSON file with generator parameters");
  gen->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
  gen->add_option("--nodes", gen_nodes, "Number of edge nodes");
  gen->add_option("--services", gen_services, "Number of services");
  gen->add_option("--topology", gen_topology,
                  "full | isolated | clusters:<k> | geometric:<radius>");
  gen->add_option("--arrival-mean", gen_arrival_mean,
                  "Rescale the node arrival range to this mean (tasks/s)");

  // --- validate --------------------------------------------------------------
  auto* validate = app.add_subcommand("validate", "Check a scenario or report file");
  std::string validate_path;
  validate->add_option("path", validate_path, "File to check")->required();

  // --- run -------------------------------------------------------------------
  auto* run = app.add_subcommand("run", "Run an experiment sweep");
  std::string run_config;
  std::vector<std::uint64_t> run_seeds;
  double run_omega = -1;
  std::string run_out;
  std::vector<std::string> run_algos;
  std::string run_sweep;
  bool run_traces = false;
  bool run_timing = false;
  run->add_option("--config", run_config, "Experiment config JSON")->required();
  run->add_option("--seed", run_seeds, "Override the seed list");
  run->add_option("--omega", run_omega, "Override the smoothing temperature");
  run->add_option("--out", run_out, "Override the output directory");
  run->add_option("--algo", run_algos, "Override algorithms (ice, noncoop, greedy)");
  run->add_option("--sweep", run_sweep, "Override sweep as <variable>=v1,v2,...");
  run->add_flag("--traces", run_traces, "Write per-run trace CSVs");
  run->add_flag("--timing", run_timing, "Record wall-clock time per run");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      edgeopt::GenParams params;
      if (!gen_params_file.empty()) {
        params = edgeopt::experiment::parse_gen_params_text(read_file(gen_params_file));
      }
      params.seed = gen_seed;
      if (gen_nodes > 0) params.n_nodes = gen_nodes;
      if (gen_services > 0) params.n_services = gen_services;
      if (!gen_topology.empty()) params.topology = edgeopt::TopologyKind::parse(gen_topology);
      if (gen_arrival_mean > 0) {
        const double mean = 0.5 * (params.node_arrival_tps.lo + params.node_arrival_tps.hi);
        const double factor = gen_arrival_mean / mean;
        params.node_arrival_tps = {params.node_arrival_tps.lo * factor,
                                   params.node_arrival_tps.hi * factor};
      }
      edgeopt::save(edgeopt::generate(params), gen_out);
      std::cout << "wrote " << gen_out << "\n";
      return 0;
    }

    if (*validate) {
      const edgeopt::experiment::ValidationReport report =
          edgeopt::experiment::validate_file(validate_path);
      for (const std::string& message : report.messages) std::cout << message << "\n";
      std::cout << (report.ok ? "OK" : "INVALID") << "\n";
      return report.ok ? 0 : 1;
    }

    if (*run) {
      edgeopt::experiment::ExperimentConfig config =
          edgeopt::experiment::load_config(run_config);
      if (const char* env_out = std::getenv("EDGEOPT_OUT_DIR");
          env_out != nullptr && config.output_dir == "results") {
        config.output_dir = env_out;
      }
      if (!run_seeds.empty()) config.seeds = run_seeds;
      if (run_omega > 0) config.ice_config.omega = run_omega;
      if (!run_out.empty()) config.output_dir = run_out;
      if (!run_algos.empty()) {
        config.algorithms.clear();
        for (const std::string& name : run_algos) {
          config.algorithms.push_back(edgeopt::experiment::parse_algorithm(name));
        }
      }
      if (!run_sweep.empty()) {
        const auto eq = run_sweep.find('=');
        if (eq == std::string::npos) {
          throw edgeopt::Error("--sweep expects <variable>=v1,v2,...");
        }
        config.sweep.variable = run_sweep.substr(0, eq);
        config.sweep.values.clear();
        std::istringstream values(run_sweep.substr(eq + 1));
        std::string token;
        while (std::getline(values, token, ',')) config.sweep.values.push_back(token);
      }
      if (run_traces) config.write_traces = true;
      if (run_timing) config.record_timing = true;
      const edgeopt::experiment::RunSummary summary =
          edgeopt::experiment::run_experiment(config);
      std::cout << summary.rows << " rows -> " << summary.csv_path;
      if (summary.infeasible > 0) std::cout << " (" << summary.infeasible << " infeasible)";
      std::cout << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
