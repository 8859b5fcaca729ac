#include "edgeopt/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "edgeopt/baselines.hpp"

namespace edgeopt::experiment {

using nlohmann::json;

namespace {

std::string fmt(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

Interval interval_from(const json& value) {
  if (!value.is_array() || value.size() != 2) {
    throw ParseError("intervals must be [lo, hi] arrays");
  }
  return {value[0].get<double>(), value[1].get<double>()};
}

GenParams gen_params_from_json(const json& doc) {
  GenParams params;
  try {
    params.n_nodes = doc.value("n_nodes", params.n_nodes);
    params.n_services = doc.value("n_services", params.n_services);
    if (doc.contains("storage_cap_gb")) params.storage_cap_gb = interval_from(doc["storage_cap_gb"]);
    if (doc.contains("compute_cap_gcps")) {
      params.compute_cap_gcps = interval_from(doc["compute_cap_gcps"]);
    }
    if (doc.contains("service_storage_gb")) {
      params.service_storage_gb = interval_from(doc["service_storage_gb"]);
    }
    if (doc.contains("service_compute_gcycles")) {
      params.service_compute_gcycles = interval_from(doc["service_compute_gcycles"]);
    }
    if (doc.contains("data_ratio_mb_per_gcycle")) {
      params.data_ratio_mb_per_gcycle = interval_from(doc["data_ratio_mb_per_gcycle"]);
    }
    params.core_bandwidth_mbps = doc.value("core_bandwidth_mbps", params.core_bandwidth_mbps);
    params.zipf_skew = doc.value("zipf_skew", params.zipf_skew);
    if (doc.contains("node_arrival_tps")) {
      params.node_arrival_tps = interval_from(doc["node_arrival_tps"]);
    }
    params.lan_delay_s = doc.value("lan_delay_s", params.lan_delay_s);
    params.outsource_weight = doc.value("outsource_weight", params.outsource_weight);
    params.epsilon_tps = doc.value("epsilon_tps", params.epsilon_tps);
    if (doc.contains("topology")) {
      params.topology = TopologyKind::parse(doc["topology"].get<std::string>());
    }
    params.seed = doc.value("seed", params.seed);
  } catch (const json::exception& e) {
    throw ParseError(std::string("gen params: ") + e.what());
  }
  return params;
}

std::string sweep_value_as_string(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  return fmt(value.get<double>());
}

std::string sanitize(const std::string& text) {
  std::string out = text;
  for (char& c : out) {
    if (c == ':' || c == '/' || c == ' ') c = '-';
  }
  return out;
}

}  // namespace

Algorithm parse_algorithm(const std::string& name) {
  if (name == "ice") return Algorithm::Ice;
  if (name == "noncoop") return Algorithm::NonCooperation;
  if (name == "greedy") return Algorithm::Greedy;
  throw ParseError("unknown algorithm '" + name + "' (expected ice, noncoop, or greedy)");
}

std::string algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::Ice:
      return "ice";
    case Algorithm::NonCooperation:
      return "noncoop";
    case Algorithm::Greedy:
      return "greedy";
  }
  return "ice";
}

void ExperimentConfig::validate() const {
  if (generate.has_value() == !scenario_file.empty()) {
    throw Error("experiment config: exactly one of generate params or scenario file is required");
  }
  if (algorithms.empty()) throw Error("experiment config: no algorithms selected");
  if (seeds.empty()) throw Error("experiment config: seed list is empty");
  if (sweep.values.empty()) throw Error("experiment config: sweep value list is empty");
  if (sweep.variable != "arrival_rate" && sweep.variable != "omega" &&
      sweep.variable != "topology") {
    throw Error("experiment config: sweep variable must be arrival_rate, omega, or topology");
  }
  if (sweep.variable != "omega" && !generate.has_value()) {
    throw Error("experiment config: sweeping " + sweep.variable +
                " requires generated scenarios");
  }
  for (const std::string& value : sweep.values) {
    if (sweep.variable == "topology") {
      TopologyKind::parse(value);
    } else {
      try {
        std::stod(value);
      } catch (const std::exception&) {
        throw Error("experiment config: sweep value '" + value + "' is not a number");
      }
    }
  }
  if (generate) generate->validate();
}

ExperimentConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("experiment config: ") + e.what());
  }
  ExperimentConfig config;
  try {
    if (doc.contains("scenario")) {
      const auto& source = doc["scenario"];
      if (source.contains("generate")) {
        config.generate = gen_params_from_json(source["generate"]);
      }
      if (source.contains("file")) config.scenario_file = source["file"].get<std::string>();
    } else {
      config.generate = GenParams{};
    }
    if (doc.contains("algorithms")) {
      config.algorithms.clear();
      for (const auto& name : doc["algorithms"]) {
        config.algorithms.push_back(parse_algorithm(name.get<std::string>()));
      }
    }
    if (doc.contains("ice")) {
      const auto& ice_doc = doc["ice"];
      config.ice_config.omega = ice_doc.value("omega", config.ice_config.omega);
      config.ice_config.max_iters = ice_doc.value("max_iters", config.ice_config.max_iters);
      config.ice_config.stall_window =
          ice_doc.value("stall_window", config.ice_config.stall_window);
      config.ice_config.stall_tol = ice_doc.value("stall_tol", config.ice_config.stall_tol);
    }
    if (doc.contains("sweep")) {
      config.sweep.variable = doc["sweep"].value("variable", config.sweep.variable);
      config.sweep.values.clear();
      for (const auto& value : doc["sweep"].at("values")) {
        config.sweep.values.push_back(sweep_value_as_string(value));
      }
    } else {
      config.sweep.variable = "omega";
      config.sweep.values = {fmt(config.ice_config.omega)};
    }
    if (doc.contains("seeds")) {
      config.seeds.clear();
      for (const auto& seed : doc["seeds"]) {
        config.seeds.push_back(seed.get<std::uint64_t>());
      }
    }
    config.output_dir = doc.value("output_dir", config.output_dir);
    config.write_traces = doc.value("write_traces", config.write_traces);
    config.record_timing = doc.value("timing", config.record_timing);
  } catch (const json::exception& e) {
    throw ParseError(std::string("experiment config: ") + e.what());
  }
  return config;
}

GenParams parse_gen_params_text(const std::string& text) {
  try {
    return gen_params_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw ParseError(std::string("gen params: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

RunSummary run_experiment(const ExperimentConfig& config) {
  config.validate();
  namespace fs = std::filesystem;
  fs::create_directories(config.output_dir);
  const std::string csv_path = (fs::path(config.output_dir) / "results.csv").string();
  const bool fresh = !fs::exists(csv_path) || fs::file_size(csv_path) == 0;
  std::ofstream csv(csv_path, std::ios::app);
  if (!csv) throw Error("cannot write " + csv_path);
  if (fresh) {
    csv << "sweep_value,seed,algorithm,objective,total_response_time,"
           "outsourcing_traffic,iterations,wall_time_s,status\n";
  }

  std::optional<Scenario> file_scenario;
  if (!config.scenario_file.empty()) file_scenario = load(config.scenario_file);

  RunSummary summary;
  summary.csv_path = csv_path;
  for (const std::string& value : config.sweep.values) {
    for (std::uint64_t seed : config.seeds) {
      ice::IceConfig ice_config = config.ice_config;
      ice_config.rng_seed = seed;
      Scenario scenario;
      if (config.generate) {
        GenParams params = *config.generate;
        params.seed = seed;
        if (config.sweep.variable == "arrival_rate") {
          const double target_mean = std::stod(value);
          const double mean = 0.5 * (params.node_arrival_tps.lo + params.node_arrival_tps.hi);
          const double factor = target_mean / mean;
          params.node_arrival_tps = {params.node_arrival_tps.lo * factor,
                                     params.node_arrival_tps.hi * factor};
        } else if (config.sweep.variable == "topology") {
          params.topology = TopologyKind::parse(value);
        }
        scenario = generate(params);
      } else {
        scenario = *file_scenario;
      }
      if (config.sweep.variable == "omega") ice_config.omega = std::stod(value);

      for (Algorithm algorithm : config.algorithms) {
        std::string status = "ok";
        SolveReport report;
        ice::Trace trace;
        int iterations = 0;
        const auto start = std::chrono::steady_clock::now();
        try {
          switch (algorithm) {
            case Algorithm::Ice: {
              ice::IceResult result = ice::run_ice(scenario, ice_config);
              report = std::move(result.report);
              trace = std::move(result.trace);
              iterations = report.diagnostics.outer_iterations;
              break;
            }
            case Algorithm::NonCooperation: {
              ice::IceResult result = baselines::run_noncooperation(scenario, ice_config);
              report = std::move(result.report);
              trace = std::move(result.trace);
              iterations = report.diagnostics.outer_iterations;
              break;
            }
            case Algorithm::Greedy:
              report = baselines::run_greedy(scenario);
              iterations = 0;
              break;
          }
        } catch (const InfeasibleError&) {
          status = "infeasible";
          ++summary.infeasible;
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        if (status == "ok") {
          const double check = objective(scenario, report.caching, report.schedule);
          const double gap = std::abs(check - report.objective);
          if (gap > 1e-9 * std::max(1.0, std::abs(check))) {
            status = "error";  // row aborted
            std::fprintf(stderr,
                         "edgeopt: objective re-verification failed for %s at sweep %s seed "
                         "%llu (gap %g); row aborted\n",
                         algorithm_name(algorithm).c_str(), value.c_str(),
                         static_cast<unsigned long long>(seed), gap);
          }
        }
        csv << value << ',' << seed << ',' << algorithm_name(algorithm) << ',';
        if (status == "ok") {
          csv << fmt(report.objective) << ',' << fmt(report.total_response_time()) << ','
              << fmt(report.total_outsourcing()) << ',' << iterations << ','
              << (config.record_timing ? fmt(elapsed) : "0");
        } else {
          csv << ",,,,"
              << (config.record_timing ? fmt(elapsed) : "0");
        }
        csv << ',' << status << '\n';
        ++summary.rows;

        if (config.write_traces && status == "ok" && !trace.empty()) {
          const std::string name = "trace_" + algorithm_name(algorithm) + "_" +
                                   sanitize(value) + "_" + std::to_string(seed) + ".csv";
          std::ofstream trace_out(fs::path(config.output_dir) / name);
          ice::write_trace_csv(trace, trace_out);
        }
      }
    }
  }
  return summary;
}

ValidationReport validate_file(const std::string& path) {
  ValidationReport report;
  ScenarioDocument doc;
  try {
    doc = load_document(path);
  } catch (const std::exception& e) {
    report.ok = false;
    report.messages.push_back(e.what());
    return report;
  }
  const Scenario& scenario = doc.scenario;
  {
    std::ostringstream os;
    double total = 0;
    for (int s = 0; s < scenario.n_services(); ++s) total += scenario.total_arrival(s);
    os << "scenario OK: " << scenario.n_nodes() << " nodes, " << scenario.n_services()
       << " services, " << total << " tasks/s total arrival";
    report.messages.push_back(os.str());
  }
  if (doc.caching) {
    const FeasibilityReport storage = check_caching_feasible(scenario, *doc.caching);
    if (storage.ok) {
      report.messages.push_back("caching: storage-feasible");
    } else {
      report.ok = false;
      for (const auto& violation : storage.violations) {
        report.messages.push_back("caching: " + violation);
      }
    }
  }
  if (doc.schedule) {
    if (!doc.caching) {
      report.ok = false;
      report.messages.push_back("schedule present without a caching matrix");
    } else {
      const FeasibilityReport feas =
          check_schedule_feasible(scenario, *doc.caching, *doc.schedule);
      if (feas.ok) {
        report.messages.push_back("schedule: feasible");
      } else {
        report.ok = false;
        for (const auto& violation : feas.violations) {
          report.messages.push_back("schedule: " + violation);
        }
      }
      if (doc.objective) {
        try {
          const double check = objective(scenario, *doc.caching, *doc.schedule);
          if (std::abs(check - *doc.objective) > 1e-9 * std::max(1.0, std::abs(check))) {
            report.ok = false;
            report.messages.push_back("objective mismatch: stored " + fmt(*doc.objective) +
                                      ", recomputed " + fmt(check));
          } else {
            report.messages.push_back("objective: verified");
          }
        } catch (const std::exception& e) {
          report.ok = false;
          report.messages.push_back(std::string("objective recomputation failed: ") + e.what());
        }
      }
    }
  }
  return report;
}

}  // namespace edgeopt::experiment
