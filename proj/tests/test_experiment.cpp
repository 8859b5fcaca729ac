#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "edgeopt/baselines.hpp"
#include "edgeopt/experiment.hpp"
#include "edgeopt/waterfill.hpp"
#include "test_util.hpp"

using namespace edgeopt;
using namespace edgeopt::experiment;

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

ExperimentConfig quick_config(const std::string& out_dir) {
  ExperimentConfig config;
  GenParams params;
  params.n_nodes = 3;
  params.n_services = 2;
  params.node_arrival_tps = {15, 30};
  params.core_bandwidth_mbps = 40;
  config.generate = params;
  config.sweep.variable = "arrival_rate";
  config.sweep.values = {"18", "22", "26"};
  config.seeds = {1, 2, 3, 4, 5};
  config.ice_config.max_iters = 80;
  config.ice_config.stall_window = 80;
  config.output_dir = out_dir;
  return config;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("run_experiment writes one row per cell") {
  TempDir dir("edgeopt_test_rows");
  const RunSummary summary = run_experiment(quick_config(dir.path.string()));
  CHECK(summary.rows == 45);  // 3 sweep values x 5 seeds x 3 algorithms
  CHECK(summary.infeasible == 0);
  std::ifstream csv(summary.csv_path);
  std::string line;
  int lines = 0;
  bool header_ok = false;
  while (std::getline(csv, line)) {
    if (lines == 0) {
      header_ok = line ==
                  "sweep_value,seed,algorithm,objective,total_response_time,"
                  "outsourcing_traffic,iterations,wall_time_s,status";
    }
    ++lines;
  }
  CHECK(header_ok);
  CHECK(lines == 46);
}

TEST_CASE("identical configs produce byte-identical outputs") {
  TempDir dir_a("edgeopt_test_det_a");
  TempDir dir_b("edgeopt_test_det_b");
  const RunSummary a = run_experiment(quick_config(dir_a.path.string()));
  const RunSummary b = run_experiment(quick_config(dir_b.path.string()));
  CHECK(slurp(a.csv_path) == slurp(b.csv_path));
}

TEST_CASE("omega sweeps emit plottable trace files") {
  TempDir dir("edgeopt_test_traces");
  ExperimentConfig config = quick_config(dir.path.string());
  config.sweep.variable = "omega";
  config.sweep.values = {"1e-06", "0.01"};
  config.seeds = {1};
  config.algorithms = {Algorithm::Ice};
  config.write_traces = true;
  const RunSummary summary = run_experiment(config);
  CHECK(summary.rows == 2);
  CHECK(fs::exists(dir.path / "trace_ice_1e-06_1.csv"));
  CHECK(fs::exists(dir.path / "trace_ice_0.01_1.csv"));
  const std::string trace = slurp(dir.path / "trace_ice_1e-06_1.csv");
  CHECK(trace.rfind("iter,node,y,y_star,rho,accepted,best\n", 0) == 0);
}

TEST_CASE("config parsing applies defaults and overrides") {
  const ExperimentConfig config = parse_config_text(R"json({
    "scenario": {"generate": {"n_nodes": 4, "n_services": 3, "topology": "clusters:2"}},
    "algorithms": ["ice", "greedy"],
    "sweep": {"variable": "omega", "values": [1e-6, 1e-2]},
    "seeds": [7, 8],
    "ice": {"max_iters": 123},
    "output_dir": "out",
    "timing": true
  })json");
  CHECK(config.generate->n_nodes == 4);
  CHECK(config.generate->topology.to_string() == "clusters:2");
  CHECK(config.algorithms.size() == 2);
  CHECK(config.sweep.values.size() == 2);
  CHECK(config.seeds == std::vector<std::uint64_t>{7, 8});
  CHECK(config.ice_config.max_iters == 123);
  CHECK(config.record_timing);
  CHECK_NOTHROW(config.validate());

  ExperimentConfig bad = config;
  bad.sweep.variable = "topology";
  bad.sweep.values = {"ring"};
  CHECK_THROWS_AS(bad.validate(), Error);

  ExperimentConfig file_sweep = config;
  file_sweep.generate.reset();
  file_sweep.scenario_file = "whatever.json";
  file_sweep.sweep.variable = "arrival_rate";
  file_sweep.sweep.values = {"10"};
  CHECK_THROWS_AS(file_sweep.validate(), Error);
}

TEST_CASE("validate_file reports on scenarios and embedded reports") {
  TempDir dir("edgeopt_test_validate");
  fs::create_directories(dir.path);
  const Scenario s = testutil::small_search_instance();

  SUBCASE("plain scenario is OK") {
    const fs::path path = dir.path / "plain.json";
    save(s, path.string());
    const ValidationReport report = validate_file(path.string());
    CHECK(report.ok);
    REQUIRE(!report.messages.empty());
    CHECK(report.messages.front().find("scenario OK") != std::string::npos);
  }

  SUBCASE("storage-violating caching is listed") {
    const fs::path path = dir.path / "violating.json";
    nlohmann::json doc = nlohmann::json::parse(to_json_text(s));
    doc["caching"] = {{1, 1}, {0, 0}, {0, 0}};  // node 0 cannot hold both services
    std::ofstream(path) << doc.dump(2);
    const ValidationReport report = validate_file(path.string());
    CHECK_FALSE(report.ok);
    bool mentioned = false;
    for (const auto& message : report.messages) {
      if (message.find("storage") != std::string::npos) mentioned = true;
    }
    CHECK(mentioned);
  }

  SUBCASE("missing fields name the field") {
    const fs::path path = dir.path / "missing.json";
    nlohmann::json doc = nlohmann::json::parse(to_json_text(s));
    doc.erase("services");
    std::ofstream(path) << doc.dump(2);
    const ValidationReport report = validate_file(path.string());
    CHECK_FALSE(report.ok);
    REQUIRE(!report.messages.empty());
    CHECK(report.messages.front().find("services") != std::string::npos);
  }

  SUBCASE("stored objective is re-verified") {
    const fs::path path = dir.path / "report.json";
    const SolveReport solved = waterfill::solve_p2(
        s, baselines::greedy_caching(s), waterfill::Options{});
    save_report(path.string(), s, solved);
    CHECK(validate_file(path.string()).ok);

    nlohmann::json doc = nlohmann::json::parse(slurp(path));
    doc["objective"] = solved.objective + 0.5;
    std::ofstream(path) << doc.dump(2);
    const ValidationReport tampered = validate_file(path.string());
    CHECK_FALSE(tampered.ok);
  }
}

TEST_CASE("infeasible cells are recorded, not fatal") {
  TempDir dir("edgeopt_test_infeasible");
  ExperimentConfig config = quick_config(dir.path.string());
  GenParams params = *config.generate;
  params.core_bandwidth_mbps = 0.5;     // pipe below any demand
  params.storage_cap_gb = {1.0, 1.01};  // nothing fits, so all-cloud only
  params.service_storage_gb = {20, 80};
  config.generate = params;
  config.sweep.values = {"18"};
  config.seeds = {1};
  const RunSummary summary = run_experiment(config);
  CHECK(summary.rows == 3);
  CHECK(summary.infeasible == 3);
  std::ifstream csv(summary.csv_path);
  std::string line;
  std::getline(csv, line);  // header
  int infeasible_rows = 0;
  while (std::getline(csv, line)) {
    if (line.find(",infeasible") != std::string::npos) ++infeasible_rows;
  }
  CHECK(infeasible_rows == 3);
}

TEST_CASE("results.csv is append-only with a single header") {
  TempDir dir("edgeopt_test_append");
  ExperimentConfig config = quick_config(dir.path.string());
  config.sweep.values = {"18"};
  config.seeds = {1};
  run_experiment(config);
  const RunSummary second = run_experiment(config);
  std::ifstream csv(second.csv_path);
  std::string line;
  int headers = 0, rows = 0;
  while (std::getline(csv, line)) {
    if (line.rfind("sweep_value,", 0) == 0) {
      ++headers;
    } else if (!line.empty()) {
      ++rows;
    }
  }
  CHECK(headers == 1);
  CHECK(rows == 6);  // two appended runs of 3 cells
}
