#include "edgeopt/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "edgeopt/rng.hpp"

namespace edgeopt {

using nlohmann::json;

TopologyKind TopologyKind::parse(const std::string& text) {
  if (text == "full" || text == "fully_connected") return fully_connected();
  if (text == "isolated") return isolated();
  if (text.rfind("clusters:", 0) == 0) {
    const int k = std::stoi(text.substr(9));
    if (k < 1) throw ParseError("topology kind: cluster count must be >= 1");
    return cluster_groups(k);
  }
  if (text.rfind("geometric:", 0) == 0) {
    const double radius = std::stod(text.substr(10));
    if (!(radius > 0)) throw ParseError("topology kind: radius must be positive");
    return random_geometric(radius);
  }
  throw ParseError("unknown topology kind '" + text + "'");
}

std::string TopologyKind::to_string() const {
  switch (tag) {
    case Tag::FullyConnected:
      return "full";
    case Tag::Isolated:
      return "isolated";
    case Tag::Clusters:
      return "clusters:" + std::to_string(clusters);
    case Tag::RandomGeometric: {
      std::ostringstream os;
      os << "geometric:" << radius;
      return os.str();
    }
  }
  return "full";
}

namespace {

void require_interval(const Interval& iv, const char* name) {
  if (!(iv.lo > 0) || !(iv.hi >= iv.lo)) {
    throw Error(std::string("gen params: interval ") + name + " must be positive and ordered");
  }
}

}  // namespace

void GenParams::validate() const {
  if (n_nodes < 1) throw Error("gen params: need at least one node");
  if (n_services < 1) throw Error("gen params: need at least one service");
  require_interval(storage_cap_gb, "storage_cap_gb");
  require_interval(compute_cap_gcps, "compute_cap_gcps");
  require_interval(service_storage_gb, "service_storage_gb");
  require_interval(service_compute_gcycles, "service_compute_gcycles");
  require_interval(data_ratio_mb_per_gcycle, "data_ratio_mb_per_gcycle");
  require_interval(node_arrival_tps, "node_arrival_tps");
  if (!(core_bandwidth_mbps > 0)) throw Error("gen params: core bandwidth must be positive");
  if (zipf_skew < 0) throw Error("gen params: zipf skew must be >= 0");
  if (lan_delay_s < 0) throw Error("gen params: LAN delay must be >= 0");
  if (outsource_weight < 0) throw Error("gen params: outsource weight must be >= 0");
  if (!(epsilon_tps > 0)) throw Error("gen params: epsilon must be positive");
  if (topology.tag == TopologyKind::Tag::Clusters && topology.clusters < 1) {
    throw Error("gen params: cluster count must be >= 1");
  }
  if (topology.tag == TopologyKind::Tag::RandomGeometric && !(topology.radius > 0)) {
    throw Error("gen params: geometric radius must be positive");
  }
}

std::vector<double> zipf_weights(int count, double skew) {
  std::vector<double> weights(count);
  double sum = 0;
  for (int r = 0; r < count; ++r) {
    weights[r] = std::pow(static_cast<double>(r + 1), -skew);
    sum += weights[r];
  }
  for (double& w : weights) w /= sum;
  return weights;
}

Topology build_topology(const TopologyKind& kind, int n_nodes,
                        const std::vector<std::pair<double, double>>* positions) {
  Topology topo;
  topo.neighbors.assign(n_nodes, {});
  switch (kind.tag) {
    case TopologyKind::Tag::Isolated:
      break;
    case TopologyKind::Tag::FullyConnected:
      for (int a = 0; a < n_nodes; ++a) {
        for (int b = 0; b < n_nodes; ++b) {
          if (b != a) topo.neighbors[a].push_back(b);
        }
      }
      break;
    case TopologyKind::Tag::Clusters: {
      // k near-equal contiguous groups, complete within each group.
      const int k = std::min(kind.clusters, n_nodes);
      const int base = n_nodes / k;
      const int extra = n_nodes % k;
      int start = 0;
      for (int g = 0; g < k; ++g) {
        const int size = base + (g < extra ? 1 : 0);
        for (int a = start; a < start + size; ++a) {
          for (int b = start; b < start + size; ++b) {
            if (b != a) topo.neighbors[a].push_back(b);
          }
        }
        start += size;
      }
      break;
    }
    case TopologyKind::Tag::RandomGeometric: {
      if (positions == nullptr || static_cast<int>(positions->size()) != n_nodes) {
        throw Error("build_topology: geometric topology needs one position per node");
      }
      for (int a = 0; a < n_nodes; ++a) {
        for (int b = a + 1; b < n_nodes; ++b) {
          const double dx = (*positions)[a].first - (*positions)[b].first;
          const double dy = (*positions)[a].second - (*positions)[b].second;
          if (std::hypot(dx, dy) <= kind.radius) {
            topo.neighbors[a].push_back(b);
            topo.neighbors[b].push_back(a);
          }
        }
      }
      break;
    }
  }
  for (auto& adj : topo.neighbors) std::sort(adj.begin(), adj.end());
  return topo;
}

Scenario generate(const GenParams& params) {
  params.validate();
  Rng rng(params.seed);
  const int n = params.n_nodes;
  const int s_count = params.n_services;

  Scenario scenario;
  scenario.epsilon = params.epsilon_tps;
  scenario.nodes.resize(n);
  for (int i = 0; i < n; ++i) {
    scenario.nodes[i].storage_cap =
        uniform_in(rng, params.storage_cap_gb.lo, params.storage_cap_gb.hi);
    scenario.nodes[i].compute_cap =
        uniform_in(rng, params.compute_cap_gcps.lo, params.compute_cap_gcps.hi);
    scenario.nodes[i].lan_delay = params.lan_delay_s;
  }
  scenario.services.resize(s_count);
  for (int s = 0; s < s_count; ++s) {
    scenario.services[s].storage_req =
        uniform_in(rng, params.service_storage_gb.lo, params.service_storage_gb.hi);
    scenario.services[s].compute_req =
        uniform_in(rng, params.service_compute_gcycles.lo, params.service_compute_gcycles.hi);
    scenario.services[s].data_ratio =
        uniform_in(rng, params.data_ratio_mb_per_gcycle.lo, params.data_ratio_mb_per_gcycle.hi);
    scenario.services[s].core_bandwidth = params.core_bandwidth_mbps;
    scenario.services[s].outsource_weight = params.outsource_weight;
  }

  // Popularity ranks come from a seeded permutation so that rank order is
  // independent of service ids; the same weights apply at every node.
  std::vector<int> by_rank(s_count);
  std::iota(by_rank.begin(), by_rank.end(), 0);
  shuffle_in_place(rng, by_rank);
  const std::vector<double> weights = zipf_weights(s_count, params.zipf_skew);
  std::vector<double> popularity(s_count);
  for (int r = 0; r < s_count; ++r) popularity[by_rank[r]] = weights[r];

  scenario.arrivals.assign(static_cast<std::size_t>(n) * s_count, 0.0);
  for (int i = 0; i < n; ++i) {
    const double node_total =
        uniform_in(rng, params.node_arrival_tps.lo, params.node_arrival_tps.hi);
    for (int s = 0; s < s_count; ++s) {
      scenario.arrival(i, s) = popularity[s] * node_total;
    }
  }

  if (params.topology.tag == TopologyKind::Tag::RandomGeometric) {
    std::vector<std::pair<double, double>> positions(n);
    for (auto& p : positions) {
      p.first = uniform_in(rng, 0.0, 100.0);
      p.second = uniform_in(rng, 0.0, 100.0);
    }
    scenario.topology = build_topology(params.topology, n, &positions);
  } else {
    scenario.topology = build_topology(params.topology, n);
  }

  scenario.validate();
  return scenario;
}

namespace {

constexpr int kFormatVersion = 1;

json scenario_to_json(const Scenario& scenario) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["epsilon_tasks_per_s"] = scenario.epsilon;
  doc["nodes"] = json::array();
  for (const auto& node : scenario.nodes) {
    doc["nodes"].push_back({{"storage_cap_gb", node.storage_cap},
                            {"compute_cap_gcycles_per_s", node.compute_cap},
                            {"lan_delay_s", node.lan_delay}});
  }
  doc["services"] = json::array();
  for (const auto& svc : scenario.services) {
    doc["services"].push_back({{"storage_req_gb", svc.storage_req},
                               {"compute_req_gcycles_per_task", svc.compute_req},
                               {"data_ratio_mb_per_gcycle", svc.data_ratio},
                               {"core_bandwidth_mbps", svc.core_bandwidth},
                               {"outsource_weight", svc.outsource_weight}});
  }
  json arrivals = json::array();
  for (int n = 0; n < scenario.n_nodes(); ++n) {
    json row = json::array();
    for (int s = 0; s < scenario.n_services(); ++s) row.push_back(scenario.arrival(n, s));
    arrivals.push_back(std::move(row));
  }
  doc["arrivals_tasks_per_s"] = std::move(arrivals);
  doc["topology_neighbors"] = scenario.topology.neighbors;
  return doc;
}

Scenario scenario_from_json(const json& doc) {
  Scenario scenario;
  try {
    const int version = doc.at("format_version").get<int>();
    if (version != kFormatVersion) {
      throw ParseError("unsupported format_version " + std::to_string(version));
    }
    scenario.epsilon = doc.at("epsilon_tasks_per_s").get<double>();
    for (const auto& entry : doc.at("nodes")) {
      EdgeNode node;
      node.storage_cap = entry.at("storage_cap_gb").get<double>();
      node.compute_cap = entry.at("compute_cap_gcycles_per_s").get<double>();
      node.lan_delay = entry.at("lan_delay_s").get<double>();
      scenario.nodes.push_back(node);
    }
    for (const auto& entry : doc.at("services")) {
      Service svc;
      svc.storage_req = entry.at("storage_req_gb").get<double>();
      svc.compute_req = entry.at("compute_req_gcycles_per_task").get<double>();
      svc.data_ratio = entry.at("data_ratio_mb_per_gcycle").get<double>();
      svc.core_bandwidth = entry.at("core_bandwidth_mbps").get<double>();
      svc.outsource_weight = entry.at("outsource_weight").get<double>();
      scenario.services.push_back(svc);
    }
    const auto& arrivals = doc.at("arrivals_tasks_per_s");
    if (arrivals.size() != scenario.nodes.size()) {
      throw ParseError("arrivals_tasks_per_s must have one row per node");
    }
    for (const auto& row : arrivals) {
      if (row.size() != scenario.services.size()) {
        throw ParseError("arrivals_tasks_per_s rows must have one entry per service");
      }
      for (const auto& value : row) scenario.arrivals.push_back(value.get<double>());
    }
    scenario.topology.neighbors =
        doc.at("topology_neighbors").get<std::vector<std::vector<int>>>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("scenario file: ") + e.what());
  }
  scenario.validate();
  return scenario;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << doc.dump(2) << '\n';
}

}  // namespace

std::string to_json_text(const Scenario& scenario) { return scenario_to_json(scenario).dump(2); }

Scenario from_json_text(const std::string& text) {
  try {
    return scenario_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw ParseError(std::string("scenario text: ") + e.what());
  }
}

void save(const Scenario& scenario, const std::string& path) {
  write_json_file(path, scenario_to_json(scenario));
}

Scenario load(const std::string& path) { return scenario_from_json(read_json_file(path)); }

ScenarioDocument load_document(const std::string& path) {
  const json doc = read_json_file(path);
  ScenarioDocument result;
  result.scenario = scenario_from_json(doc);
  const int n = result.scenario.n_nodes();
  const int s_count = result.scenario.n_services();
  try {
    if (doc.contains("caching")) {
      const auto& rows = doc.at("caching");
      if (static_cast<int>(rows.size()) != n) {
        throw ParseError("caching must have one row per node");
      }
      CachingPolicy caching(n, s_count);
      for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != s_count) {
          throw ParseError("caching rows must have one entry per service");
        }
        for (int s = 0; s < s_count; ++s) caching.set(i, s, rows[i][s].get<int>() != 0);
      }
      result.caching = std::move(caching);
    }
    if (doc.contains("schedule")) {
      const auto& rows = doc.at("schedule");
      if (static_cast<int>(rows.size()) != n + 1) {
        throw ParseError("schedule must have one row per node plus the cloud row");
      }
      SchedulingPolicy schedule(n, s_count);
      for (int i = 0; i <= n; ++i) {
        if (static_cast<int>(rows[i].size()) != s_count) {
          throw ParseError("schedule rows must have one entry per service");
        }
        for (int s = 0; s < s_count; ++s) schedule.at(i, s) = rows[i][s].get<double>();
      }
      result.schedule = std::move(schedule);
    }
    if (doc.contains("objective")) {
      result.objective = doc.at("objective").get<double>();
    }
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return result;
}

void save_report(const std::string& path, const Scenario& scenario, const SolveReport& report) {
  json doc = scenario_to_json(scenario);
  json caching = json::array();
  for (int n = 0; n < report.caching.node_count; ++n) {
    json row = json::array();
    for (int s = 0; s < report.caching.service_count; ++s) {
      row.push_back(report.caching.at(n, s) ? 1 : 0);
    }
    caching.push_back(std::move(row));
  }
  doc["caching"] = std::move(caching);
  json schedule = json::array();
  for (int n = 0; n <= report.schedule.node_count; ++n) {
    json row = json::array();
    for (int s = 0; s < report.schedule.service_count; ++s) {
      row.push_back(report.schedule.at(n, s));
    }
    schedule.push_back(std::move(row));
  }
  doc["schedule"] = std::move(schedule);
  doc["objective"] = report.objective;
  write_json_file(path, doc);
}

}  // namespace edgeopt
