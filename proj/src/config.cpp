#include "campinc/harness.hpp"

#include "campinc/rng.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace campinc {

using nlohmann::json;

namespace {

void expect_keys(const json& obj, const std::set<std::string>& allowed,
                 const std::string& context) {
  if (!obj.is_object()) {
    throw std::invalid_argument("config: " + context + " must be an object");
  }
  for (const auto& [key, _] : obj.items()) {
    if (allowed.count(key) == 0) {
      throw std::invalid_argument("config: unknown key '" + key + "' in " + context);
    }
  }
}

std::map<NodeKind, double> container_map(const json& j, const std::string& context) {
  std::map<NodeKind, double> out;
  const NodeKind kinds[] = {NodeKind::BaseStation, NodeKind::EdgeServer,
                            NodeKind::NetworkDevice, NodeKind::CloudServer};
  if (j.is_number()) {
    for (auto k : kinds) {
      out[k] = j.get<double>();
    }
    return out;
  }
  expect_keys(j, {"base_station", "edge_server", "network_device", "cloud_server"}, context);
  for (auto k : kinds) {
    const auto name = to_string(k);
    if (!j.contains(name)) {
      throw std::invalid_argument("config: " + context + " missing kind " + name);
    }
    out[k] = j.at(name).get<double>();
  }
  return out;
}

Catalog parse_explicit_catalog(const json& j) {
  expect_keys(j, {"microservices", "databases"}, "catalog");
  Catalog catalog;
  for (const auto& m : j.at("microservices")) {
    expect_keys(m,
                {"id", "cpu", "overhead", "processing_ms", "run_cost", "deploy_cost",
                 "container_create_ms", "container_release_ms", "needs_database"},
                "microservice");
    MicroserviceSpec ms;
    ms.id = m.at("id").get<std::string>();
    ms.cpu_demand = m.at("cpu").get<double>();
    ms.container_overhead = m.at("overhead").get<double>();
    ms.processing_delay_ms = m.at("processing_ms").get<double>();
    ms.run_cost = m.at("run_cost").get<double>();
    ms.deploy_cost = m.at("deploy_cost").get<double>();
    ms.container_create_ms = container_map(m.at("container_create_ms"), "container_create_ms");
    ms.container_release_ms =
        container_map(m.at("container_release_ms"), "container_release_ms");
    ms.needs_database = m.at("needs_database").get<bool>();
    catalog.add_microservice(std::move(ms));
  }
  if (j.contains("databases")) {
    for (const auto& d : j.at("databases")) {
      expect_keys(d, {"id", "owner", "cpu", "overhead", "run_cost", "deploy_cost"},
                  "database");
      DatabaseSpec db;
      db.id = d.at("id").get<std::string>();
      db.owner_microservice = d.at("owner").get<std::string>();
      db.cpu_demand = d.at("cpu").get<double>();
      db.container_overhead = d.at("overhead").get<double>();
      db.run_cost = d.at("run_cost").get<double>();
      db.deploy_cost = d.at("deploy_cost").get<double>();
      catalog.add_database(std::move(db));
    }
  }
  catalog.validate();
  return catalog;
}

CatalogGenSpec parse_catalog_gen(const json& j) {
  expect_keys(j,
              {"count", "cpu_range", "overhead", "processing_range", "run_cost_range",
               "deploy_cost", "container_ms", "database_fraction", "db_overhead",
               "db_deploy_cost", "seed"},
              "catalog.generate");
  CatalogGenSpec spec;
  if (j.contains("count")) spec.count = j.at("count").get<std::size_t>();
  if (j.contains("cpu_range")) {
    spec.cpu_min = j.at("cpu_range").at(0).get<double>();
    spec.cpu_max = j.at("cpu_range").at(1).get<double>();
  }
  if (j.contains("overhead")) spec.overhead = j.at("overhead").get<double>();
  if (j.contains("processing_range")) {
    spec.processing_min = j.at("processing_range").at(0).get<double>();
    spec.processing_max = j.at("processing_range").at(1).get<double>();
  }
  if (j.contains("run_cost_range")) {
    spec.run_cost_min = j.at("run_cost_range").at(0).get<double>();
    spec.run_cost_max = j.at("run_cost_range").at(1).get<double>();
  }
  if (j.contains("deploy_cost")) spec.deploy_cost = j.at("deploy_cost").get<double>();
  if (j.contains("container_ms")) spec.container_ms = j.at("container_ms").get<double>();
  if (j.contains("database_fraction"))
    spec.database_fraction = j.at("database_fraction").get<double>();
  if (j.contains("db_overhead")) spec.db_overhead = j.at("db_overhead").get<double>();
  if (j.contains("db_deploy_cost"))
    spec.db_deploy_cost = j.at("db_deploy_cost").get<double>();
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  return spec;
}

Topology parse_topology(const json& j) {
  expect_keys(j, {"nodes", "links"}, "topology");
  Topology topo;
  for (const auto& n : j.at("nodes")) {
    expect_keys(n, {"id", "kind", "capacity", "registry"}, "topology.nodes");
    PhysicalNode node;
    node.id = n.at("id").get<std::string>();
    node.kind = node_kind_from_string(n.at("kind").get<std::string>());
    node.capacity = n.contains("capacity") ? n.at("capacity").get<double>() : 0.0;
    node.hosts_registry = n.contains("registry") && n.at("registry").get<bool>();
    topo.add_node(std::move(node));
  }
  for (const auto& l : j.at("links")) {
    expect_keys(l, {"a", "b", "delay_ms", "cost"}, "topology.links");
    topo.add_link(l.at("a").get<std::string>(), l.at("b").get<std::string>(),
                  l.at("delay_ms").get<double>(), l.at("cost").get<double>());
  }
  return topo;
}

} // namespace

void ScenarioConfig::validate() const {
  if (delay_threshold_ms < 1 || delay_threshold_ms > 1e5) {
    throw std::invalid_argument("delay_threshold_ms must be within [1, 1e5]");
  }
  if (chain_len_min < 1 || chain_len_min > chain_len_max) {
    throw std::invalid_argument("invalid chain_len_range");
  }
  if (k_paths < 1) {
    throw std::invalid_argument("k_paths must be >= 1");
  }
  if (seeds.empty()) {
    throw std::invalid_argument("at least one seed is required");
  }
  if (solvers.empty()) {
    throw std::invalid_argument("at least one solver is required");
  }
}

std::string to_string(Solver s) {
  switch (s) {
    case Solver::Exact:
      return "exact";
    case Solver::Brute:
      return "brute";
    case Solver::CampInc:
      return "camp_inc";
    case Solver::Epta:
      return "epta";
  }
  return "unknown";
}

Solver solver_from_string(const std::string& s) {
  if (s == "exact") return Solver::Exact;
  if (s == "brute") return Solver::Brute;
  if (s == "camp_inc") return Solver::CampInc;
  if (s == "epta") return Solver::Epta;
  throw std::invalid_argument("unknown solver: " + s);
}

ScenarioConfig parse_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  expect_keys(j,
              {"topology", "catalog", "request_counts", "chain_len_range",
               "delay_threshold_ms", "k_paths", "probe_period_ms", "failure_schedule",
               "seeds", "solvers", "deployment_reuse", "include_registry_costs",
               "node_recovery", "exact_budget", "epta_controller", "registry_footprint",
               "measure_time"},
              "top level");

  ScenarioConfig config;
  if (j.contains("topology")) {
    const auto& t = j.at("topology");
    if (t.is_string()) {
      if (t.get<std::string>() != "reference") {
        throw std::invalid_argument("config: unknown topology preset: " +
                                    t.get<std::string>());
      }
      config.use_reference_topology = true;
    } else {
      config.use_reference_topology = false;
      config.explicit_topology = parse_topology(t);
    }
  }
  if (j.contains("catalog")) {
    const auto& c = j.at("catalog");
    if (c.contains("generate")) {
      expect_keys(c, {"generate"}, "catalog");
      config.catalog_gen = parse_catalog_gen(c.at("generate"));
    } else {
      config.explicit_catalog = parse_explicit_catalog(c);
    }
  }
  if (j.contains("request_counts")) {
    config.request_counts = j.at("request_counts").get<std::vector<std::size_t>>();
  }
  if (j.contains("chain_len_range")) {
    config.chain_len_min = j.at("chain_len_range").at(0).get<std::size_t>();
    config.chain_len_max = j.at("chain_len_range").at(1).get<std::size_t>();
  }
  if (j.contains("delay_threshold_ms")) {
    config.delay_threshold_ms = j.at("delay_threshold_ms").get<double>();
  }
  if (j.contains("k_paths")) {
    config.k_paths = j.at("k_paths").get<std::size_t>();
  }
  if (j.contains("probe_period_ms")) {
    config.probe_period_ms = j.at("probe_period_ms").get<double>();
  }
  if (j.contains("failure_schedule")) {
    for (const auto& e : j.at("failure_schedule")) {
      expect_keys(e, {"before_request", "probes"}, "failure_schedule");
      FailureEvent event;
      event.before_request = e.at("before_request").get<std::size_t>();
      for (const auto& p : e.at("probes")) {
        expect_keys(p, {"node", "acked"}, "failure_schedule.probes");
        event.probes.push_back(
            NodeProbe{p.at("node").get<std::string>(), p.at("acked").get<bool>()});
      }
      config.failure_schedule.push_back(std::move(event));
    }
  }
  if (j.contains("seeds")) {
    config.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  }
  if (j.contains("solvers")) {
    config.solvers.clear();
    for (const auto& s : j.at("solvers")) {
      config.solvers.push_back(solver_from_string(s.get<std::string>()));
    }
  }
  if (j.contains("deployment_reuse")) {
    config.deployment_reuse = j.at("deployment_reuse").get<bool>();
  }
  if (j.contains("include_registry_costs")) {
    config.include_registry_costs = j.at("include_registry_costs").get<bool>();
  }
  if (j.contains("node_recovery")) {
    config.node_recovery = j.at("node_recovery").get<bool>();
  }
  if (j.contains("exact_budget")) {
    config.exact_budget = j.at("exact_budget").get<std::uint64_t>();
  }
  if (j.contains("epta_controller")) {
    config.epta_controller = j.at("epta_controller").get<std::string>();
  }
  if (j.contains("registry_footprint")) {
    const auto& r = j.at("registry_footprint");
    expect_keys(r, {"cpu", "overhead", "run_cost", "deploy_cost"}, "registry_footprint");
    if (r.contains("cpu")) config.registry_footprint.cpu_demand = r.at("cpu").get<double>();
    if (r.contains("overhead"))
      config.registry_footprint.container_overhead = r.at("overhead").get<double>();
    if (r.contains("run_cost"))
      config.registry_footprint.run_cost = r.at("run_cost").get<double>();
    if (r.contains("deploy_cost"))
      config.registry_footprint.deploy_cost = r.at("deploy_cost").get<double>();
  }
  if (j.contains("measure_time")) {
    config.measure_time = j.at("measure_time").get<bool>();
  }
  config.validate();
  return config;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open config file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_json(buffer.str());
}

} // namespace campinc
