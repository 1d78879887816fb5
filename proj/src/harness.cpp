#include "campinc/harness.hpp"

#include "campinc/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace campinc {

using nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

} // namespace

std::uint64_t cell_seed(std::uint64_t seed, std::size_t request_count) {
  return splitmix64(seed * 1000003ull + static_cast<std::uint64_t>(request_count));
}

Topology build_reference_topology() {
  Topology topo;
  auto add = [&](const std::string& id, NodeKind kind, double capacity) {
    PhysicalNode n;
    n.id = id;
    n.kind = kind;
    n.capacity = capacity;
    topo.add_node(std::move(n));
  };
  for (int i = 1; i <= 4; ++i) {
    add("eu-" + std::to_string(i), NodeKind::EndUser, 0);
    add("cg-" + std::to_string(i), NodeKind::ContentGenerator, 0);
  }
  add("bs-1", NodeKind::BaseStation, 500);
  add("bs-2", NodeKind::BaseStation, 500);
  add("es-1", NodeKind::EdgeServer, 1000);
  add("es-2", NodeKind::EdgeServer, 1000);
  for (int i = 1; i <= 6; ++i) {
    add("nd-" + std::to_string(i), NodeKind::NetworkDevice, 250);
  }
  add("cloud", NodeKind::CloudServer, 10000);

  const double edge_delay = 2, edge_cost = 1.0;
  const double core_delay = 5, core_cost = 2.0;
  const double cloud_delay = 20, cloud_cost = 5.0;

  // Two end users and two content generators per base station.
  topo.add_link("eu-1", "bs-1", edge_delay, edge_cost);
  topo.add_link("eu-2", "bs-1", edge_delay, edge_cost);
  topo.add_link("cg-1", "bs-1", edge_delay, edge_cost);
  topo.add_link("cg-2", "bs-1", edge_delay, edge_cost);
  topo.add_link("eu-3", "bs-2", edge_delay, edge_cost);
  topo.add_link("eu-4", "bs-2", edge_delay, edge_cost);
  topo.add_link("cg-3", "bs-2", edge_delay, edge_cost);
  topo.add_link("cg-4", "bs-2", edge_delay, edge_cost);
  topo.add_link("bs-1", "es-1", edge_delay, edge_cost);
  topo.add_link("bs-2", "es-2", edge_delay, edge_cost);

  // Core: six network devices in a 2x3 grid mesh.
  topo.add_link("nd-1", "nd-2", core_delay, core_cost);
  topo.add_link("nd-2", "nd-3", core_delay, core_cost);
  topo.add_link("nd-4", "nd-5", core_delay, core_cost);
  topo.add_link("nd-5", "nd-6", core_delay, core_cost);
  topo.add_link("nd-1", "nd-4", core_delay, core_cost);
  topo.add_link("nd-2", "nd-5", core_delay, core_cost);
  topo.add_link("nd-3", "nd-6", core_delay, core_cost);

  // Edge servers attach at opposite grid corners, cloud at the middle.
  topo.add_link("es-1", "nd-1", edge_delay, edge_cost);
  topo.add_link("es-2", "nd-3", edge_delay, edge_cost);
  topo.add_link("cloud", "nd-5", cloud_delay, cloud_cost);

  topo.set_registry("cloud", true);
  return topo;
}

Catalog generate_catalog(const CatalogGenSpec& spec) {
  Rng rng(spec.seed);
  Catalog catalog;
  const NodeKind kinds[] = {NodeKind::BaseStation, NodeKind::EdgeServer,
                            NodeKind::NetworkDevice, NodeKind::CloudServer};
  for (std::size_t i = 0; i < spec.count; ++i) {
    MicroserviceSpec ms;
    ms.id = "ms-" + std::to_string(i);
    ms.cpu_demand = rng.uniform_real(spec.cpu_min, spec.cpu_max);
    ms.container_overhead = spec.overhead;
    ms.processing_delay_ms = rng.uniform_real(spec.processing_min, spec.processing_max);
    ms.run_cost = rng.uniform_real(spec.run_cost_min, spec.run_cost_max);
    ms.deploy_cost = spec.deploy_cost;
    for (auto k : kinds) {
      ms.container_create_ms[k] = spec.container_ms;
      ms.container_release_ms[k] = spec.container_ms;
    }
    ms.needs_database = rng.uniform_real(0, 1) < spec.database_fraction;
    const bool needs_db = ms.needs_database;
    const double cpu = ms.cpu_demand;
    const double run = ms.run_cost;
    catalog.add_microservice(std::move(ms));
    if (needs_db) {
      DatabaseSpec db;
      db.id = "db-" + std::to_string(i);
      db.owner_microservice = "ms-" + std::to_string(i);
      db.cpu_demand = cpu / 2;
      db.container_overhead = spec.db_overhead;
      db.run_cost = run / 2;
      db.deploy_cost = spec.db_deploy_cost;
      catalog.add_database(std::move(db));
    }
  }
  catalog.validate();
  return catalog;
}

const char* kCsvHeader =
    "solver,request_count,seed,accepted,rejected,total_cost,operational_cost,"
    "deployment_cost,communication_cost,avg_latency_ms,avg_registry_delay_ms,"
    "nodes_used,retries,wall_time_ms,nodes_explored,proven,error";

std::string to_csv_row(const CellResult& c) {
  std::ostringstream row;
  row << to_string(c.solver) << ',' << c.request_count << ',' << c.seed << ','
      << c.accepted << ',' << c.rejected << ',' << fmt(c.cost.total) << ','
      << fmt(c.cost.operational) << ',' << fmt(c.cost.deployment) << ','
      << fmt(c.cost.communication) << ',' << fmt(c.avg_latency_ms) << ','
      << fmt(c.avg_registry_delay_ms) << ',' << c.nodes_used << ',' << c.retries << ','
      << fmt(c.wall_time_ms) << ',' << c.nodes_explored << ',' << (c.proven ? 1 : 0)
      << ',' << (c.solver_failed ? c.error : "");
  return row.str();
}

namespace {

using Clock = std::chrono::steady_clock;

std::size_t count_nodes_used(const std::vector<const RequestPlacement*>& placements) {
  std::set<NodeId> nodes;
  for (const auto* rp : placements) {
    for (const auto& [c, host] : rp->component_host) {
      (void)c;
      nodes.insert(host);
    }
  }
  return nodes.size();
}

json path_to_json(const Path& p) {
  return json(p.nodes);
}

json placement_to_json(const RequestPlacement& rp) {
  json j;
  j["hosts"] = json::object();
  for (const auto& [c, host] : rp.component_host) {
    j["hosts"][c.label()] = host;
  }
  j["routes"] = json::array();
  for (const auto& [edge, route] : rp.edge_route) {
    j["routes"].push_back(json{{"from", edge.first.label()},
                               {"to", edge.second.label()},
                               {"path", path_to_json(route)}});
  }
  j["ingress"] = path_to_json(rp.ingress);
  j["egress"] = path_to_json(rp.egress);
  return j;
}

struct CellRun {
  CellResult result;
  json placements = json::array();
};

CellRun run_camp_inc_cell(const ScenarioConfig& config, const Topology& base,
                          const Catalog& catalog,
                          const std::vector<ServiceRequest>& requests,
                          std::size_t request_count, std::uint64_t seed) {
  CellRun run;
  run.result.solver = Solver::CampInc;
  run.result.request_count = request_count;
  run.result.seed = seed;

  Topology topo = base;
  OrchestratorConfig oc;
  oc.k_paths = config.k_paths;
  oc.probe_period_ms = config.probe_period_ms;
  oc.node_recovery = config.node_recovery;
  oc.deployment_reuse = config.deployment_reuse;
  oc.include_registry_costs = config.include_registry_costs;
  oc.registry = config.registry_footprint;
  Orchestrator orchestrator(oc);

  const auto start = Clock::now();
  const auto outcomes = run_scenario(orchestrator, topo, requests, catalog,
                                     config.delay_threshold_ms, config.failure_schedule);
  const double wall =
      std::chrono::duration<double, std::milli>(Clock::now() - start).count();

  double latency_sum = 0, registry_sum = 0;
  std::vector<const RequestPlacement*> placed;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& out = outcomes[i].place;
    json rec;
    rec["request"] = outcomes[i].request_id;
    rec["accepted"] = out.accepted;
    if (out.accepted) {
      ++run.result.accepted;
      run.result.cost += out.cost;
      latency_sum += out.e2e_ms;
      registry_sum += out.mean_registry_delay_ms;
      placed.push_back(&out.placement);
      rec["placement"] = placement_to_json(out.placement);
      rec["registries"] = json(std::vector<NodeId>(out.registry_nodes.begin(),
                                                   out.registry_nodes.end()));
      rec["e2e_ms"] = out.e2e_ms;
      rec["cost"] = json{{"operational", out.cost.operational},
                         {"deployment", out.cost.deployment},
                         {"communication", out.cost.communication},
                         {"total", out.cost.total}};
      rec["registry_delay_ms"] = out.mean_registry_delay_ms;
    } else {
      ++run.result.rejected;
      rec["reason"] = out.reject_reason;
    }
    run.placements.push_back(std::move(rec));
  }
  run.result.avg_latency_ms =
      run.result.accepted > 0 ? latency_sum / run.result.accepted : 0;
  run.result.avg_registry_delay_ms =
      run.result.accepted > 0 ? registry_sum / run.result.accepted : 0;
  run.result.nodes_used = count_nodes_used(placed);
  run.result.wall_time_ms = config.measure_time ? wall : 0;
  return run;
}

CellRun run_epta_cell(const ScenarioConfig& config, const Topology& base,
                      const Catalog& catalog, const std::vector<ServiceRequest>& requests,
                      std::size_t request_count, std::uint64_t seed) {
  CellRun run;
  run.result.solver = Solver::Epta;
  run.result.request_count = request_count;
  run.result.seed = seed;

  Topology topo = base;
  EptaConfig ec;
  if (config.epta_controller) {
    ec.controller = *config.epta_controller;
  } else {
    const auto clouds = topo.node_ids_of_kind(NodeKind::CloudServer);
    if (clouds.empty()) {
      throw std::invalid_argument("no cloud server for the default controller");
    }
    ec.controller = clouds.front();
  }
  ec.deployment_reuse = config.deployment_reuse;

  const auto start = Clock::now();
  const auto outcomes = run_scenario_epta(topo, requests, catalog,
                                          config.delay_threshold_ms, ec,
                                          config.failure_schedule);
  const double wall =
      std::chrono::duration<double, std::milli>(Clock::now() - start).count();

  double latency_sum = 0, registry_sum = 0;
  std::vector<const RequestPlacement*> placed;
  const auto registries = topo.registry_nodes();
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& out = outcomes[i];
    json rec;
    rec["request"] = requests[i].id;
    rec["accepted"] = out.accepted;
    if (out.accepted) {
      ++run.result.accepted;
      run.result.cost += out.cost;
      latency_sum += out.e2e_ms;
      registry_sum += out.mean_registry_delay_ms;
      if (out.retried) {
        ++run.result.retries;
      }
      placed.push_back(&out.placement);
      rec["placement"] = placement_to_json(out.placement);
      rec["registries"] =
          json(std::vector<NodeId>(registries.begin(), registries.end()));
      rec["e2e_ms"] = out.e2e_ms;
      rec["retried"] = out.retried;
      rec["cost"] = json{{"operational", out.cost.operational},
                         {"deployment", out.cost.deployment},
                         {"communication", out.cost.communication},
                         {"total", out.cost.total}};
      rec["registry_delay_ms"] = out.mean_registry_delay_ms;
    } else {
      ++run.result.rejected;
      rec["reason"] = out.reject_reason;
    }
    run.placements.push_back(std::move(rec));
  }
  run.result.avg_latency_ms =
      run.result.accepted > 0 ? latency_sum / run.result.accepted : 0;
  run.result.avg_registry_delay_ms =
      run.result.accepted > 0 ? registry_sum / run.result.accepted : 0;
  run.result.nodes_used = count_nodes_used(placed);
  run.result.wall_time_ms = config.measure_time ? wall : 0;
  return run;
}

CellRun run_exact_cell(const ScenarioConfig& config, const Topology& base,
                       const Catalog& catalog, const std::vector<ServiceRequest>& requests,
                       std::size_t request_count, std::uint64_t seed, bool brute) {
  CellRun run;
  run.result.solver = brute ? Solver::Brute : Solver::Exact;
  run.result.request_count = request_count;
  run.result.seed = seed;

  Topology topo = base;
  // Startup failures apply; the joint solver has no notion of later events.
  for (const auto& event : config.failure_schedule) {
    if (event.before_request == 0) {
      for (const auto& probe : event.probes) {
        if (!probe.acked) {
          topo.set_failed(probe.target, true);
        }
      }
    }
  }

  const auto result =
      brute ? solve_brute(topo, requests, catalog, config.delay_threshold_ms,
                          config.deployment_reuse)
            : solve_exact(topo, requests, catalog, config.delay_threshold_ms,
                          config.exact_budget, config.deployment_reuse);

  run.result.nodes_explored = result.nodes_explored;
  run.result.proven = result.proven;
  run.result.wall_time_ms = config.measure_time ? result.wall_time_ms : 0;
  if (!result.feasible) {
    run.result.solver_failed = true;
    run.result.error = "infeasible";
    run.result.rejected = requests.size();
    return run;
  }
  run.result.accepted = requests.size();
  run.result.cost = result.cost;

  const auto registries = result.placement.registry_nodes;
  double latency_sum = 0, registry_sum = 0;
  std::vector<const RequestPlacement*> placed;
  for (const auto& request : requests) {
    const auto& rp = result.placement.by_request.at(request.id);
    placed.push_back(&rp);
    const double e2e = cost::e2e_delay(rp, request, topo, catalog, registries);
    latency_sum += e2e;
    registry_sum += cost::mean_registry_delay(rp, request, topo, registries);
    json rec;
    rec["request"] = request.id;
    rec["accepted"] = true;
    rec["placement"] = placement_to_json(rp);
    rec["registries"] = json(std::vector<NodeId>(registries.begin(), registries.end()));
    rec["e2e_ms"] = e2e;
    run.placements.push_back(std::move(rec));
  }
  run.result.avg_latency_ms = latency_sum / requests.size();
  run.result.avg_registry_delay_ms = registry_sum / requests.size();
  run.result.nodes_used = count_nodes_used(placed);
  return run;
}

} // namespace

BatchResult run_batch(const ScenarioConfig& config) {
  config.validate();
  BatchResult batch;
  const Topology base = config.use_reference_topology ? build_reference_topology()
                                                      : config.explicit_topology;
  const Catalog catalog = config.explicit_catalog ? *config.explicit_catalog
                                                  : generate_catalog(config.catalog_gen);

  json placements = json::array();
  const Solver order[] = {Solver::Exact, Solver::Brute, Solver::CampInc, Solver::Epta};
  for (const auto request_count : config.request_counts) {
    for (const auto seed : config.seeds) {
      const auto requests =
          generate_requests(catalog, base, request_count, config.chain_len_min,
                            config.chain_len_max, cell_seed(seed, request_count));
      for (const auto solver : order) {
        if (std::find(config.solvers.begin(), config.solvers.end(), solver) ==
            config.solvers.end()) {
          continue;
        }
        CellRun run;
        try {
          switch (solver) {
            case Solver::CampInc:
              run = run_camp_inc_cell(config, base, catalog, requests, request_count, seed);
              break;
            case Solver::Epta:
              run = run_epta_cell(config, base, catalog, requests, request_count, seed);
              break;
            case Solver::Exact:
              run = run_exact_cell(config, base, catalog, requests, request_count, seed,
                                   false);
              break;
            case Solver::Brute:
              run = run_exact_cell(config, base, catalog, requests, request_count, seed,
                                   true);
              break;
          }
        } catch (const std::exception& e) {
          run.result.solver = solver;
          run.result.request_count = request_count;
          run.result.seed = seed;
          run.result.solver_failed = true;
          run.result.error = e.what();
        }
        json cell;
        cell["solver"] = to_string(solver);
        cell["request_count"] = request_count;
        cell["seed"] = seed;
        cell["requests"] = run.placements;
        placements.push_back(std::move(cell));
        batch.cells.push_back(std::move(run.result));
      }
    }
  }
  batch.placements_json = placements.dump(1);
  return batch;
}

void write_batch(const BatchResult& result, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::ofstream csv(out_dir + "/results.csv", std::ios::trunc);
  if (!csv) {
    throw std::runtime_error("cannot write " + out_dir + "/results.csv");
  }
  csv << kCsvHeader << '\n';
  for (const auto& cell : result.cells) {
    csv << to_csv_row(cell) << '\n';
  }
  std::ofstream pj(out_dir + "/placements.json", std::ios::trunc);
  if (!pj) {
    throw std::runtime_error("cannot write " + out_dir + "/placements.json");
  }
  pj << result.placements_json << '\n';
}

} // namespace campinc
