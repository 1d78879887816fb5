#pragma once

#include "campinc/baseline_epta.hpp"
#include "campinc/camp_inc.hpp"
#include "campinc/exact_solver.hpp"
#include "campinc/topology.hpp"
#include "campinc/workload.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace campinc {

enum class Solver { Exact, Brute, CampInc, Epta };

std::string to_string(Solver s);
Solver solver_from_string(const std::string& s);

// Parameters for the generated default catalog.
struct CatalogGenSpec {
  std::size_t count = 10;
  double cpu_min = 50, cpu_max = 150;
  double overhead = 20;
  double processing_min = 1, processing_max = 5;
  double run_cost_min = 1, run_cost_max = 10;
  double deploy_cost = 100;
  double container_ms = 0.5;
  double database_fraction = 0.6;
  double db_overhead = 20;
  double db_deploy_cost = 50;
  std::uint64_t seed = 1;
};

struct ScenarioConfig {
  // Topology: either the reference preset or an explicit node/link list.
  bool use_reference_topology = true;
  Topology explicit_topology;

  // Catalog: explicit, or generated from the spec below.
  std::optional<Catalog> explicit_catalog;
  CatalogGenSpec catalog_gen;

  std::vector<std::size_t> request_counts{5, 10, 15, 20, 25, 30};
  std::size_t chain_len_min = 3;
  std::size_t chain_len_max = 5;
  double delay_threshold_ms = 100;
  std::size_t k_paths = 4;
  double probe_period_ms = 1000;
  std::vector<FailureEvent> failure_schedule;
  std::vector<std::uint64_t> seeds{1};
  std::vector<Solver> solvers{Solver::Exact, Solver::CampInc, Solver::Epta};
  bool deployment_reuse = true;
  bool include_registry_costs = false;
  bool node_recovery = true;
  std::uint64_t exact_budget = 2'000'000;
  std::optional<NodeId> epta_controller; // default: the CloudServer node
  RegistryFootprint registry_footprint;
  bool measure_time = true;

  void validate() const;
};

// Reference network: 4 end users and 4 content generators split over two
// base stations, one edge server per station, a 2x3 grid of network
// devices as the core, and a cloud server hosting the initial registry.
Topology build_reference_topology();

// Deterministic default catalog (uniform draws per the generation spec).
Catalog generate_catalog(const CatalogGenSpec& spec);

ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config_json(const std::string& text);

// Per-(solver, request_count, seed) metrics, one CSV row each.
struct CellResult {
  Solver solver = Solver::CampInc;
  std::size_t request_count = 0;
  std::uint64_t seed = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  CostBreakdown cost;
  double avg_latency_ms = 0;
  double avg_registry_delay_ms = 0;
  std::size_t nodes_used = 0;
  std::size_t retries = 0;
  double wall_time_ms = 0;
  std::uint64_t nodes_explored = 0;
  bool proven = true;
  bool solver_failed = false;
  std::string error;
};

struct BatchResult {
  std::vector<CellResult> cells;
  // request placements for the audit pass, keyed (solver, count, seed)
  std::string placements_json;
};

extern const char* kCsvHeader;
std::string to_csv_row(const CellResult& cell);

// Derives the per-cell RNG seed from the batch seed and request count.
std::uint64_t cell_seed(std::uint64_t seed, std::size_t request_count);

// Runs every enabled solver on identical inputs for every
// (request_count, seed) cell. A solver failure is recorded in its cell
// and the batch continues.
BatchResult run_batch(const ScenarioConfig& config);

// Writes results.csv and placements.json under out_dir.
void write_batch(const BatchResult& result, const std::string& out_dir);

// Recomputes every recorded metric from the stored placements and
// compares against results.csv. Returns the list of mismatches.
std::vector<std::string> audit_run(const std::string& dir);

} // namespace campinc
