#pragma once

#include "campinc/cost_model.hpp"
#include "campinc/topology.hpp"
#include "campinc/workload.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace campinc {

struct NodeProbe {
  NodeId target;
  bool acked = false;
};

// Capacity and pricing of a service registry instance, shaped like a
// database component.
struct RegistryFootprint {
  double cpu_demand = 10;
  double container_overhead = 10;
  double run_cost = 1;
  double deploy_cost = 50;

  double footprint() const { return cpu_demand + container_overhead; }
};

struct OrchestratorConfig {
  std::size_t k_paths = 4;
  double probe_period_ms = 1000;
  bool node_recovery = true;      // a successful probe clears the failure flag
  bool deployment_reuse = true;   // instances persist across requests
  bool include_registry_costs = false;
  RegistryFootprint registry;
};

struct PlaceOutcome {
  bool accepted = false;
  std::string reject_reason;
  RequestPlacement placement;
  Path path; // the content-to-user path the placement was built on
  CostBreakdown cost;
  double e2e_ms = 0;
  double mean_registry_delay_ms = 0;
  bool registry_added = false;
  NodeId new_registry;
  std::set<NodeId> registry_nodes; // in effect for this request
  double wall_time_ms = 0;
};

struct FailureEvent {
  std::size_t before_request = 0;
  std::vector<NodeProbe> probes;
};

// Placement manager, failure detector and registry manager over one
// topology. The orchestrator is the single writer of its topology's
// failure flags, registry flags and residuals.
class Orchestrator {
public:
  explicit Orchestrator(OrchestratorConfig config = {}) : config_(config) {}

  const OrchestratorConfig& config() const { return config_; }
  const std::set<NodeId>& failed_set() const { return failed_set_; }
  const DeployedSet& deployed_instances() const { return deployed_; }

  // One request through the placement manager: k candidate paths between
  // the selected content node and the end user, greedy rank-based
  // assignment per path, cheapest assignable candidate wins, then the
  // registry manager may add a registry near the chosen hosts. A request
  // is accepted only when its end-to-end delay, registry term included,
  // meets the threshold; acceptance commits residuals, instances and any
  // new registry atomically.
  PlaceOutcome place_request(Topology& topology, const ServiceRequest& request,
                             const Catalog& catalog, double delay_threshold_ms);

  // One failure-detector sweep. Unacked nodes are marked failed; acked
  // nodes recover when node_recovery is on. Returns true when the failed
  // set changed (the placement-manager notification).
  bool failure_tick(Topology& topology, const std::vector<NodeProbe>& probes);

  // Registry manager: true when some existing registry is too far from
  // the path. The distance between a path and a registry is the sum over
  // path nodes of the shortest alive-path delay to that registry,
  // mirroring the per-chain registry sum in the delay constraint.
  bool registry_decision(const Topology& topology, const Path& path,
                         double delay_threshold_ms) const;

private:
  struct Candidate;
  std::optional<NodeId> pick_registry_site(const Topology& topology,
                                           const std::map<ComponentRef, NodeId>& hosts,
                                           double delay_threshold_ms,
                                           const std::map<NodeId, double>& working_residual) const;

  OrchestratorConfig config_;
  std::set<NodeId> failed_set_;
  DeployedSet deployed_;
};

struct RequestOutcome {
  std::string request_id;
  PlaceOutcome place;
};

// Processes requests in order, applying scheduled probe batches before
// each request. Outcomes carry rejections; nothing throws per request.
std::vector<RequestOutcome> run_scenario(Orchestrator& orchestrator, Topology& topology,
                                         const std::vector<ServiceRequest>& requests,
                                         const Catalog& catalog, double delay_threshold_ms,
                                         const std::vector<FailureEvent>& failure_schedule);

} // namespace campinc
