#pragma once

#include "campinc/camp_inc.hpp"
#include "campinc/cost_model.hpp"
#include "campinc/topology.hpp"
#include "campinc/workload.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace campinc {

// Controller-centric comparison baseline. Components are packed onto
// nodes in ascending hop distance from the controller, failure flags are
// ignored at placement time, and every chain edge is relayed through the
// controller. Three published behaviors are reproduced: controller
// proximity, controller relay, failure blindness.
struct EptaConfig {
  NodeId controller;
  bool deployment_reuse = true;
};

struct EptaState {
  DeployedSet deployed;
  std::map<NodeId, double> residual; // tracked blindly, failed nodes included
};

struct EptaOutcome {
  bool accepted = false;
  std::string reject_reason;
  RequestPlacement placement;
  Path path;
  CostBreakdown cost;
  double e2e_ms = 0;      // doubled when a placement failure forced a retry
  double mean_registry_delay_ms = 0;
  bool retried = false;
  double wall_time_ms = 0;
};

EptaOutcome place_request_epta(Topology& topology, const ServiceRequest& request,
                               const Catalog& catalog, double delay_threshold_ms,
                               const EptaConfig& config, EptaState& state);

std::vector<EptaOutcome> run_scenario_epta(Topology& topology,
                                           const std::vector<ServiceRequest>& requests,
                                           const Catalog& catalog, double delay_threshold_ms,
                                           const EptaConfig& config,
                                           const std::vector<FailureEvent>& failure_schedule);

} // namespace campinc
