#pragma once

#include "campinc/cost_model.hpp"
#include "campinc/topology.hpp"
#include "campinc/workload.hpp"

#include <cstdint>
#include <optional>

namespace campinc {

struct SolverResult {
  bool feasible = false;
  bool proven = true; // false when the expansion budget ran out
  Placement placement;
  CostBreakdown cost;
  std::uint64_t nodes_explored = 0;
  double wall_time_ms = 0;
};

// Minimum-total-cost joint placement of all requests subject to capacity,
// delay and mapping constraints. Depth-first assignment in request order
// (chain order, database after its owner) over candidate hosts sorted by
// incremental cost; branches are pruned when the accumulated cost plus an
// admissible bound (each unassigned component's cheapest remaining
// run+deploy cost, zero communication) cannot beat the incumbent. Every
// virtual edge is routed on the minimum-link-cost alive path between the
// chosen hosts. Registries are taken from the topology as given.
SolverResult solve_exact(const Topology& topology,
                         const std::vector<ServiceRequest>& requests,
                         const Catalog& catalog, double delay_threshold_ms,
                         std::uint64_t budget, bool deployment_reuse);

// Exhaustive enumeration over all component-to-host assignments with the
// same routing rule; refuses when hosts^components exceeds the guard.
SolverResult solve_brute(const Topology& topology,
                         const std::vector<ServiceRequest>& requests,
                         const Catalog& catalog, double delay_threshold_ms,
                         bool deployment_reuse,
                         std::uint64_t enumeration_guard = 10'000'000);

} // namespace campinc
