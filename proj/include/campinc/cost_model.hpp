#pragma once

#include "campinc/topology.hpp"
#include "campinc/workload.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace campinc {

// Instances already deployed, as (component, node) pairs. With deployment
// reuse enabled an instance persists for the rest of the scenario: further
// requests mapping the same component to the same node pay no deployment
// cost and consume no extra capacity.
using DeployedSet = std::set<std::pair<ComponentRef, NodeId>>;

// Placement of one request: the X/Y columns for its components, the
// realized route of every virtual edge, and the ingress/egress routes
// from the selected content node and to the end user.
struct RequestPlacement {
  std::map<ComponentRef, NodeId> component_host;
  std::map<VirtualEdge, Path> edge_route;
  Path ingress;
  Path egress;

  const NodeId& host_of(const ComponentRef& c) const;
};

// Joint placement decision: per-request placements plus the registry
// locations in effect for this solution.
struct Placement {
  std::map<std::string, RequestPlacement> by_request;
  std::set<NodeId> registry_nodes;
};

struct CostBreakdown {
  double operational = 0;
  double deployment = 0;
  double communication = 0;
  double total = 0;

  static CostBreakdown make(double op, double dep, double comm) {
    return CostBreakdown{op, dep, comm, op + dep + comm};
  }
  CostBreakdown& operator+=(const CostBreakdown& o) {
    operational += o.operational;
    deployment += o.deployment;
    communication += o.communication;
    total = operational + deployment + communication;
    return *this;
  }
};

struct Violation {
  std::string code; // "C1", "C2", "mapping"
  std::string message;
};

struct FeasibilityVerdict {
  bool feasible = true;
  std::vector<Violation> violations;
};

namespace cost {

// Eq. 1: sum of run costs of the request's placed components.
double operational_cost(const RequestPlacement& placement, const ServiceRequest& request,
                        const Catalog& catalog);

// Eq. 2: sum of deploy costs over (component, node) pairs not already
// deployed. Does not mutate already_deployed.
double deployment_cost(const RequestPlacement& placement, const ServiceRequest& request,
                       const Catalog& catalog, const DeployedSet& already_deployed);

// Eq. 3: link costs of all routed virtual edges plus the ingress and
// egress routes. Stored routes are used as-is; zero when co-located.
double communication_cost(const RequestPlacement& placement, const ServiceRequest& request,
                          const Topology& topology);

// Constraint C2 left side: (i) routed virtual-edge delays, (ii) processing
// delays of chain microservices, (iii) ingress route delay, (iv) egress
// route delay, (v) container create+release per chain microservice on its
// host's kind, (vi) delay to the nearest registry, summed over chain
// microservices. Throws when a microservice host cannot reach any
// registry. alive_only governs the registry-path metric (the failure-blind
// baseline evaluates it on the full graph).
double e2e_delay(const RequestPlacement& placement, const ServiceRequest& request,
                 const Topology& topology, const Catalog& catalog,
                 const std::set<NodeId>& registry_nodes, bool alive_only = true);

// Mean over chain microservices of the delay to the nearest registry.
double mean_registry_delay(const RequestPlacement& placement, const ServiceRequest& request,
                           const Topology& topology,
                           const std::set<NodeId>& registry_nodes, bool alive_only = true);

CostBreakdown evaluate_request(const RequestPlacement& placement,
                               const ServiceRequest& request, const Topology& topology,
                               const Catalog& catalog, const DeployedSet& already_deployed);

// Evaluates all requests jointly, threading the deployed set in request
// order when deployment_reuse is set.
CostBreakdown evaluate_batch(const Placement& placement,
                             const std::vector<ServiceRequest>& requests,
                             const Topology& topology, const Catalog& catalog,
                             bool deployment_reuse,
                             DeployedSet initially_deployed = {});

// Checks C1 (capacity, deduplicating shared instances when
// deployment_reuse is set), C2 (end-to-end delay with the registry term)
// and the mapping constraints (every component on exactly one alive
// hosting-capable node, every virtual edge on one valid route). Collects
// all violations.
FeasibilityVerdict check_feasible(const Placement& placement,
                                  const std::vector<ServiceRequest>& requests,
                                  const Topology& topology, const Catalog& catalog,
                                  double delay_threshold_ms, bool deployment_reuse);

} // namespace cost

// Builds the placement record for fixed component hosts: every virtual
// edge is routed on the minimum-link-cost alive path between its hosts,
// the ingress route runs from the selected content node to the first
// chain microservice's host and the egress route from the last host to
// the end user. Throws when some route does not exist.
RequestPlacement route_request(const Topology& topology, const ServiceRequest& request,
                               const Catalog& catalog,
                               const std::map<ComponentRef, NodeId>& hosts,
                               bool alive_only = true);

} // namespace campinc
