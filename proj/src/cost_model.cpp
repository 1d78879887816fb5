#include "campinc/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace campinc {

const NodeId& RequestPlacement::host_of(const ComponentRef& c) const {
  auto it = component_host.find(c);
  if (it == component_host.end()) {
    throw std::runtime_error("component not covered by placement: " + c.label());
  }
  return it->second;
}

namespace cost {

namespace {

double path_cost(const Path& p) { return p.total_cost; }
double path_delay(const Path& p) { return p.total_delay; }

const Path& route_for(const RequestPlacement& placement, const VirtualEdge& edge) {
  auto it = placement.edge_route.find(edge);
  if (it == placement.edge_route.end()) {
    throw std::runtime_error("virtual edge not routed: " + edge.first.label() + " -> " +
                             edge.second.label());
  }
  return it->second;
}

double nearest_registry_delay(const Topology& topology, const NodeId& host,
                              const std::set<NodeId>& registry_nodes, bool alive_only) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& reg : registry_nodes) {
    auto p = topology.shortest_delay(host, reg, alive_only);
    if (p && p->total_delay < best) {
      best = p->total_delay;
    }
  }
  return best;
}

} // namespace

double operational_cost(const RequestPlacement& placement, const ServiceRequest& request,
                        const Catalog& catalog) {
  double sum = 0;
  for (const auto& c : components_of(request, catalog)) {
    placement.host_of(c); // evaluation error if uncovered
    if (c.kind == ComponentRef::Kind::Microservice) {
      sum += catalog.microservice(c.id).run_cost;
    } else {
      sum += catalog.database(c.id).run_cost;
    }
  }
  return sum;
}

double deployment_cost(const RequestPlacement& placement, const ServiceRequest& request,
                       const Catalog& catalog, const DeployedSet& already_deployed) {
  double sum = 0;
  for (const auto& c : components_of(request, catalog)) {
    const auto& host = placement.host_of(c);
    if (already_deployed.count({c, host}) > 0) {
      continue;
    }
    sum += c.kind == ComponentRef::Kind::Microservice ? catalog.microservice(c.id).deploy_cost
                                                      : catalog.database(c.id).deploy_cost;
  }
  return sum;
}

double communication_cost(const RequestPlacement& placement, const ServiceRequest& request,
                          const Topology& topology) {
  // Catalog is reconstructible from the placement's edge keys, so the edge
  // list stored in the placement itself drives the sum: chain edges in
  // order, then ingress, egress, then database edges.
  double sum = 0;
  std::vector<const Path*> db_routes;
  for (const auto& [edge, route] : placement.edge_route) {
    (void)topology;
    if (edge.second.kind == ComponentRef::Kind::Database) {
      db_routes.push_back(&route);
    } else {
      sum += path_cost(route);
    }
  }
  sum += path_cost(placement.ingress);
  sum += path_cost(placement.egress);
  for (const auto* r : db_routes) {
    sum += path_cost(*r);
  }
  (void)request;
  return sum;
}

double e2e_delay(const RequestPlacement& placement, const ServiceRequest& request,
                 const Topology& topology, const Catalog& catalog,
                 const std::set<NodeId>& registry_nodes, bool alive_only) {
  double sum = 0;
  // (i) routed virtual edges, database edges included
  for (const auto& [edge, route] : placement.edge_route) {
    (void)edge;
    sum += path_delay(route);
  }
  // (ii) processing delays, each chain microservice once
  for (const auto& ms : request.chain) {
    sum += catalog.microservice(ms).processing_delay_ms;
  }
  // (iii) + (iv) ingress/egress
  sum += path_delay(placement.ingress);
  sum += path_delay(placement.egress);
  // (v) container lifecycle on the host's kind
  for (const auto& ms : request.chain) {
    const auto& spec = catalog.microservice(ms);
    const auto& host = placement.host_of(ComponentRef{ComponentRef::Kind::Microservice, ms});
    const auto kind = topology.node(host).kind;
    sum += spec.container_create_ms.at(kind) + spec.container_release_ms.at(kind);
  }
  // (vi) registry term
  for (const auto& ms : request.chain) {
    const auto& host = placement.host_of(ComponentRef{ComponentRef::Kind::Microservice, ms});
    const double d = nearest_registry_delay(topology, host, registry_nodes, alive_only);
    if (!std::isfinite(d)) {
      throw std::runtime_error("no registry reachable from " + host);
    }
    sum += d;
  }
  return sum;
}

double mean_registry_delay(const RequestPlacement& placement, const ServiceRequest& request,
                           const Topology& topology,
                           const std::set<NodeId>& registry_nodes, bool alive_only) {
  double sum = 0;
  for (const auto& ms : request.chain) {
    const auto& host = placement.host_of(ComponentRef{ComponentRef::Kind::Microservice, ms});
    const double d = nearest_registry_delay(topology, host, registry_nodes, alive_only);
    if (!std::isfinite(d)) {
      throw std::runtime_error("no registry reachable from " + host);
    }
    sum += d;
  }
  return sum / static_cast<double>(request.chain.size());
}

CostBreakdown evaluate_request(const RequestPlacement& placement,
                               const ServiceRequest& request, const Topology& topology,
                               const Catalog& catalog, const DeployedSet& already_deployed) {
  return CostBreakdown::make(operational_cost(placement, request, catalog),
                             deployment_cost(placement, request, catalog, already_deployed),
                             communication_cost(placement, request, topology));
}

CostBreakdown evaluate_batch(const Placement& placement,
                             const std::vector<ServiceRequest>& requests,
                             const Topology& topology, const Catalog& catalog,
                             bool deployment_reuse, DeployedSet deployed) {
  CostBreakdown sum;
  for (const auto& request : requests) {
    auto it = placement.by_request.find(request.id);
    if (it == placement.by_request.end()) {
      throw std::runtime_error("request not covered by placement: " + request.id);
    }
    sum += evaluate_request(it->second, request, topology, catalog, deployed);
    if (deployment_reuse) {
      for (const auto& [c, host] : it->second.component_host) {
        deployed.insert({c, host});
      }
    }
  }
  return sum;
}

FeasibilityVerdict check_feasible(const Placement& placement,
                                  const std::vector<ServiceRequest>& requests,
                                  const Topology& topology, const Catalog& catalog,
                                  double delay_threshold_ms, bool deployment_reuse) {
  FeasibilityVerdict verdict;
  auto violate = [&](const std::string& code, const std::string& message) {
    verdict.feasible = false;
    verdict.violations.push_back(Violation{code, message});
  };

  std::map<NodeId, double> load;
  DeployedSet counted;

  for (const auto& request : requests) {
    auto it = placement.by_request.find(request.id);
    if (it == placement.by_request.end()) {
      violate("mapping", "request " + request.id + " has no placement");
      continue;
    }
    const auto& rp = it->second;
    const auto components = components_of(request, catalog);

    for (const auto& c : components) {
      auto hit = rp.component_host.find(c);
      if (hit == rp.component_host.end()) {
        violate("mapping", "request " + request.id + ": component " + c.label() +
                               " is unmapped");
        continue;
      }
      const auto& host = hit->second;
      if (!topology.has_node(host)) {
        violate("mapping", "request " + request.id + ": unknown host " + host);
        continue;
      }
      const auto& n = topology.node(host);
      if (!is_hosting_kind(n.kind)) {
        violate("mapping", "request " + request.id + ": component " + c.label() +
                               " on non-hosting node " + host);
      }
      if (n.failed) {
        violate("mapping", "request " + request.id + ": component " + c.label() +
                               " on failed node " + host);
      }
      if (!deployment_reuse || counted.insert({c, host}).second) {
        load[host] += component_footprint(c, catalog);
      }
    }

    // Every virtual edge on exactly one valid route.
    for (const auto& edge : virtual_edges_of(request, catalog)) {
      auto rit = rp.edge_route.find(edge);
      if (rit == rp.edge_route.end()) {
        violate("mapping", "request " + request.id + ": virtual edge " +
                               edge.first.label() + "->" + edge.second.label() +
                               " is unrouted");
        continue;
      }
      const auto& route = rit->second;
      auto ha = rp.component_host.find(edge.first);
      auto hb = rp.component_host.find(edge.second);
      if (ha == rp.component_host.end() || hb == rp.component_host.end()) {
        continue; // already reported
      }
      if (route.empty() || route.front() != ha->second || route.back() != hb->second) {
        violate("mapping", "request " + request.id + ": route endpoints do not match hosts for " +
                               edge.first.label() + "->" + edge.second.label());
        continue;
      }
      for (std::size_t i = 0; i + 1 < route.nodes.size(); ++i) {
        if (!topology.has_link(route.nodes[i], route.nodes[i + 1])) {
          violate("mapping", "request " + request.id + ": route uses missing link " +
                                 route.nodes[i] + "-" + route.nodes[i + 1]);
          break;
        }
      }
    }

    // C2 with the registry term.
    bool mapped = true;
    for (const auto& c : components) {
      if (rp.component_host.count(c) == 0) {
        mapped = false;
      }
    }
    if (mapped) {
      try {
        const double delay =
            e2e_delay(rp, request, topology, catalog, placement.registry_nodes);
        if (delay > delay_threshold_ms + 1e-9) {
          violate("C2", "request " + request.id + ": e2e delay " + std::to_string(delay) +
                            " exceeds threshold " + std::to_string(delay_threshold_ms));
        }
      } catch (const std::exception& e) {
        violate("C2", "request " + request.id + ": " + e.what());
      }
    }
  }

  for (const auto& [node, used] : load) {
    if (!topology.has_node(node)) {
      continue;
    }
    if (used > topology.node(node).capacity + 1e-9) {
      violate("C1", "node " + node + ": assigned load " + std::to_string(used) +
                        " exceeds capacity " +
                        std::to_string(topology.node(node).capacity));
    }
  }
  return verdict;
}

} // namespace cost

RequestPlacement route_request(const Topology& topology, const ServiceRequest& request,
                               const Catalog& catalog,
                               const std::map<ComponentRef, NodeId>& hosts,
                               bool alive_only) {
  RequestPlacement rp;
  rp.component_host = hosts;
  auto min_cost_route = [&](const NodeId& a, const NodeId& b) {
    auto p = topology.min_cost_path(a, b, alive_only);
    if (!p) {
      throw std::runtime_error("no route between " + a + " and " + b);
    }
    return *p;
  };
  for (const auto& edge : virtual_edges_of(request, catalog)) {
    rp.edge_route[edge] = min_cost_route(rp.host_of(edge.first), rp.host_of(edge.second));
  }
  const ComponentRef first{ComponentRef::Kind::Microservice, request.chain.front()};
  const ComponentRef last{ComponentRef::Kind::Microservice, request.chain.back()};
  rp.ingress = min_cost_route(request.selected_content, rp.host_of(first));
  rp.egress = min_cost_route(rp.host_of(last), request.end_user);
  return rp;
}

} // namespace campinc
