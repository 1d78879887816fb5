#include "campinc/baseline_epta.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <stdexcept>

namespace campinc {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Hop distances on the full graph; the baseline never looks at failures.
std::map<NodeId, std::size_t> hop_distances(const Topology& topology, const NodeId& from) {
  std::map<NodeId, std::size_t> dist;
  std::deque<NodeId> queue;
  dist[from] = 0;
  queue.push_back(from);
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop_front();
    for (const auto& v : topology.neighbors(u)) {
      if (dist.count(v) == 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

Path concat(const Topology& topology, const Path& a, const Path& b) {
  std::vector<NodeId> nodes = a.nodes;
  nodes.insert(nodes.end(), b.nodes.begin() + 1, b.nodes.end());
  return topology.make_path(nodes);
}

std::optional<std::map<ComponentRef, NodeId>> assign(
    const Topology& topology, const std::vector<ComponentRef>& components,
    const Catalog& catalog, const std::vector<NodeId>& ordered_hosts,
    const EptaConfig& config, EptaState& state, bool alive_only,
    std::map<NodeId, double>& working) {
  std::map<ComponentRef, NodeId> hosts;
  for (const auto& c : components) {
    const double need = component_footprint(c, catalog);
    NodeId chosen;
    for (const auto& h : ordered_hosts) {
      if (alive_only && topology.node(h).failed) {
        continue;
      }
      if (config.deployment_reuse && state.deployed.count({c, h}) > 0) {
        chosen = h;
        break;
      }
      if (working[h] + 1e-9 >= need) {
        chosen = h;
        break;
      }
    }
    if (chosen.empty()) {
      return std::nullopt;
    }
    hosts[c] = chosen;
    if (!(config.deployment_reuse && state.deployed.count({c, chosen}) > 0)) {
      working[chosen] -= need;
    }
  }
  return hosts;
}

} // namespace

EptaOutcome place_request_epta(Topology& topology, const ServiceRequest& request,
                               const Catalog& catalog, double delay_threshold_ms,
                               const EptaConfig& config, EptaState& state) {
  (void)delay_threshold_ms; // the baseline does not enforce the delay bound
  const auto start = Clock::now();
  EptaOutcome outcome;
  request.validate(catalog, topology);
  if (!topology.has_node(config.controller)) {
    throw std::invalid_argument("unknown controller node: " + config.controller);
  }

  if (state.residual.empty()) {
    for (const auto& id : topology.node_ids()) {
      const auto& n = topology.node(id);
      if (is_hosting_kind(n.kind)) {
        state.residual[id] = n.residual;
      }
    }
  }

  const auto hops = hop_distances(topology, config.controller);
  std::vector<NodeId> ordered_hosts;
  for (const auto& id : topology.node_ids()) {
    if (is_hosting_kind(topology.node(id).kind) && hops.count(id) > 0) {
      ordered_hosts.push_back(id);
    }
  }
  std::sort(ordered_hosts.begin(), ordered_hosts.end(),
            [&](const NodeId& a, const NodeId& b) {
              if (hops.at(a) != hops.at(b)) {
                return hops.at(a) < hops.at(b);
              }
              return a < b;
            });

  const auto components = components_of(request, catalog);

  // First attempt is failure-blind.
  auto working = state.residual;
  auto hosts = assign(topology, components, catalog, ordered_hosts, config, state,
                      false, working);
  if (hosts) {
    bool landed_on_failed = false;
    for (const auto& [c, h] : *hosts) {
      (void)c;
      if (topology.node(h).failed) {
        landed_on_failed = true;
        break;
      }
    }
    if (landed_on_failed) {
      // The request bounced off a failed node; place again on alive nodes.
      outcome.retried = true;
      working = state.residual;
      hosts = assign(topology, components, catalog, ordered_hosts, config, state,
                     true, working);
    }
  }
  if (!hosts) {
    outcome.reject_reason = "capacity exhausted among hosting nodes";
    outcome.wall_time_ms = elapsed_ms(start);
    return outcome;
  }

  // Routes: chain edges relayed host -> controller -> host; ingress,
  // egress and database edges on direct min-cost paths. All routing is
  // failure-blind.
  RequestPlacement rp;
  rp.component_host = *hosts;
  auto min_cost = [&](const NodeId& a, const NodeId& b) {
    auto p = topology.min_cost_path(a, b, false);
    if (!p) {
      throw std::runtime_error("no route between " + a + " and " + b);
    }
    return *p;
  };
  for (const auto& edge : virtual_edges_of(request, catalog)) {
    const auto& ha = rp.host_of(edge.first);
    const auto& hb = rp.host_of(edge.second);
    if (edge.second.kind == ComponentRef::Kind::Database) {
      rp.edge_route[edge] = min_cost(ha, hb);
    } else {
      rp.edge_route[edge] =
          concat(topology, min_cost(ha, config.controller), min_cost(config.controller, hb));
    }
  }
  const ComponentRef first{ComponentRef::Kind::Microservice, request.chain.front()};
  const ComponentRef last{ComponentRef::Kind::Microservice, request.chain.back()};
  rp.ingress = min_cost(request.selected_content, rp.host_of(first));
  rp.egress = min_cost(rp.host_of(last), request.end_user);

  outcome.accepted = true;
  outcome.placement = rp;
  auto informational = topology.shortest_delay(request.selected_content, request.end_user, false);
  outcome.path = informational ? *informational : Path{};
  outcome.cost = cost::evaluate_request(rp, request, topology, catalog,
                                        config.deployment_reuse ? state.deployed
                                                                : DeployedSet{});

  // Commit residuals and instances after costing against the prior state.
  state.residual = working;
  for (const auto& [c, h] : *hosts) {
    state.deployed.insert({c, h});
  }
  const auto registries = topology.registry_nodes();
  outcome.e2e_ms =
      cost::e2e_delay(rp, request, topology, catalog, registries, false);
  if (outcome.retried) {
    outcome.e2e_ms *= 2; // the failed first attempt is re-dispatched
  }
  outcome.mean_registry_delay_ms =
      cost::mean_registry_delay(rp, request, topology, registries, false);
  outcome.wall_time_ms = elapsed_ms(start);
  return outcome;
}

std::vector<EptaOutcome> run_scenario_epta(Topology& topology,
                                           const std::vector<ServiceRequest>& requests,
                                           const Catalog& catalog, double delay_threshold_ms,
                                           const EptaConfig& config,
                                           const std::vector<FailureEvent>& failure_schedule) {
  std::vector<EptaOutcome> outcomes;
  EptaState state;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    for (const auto& event : failure_schedule) {
      if (event.before_request == i) {
        for (const auto& probe : event.probes) {
          if (!topology.has_node(probe.target)) {
            throw std::invalid_argument("probe for unknown node: " + probe.target);
          }
          if (!probe.acked) {
            topology.set_failed(probe.target, true);
          } else {
            topology.set_failed(probe.target, false);
          }
        }
      }
    }
    outcomes.push_back(
        place_request_epta(topology, requests[i], catalog, delay_threshold_ms, config, state));
  }
  return outcomes;
}

} // namespace campinc
