#include "campinc/camp_inc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace campinc {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

} // namespace

struct Orchestrator::Candidate {
  std::size_t path_index = 0;
  RequestPlacement placement;
  CostBreakdown cost;
  double e2e_ms = 0;
  bool registry_added = false;
  NodeId new_registry;
  std::map<NodeId, double> working_residual;
};

std::optional<NodeId> Orchestrator::pick_registry_site(
    const Topology& topology, const std::map<ComponentRef, NodeId>& hosts,
    double delay_threshold_ms, const std::map<NodeId, double>& working_residual) const {
  // Union of the hosting nodes' neighbors, lexicographic order.
  std::set<NodeId> neighborhood;
  std::set<NodeId> host_set;
  for (const auto& [c, h] : hosts) {
    (void)c;
    host_set.insert(h);
    for (const auto& nb : topology.neighbors(h)) {
      neighborhood.insert(nb);
    }
  }
  for (const auto& n : neighborhood) {
    const auto& pn = topology.node(n);
    if (!is_hosting_kind(pn.kind) || pn.failed) {
      continue;
    }
    if (pn.hosts_registry) {
      return n; // already a registry here: placing again is a no-op
    }
    auto rit = working_residual.find(n);
    const double residual = rit != working_residual.end() ? rit->second : pn.residual;
    if (residual + 1e-9 < config_.registry.footprint()) {
      continue;
    }
    // SatisfyDelay: every hosting node within the threshold.
    bool ok = true;
    for (const auto& h : host_set) {
      auto p = topology.shortest_delay(n, h, true);
      if (!p || p->total_delay > delay_threshold_ms + 1e-9) {
        ok = false;
        break;
      }
    }
    if (ok) {
      return n;
    }
  }
  return std::nullopt;
}

bool Orchestrator::registry_decision(const Topology& topology, const Path& path,
                                     double delay_threshold_ms) const {
  const auto registries = topology.registry_nodes();
  if (registries.empty()) {
    throw std::runtime_error("registry decision requires at least one registry");
  }
  for (const auto& reg : registries) {
    double sum = 0;
    bool reachable = true;
    for (const auto& n : path.nodes) {
      auto p = topology.shortest_delay(n, reg, true);
      if (!p) {
        reachable = false;
        break;
      }
      sum += p->total_delay;
    }
    if (!reachable || sum > delay_threshold_ms + 1e-9) {
      return true;
    }
  }
  return false;
}

PlaceOutcome Orchestrator::place_request(Topology& topology, const ServiceRequest& request,
                                         const Catalog& catalog,
                                         double delay_threshold_ms) {
  const auto start = Clock::now();
  PlaceOutcome outcome;
  outcome.registry_nodes = topology.registry_nodes();

  request.validate(catalog, topology);

  const auto paths = topology.k_shortest_paths(request.selected_content, request.end_user,
                                               delay_threshold_ms, config_.k_paths);
  if (paths.empty()) {
    outcome.reject_reason = "no feasible path between content node and end user";
    outcome.wall_time_ms = elapsed_ms(start);
    return outcome;
  }

  const auto components = components_of(request, catalog);
  std::vector<Candidate> candidates;

  for (std::size_t pi = 0; pi < paths.size(); ++pi) {
    const auto& path = paths[pi];
    const auto ranks = topology.rank_nodes(path);
    if (ranks.empty()) {
      continue; // no hosting-capable node on this path
    }
    std::map<NodeId, double> working;
    for (const auto& [n, _] : ranks) {
      working[n] = topology.node(n).residual;
    }

    std::map<ComponentRef, NodeId> hosts;
    bool bad_path = false;
    for (const auto& c : components) {
      const double need = component_footprint(c, catalog);
      NodeId best_node;
      double best_rank = -1;
      for (const auto& [n, score] : ranks) {
        const bool reusable = config_.deployment_reuse && deployed_.count({c, n}) > 0;
        if (!reusable && working[n] + 1e-9 < need) {
          continue;
        }
        if (score > best_rank + 1e-15) {
          best_rank = score;
          best_node = n;
        }
        // equal scores resolve to the smaller id, which the map order
        // already guarantees
      }
      if (best_node.empty()) {
        bad_path = true;
        break;
      }
      hosts[c] = best_node;
      if (!(config_.deployment_reuse && deployed_.count({c, best_node}) > 0)) {
        working[best_node] -= need;
      }
    }
    if (bad_path) {
      continue;
    }

    Candidate cand;
    cand.path_index = pi;
    try {
      cand.placement = route_request(topology, request, catalog, hosts, true);
    } catch (const std::exception&) {
      continue; // hosts unreachable over the alive subgraph
    }
    cand.cost = cost::evaluate_request(cand.placement, request, topology, catalog,
                                       config_.deployment_reuse ? deployed_ : DeployedSet{});
    cand.working_residual = working;

    // Registry manager, evaluated tentatively per candidate so the delay
    // gate sees the registry set this placement would run with.
    auto registries = topology.registry_nodes();
    if (registry_decision(topology, path, delay_threshold_ms)) {
      auto site = pick_registry_site(topology, hosts, delay_threshold_ms, working);
      if (site && registries.count(*site) == 0) {
        cand.registry_added = true;
        cand.new_registry = *site;
        registries.insert(*site);
      }
    }
    try {
      cand.e2e_ms = cost::e2e_delay(cand.placement, request, topology, catalog, registries);
    } catch (const std::exception&) {
      continue; // no reachable registry: candidate unusable
    }
    if (cand.e2e_ms > delay_threshold_ms + 1e-9) {
      continue; // delay threshold violated even with the new registry
    }
    candidates.push_back(std::move(cand));
  }

  if (candidates.empty()) {
    outcome.reject_reason = "no candidate path admits a feasible placement";
    outcome.wall_time_ms = elapsed_ms(start);
    return outcome;
  }

  const auto best =
      std::min_element(candidates.begin(), candidates.end(),
                       [](const Candidate& a, const Candidate& b) {
                         if (a.cost.total != b.cost.total) {
                           return a.cost.total < b.cost.total;
                         }
                         return a.path_index < b.path_index;
                       });

  // Commit: residuals, instances, registry.
  for (const auto& [c, host] : best->placement.component_host) {
    if (config_.deployment_reuse && deployed_.count({c, host}) > 0) {
      continue;
    }
    topology.reserve(host, component_footprint(c, catalog));
    deployed_.insert({c, host});
  }
  if (best->registry_added) {
    topology.set_registry(best->new_registry, true);
    topology.reserve(best->new_registry, config_.registry.footprint());
    if (config_.include_registry_costs) {
      best->cost += CostBreakdown::make(config_.registry.run_cost,
                                        config_.registry.deploy_cost, 0);
    }
  }

  outcome.accepted = true;
  outcome.placement = best->placement;
  outcome.path = paths[best->path_index];
  outcome.cost = best->cost;
  outcome.e2e_ms = best->e2e_ms;
  outcome.registry_added = best->registry_added;
  outcome.new_registry = best->new_registry;
  outcome.registry_nodes = topology.registry_nodes();
  outcome.mean_registry_delay_ms = cost::mean_registry_delay(
      best->placement, request, topology, outcome.registry_nodes);
  outcome.wall_time_ms = elapsed_ms(start);
  return outcome;
}

bool Orchestrator::failure_tick(Topology& topology, const std::vector<NodeProbe>& probes) {
  bool changed = false;
  for (const auto& probe : probes) {
    if (!topology.has_node(probe.target)) {
      throw std::invalid_argument("probe for unknown node: " + probe.target);
    }
    const bool was_failed = topology.node(probe.target).failed;
    if (!probe.acked && !was_failed) {
      topology.set_failed(probe.target, true);
      failed_set_.insert(probe.target);
      changed = true;
    } else if (probe.acked && was_failed && config_.node_recovery) {
      topology.set_failed(probe.target, false);
      failed_set_.erase(probe.target);
      changed = true;
    }
  }
  return changed;
}

std::vector<RequestOutcome> run_scenario(Orchestrator& orchestrator, Topology& topology,
                                         const std::vector<ServiceRequest>& requests,
                                         const Catalog& catalog, double delay_threshold_ms,
                                         const std::vector<FailureEvent>& failure_schedule) {
  std::vector<RequestOutcome> outcomes;
  outcomes.reserve(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i) {
    for (const auto& event : failure_schedule) {
      if (event.before_request == i) {
        orchestrator.failure_tick(topology, event.probes);
      }
    }
    RequestOutcome out;
    out.request_id = requests[i].id;
    out.place = orchestrator.place_request(topology, requests[i], catalog, delay_threshold_ms);
    outcomes.push_back(std::move(out));
  }
  return outcomes;
}

} // namespace campinc
