#include "campinc/exact_solver.hpp"

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

struct FlatComponent {
  std::size_t request_index;
  ComponentRef ref;
  double footprint;
  double run_cost;
  double deploy_cost;
  bool first_of_chain;
  bool last_of_chain;
  std::optional<ComponentRef> routed_from; // previous chain member or db owner
};

std::vector<FlatComponent> flatten(const std::vector<ServiceRequest>& requests,
                                   const Catalog& catalog) {
  std::vector<FlatComponent> out;
  for (std::size_t r = 0; r < requests.size(); ++r) {
    const auto& req = requests[r];
    for (std::size_t i = 0; i < req.chain.size(); ++i) {
      const auto& spec = catalog.microservice(req.chain[i]);
      FlatComponent fc;
      fc.request_index = r;
      fc.ref = ComponentRef{ComponentRef::Kind::Microservice, req.chain[i]};
      fc.footprint = spec.footprint();
      fc.run_cost = spec.run_cost;
      fc.deploy_cost = spec.deploy_cost;
      fc.first_of_chain = i == 0;
      fc.last_of_chain = i + 1 == req.chain.size();
      if (i > 0) {
        fc.routed_from = ComponentRef{ComponentRef::Kind::Microservice, req.chain[i - 1]};
      }
      out.push_back(fc);
      if (spec.needs_database) {
        const auto& db = catalog.database_for(req.chain[i]);
        FlatComponent dc;
        dc.request_index = r;
        dc.ref = ComponentRef{ComponentRef::Kind::Database, db.id};
        dc.footprint = db.footprint();
        dc.run_cost = db.run_cost;
        dc.deploy_cost = db.deploy_cost;
        dc.first_of_chain = false;
        dc.last_of_chain = false;
        dc.routed_from = fc.ref;
        out.push_back(dc);
      }
    }
  }
  return out;
}

struct SearchContext {
  const Topology& topology;
  const std::vector<ServiceRequest>& requests;
  const Catalog& catalog;
  double delay_threshold;
  bool reuse;
  std::uint64_t budget;
  std::vector<FlatComponent> components;
  std::vector<NodeId> hosts;
  std::set<NodeId> registries;

  std::map<NodeId, double> residual;
  DeployedSet deployed;
  std::vector<NodeId> assignment;    // per component index
  std::vector<double> suffix_bound;  // precomputed when reuse is off

  double incumbent_cost = std::numeric_limits<double>::infinity();
  std::vector<NodeId> incumbent;
  std::uint64_t explored = 0;
  bool exhausted = false;
};

Placement build_placement(SearchContext& ctx, const std::vector<NodeId>& assignment) {
  Placement placement;
  placement.registry_nodes = ctx.registries;
  std::map<std::size_t, std::map<ComponentRef, NodeId>> hosts_by_request;
  for (std::size_t i = 0; i < ctx.components.size(); ++i) {
    hosts_by_request[ctx.components[i].request_index][ctx.components[i].ref] = assignment[i];
  }
  for (const auto& [r, hosts] : hosts_by_request) {
    placement.by_request[ctx.requests[r].id] =
        route_request(ctx.topology, ctx.requests[r], ctx.catalog, hosts, true);
  }
  return placement;
}

// Run+deploy cost of the cheapest way of hosting each still-unassigned
// component, communication ignored; admissible against any completion.
// Under reuse a deploy cost counts at most once per component type: the
// first copy may deploy, the rest can share it.
double remaining_bound(const SearchContext& ctx, std::size_t from) {
  if (!ctx.reuse) {
    return ctx.suffix_bound[from];
  }
  double bound = 0;
  std::set<ComponentRef> charged;
  for (std::size_t i = from; i < ctx.components.size(); ++i) {
    const auto& fc = ctx.components[i];
    bound += fc.run_cost;
    bool reusable = false;
    for (const auto& [ref, host] : ctx.deployed) {
      (void)host;
      if (ref == fc.ref) {
        reusable = true;
        break;
      }
    }
    if (!reusable && charged.insert(fc.ref).second) {
      bound += fc.deploy_cost;
    }
  }
  return bound;
}

void dfs(SearchContext& ctx, std::size_t index, double accumulated) {
  if (ctx.exhausted) {
    return;
  }
  if (index == ctx.components.size()) {
    if (accumulated < ctx.incumbent_cost - 1e-12) {
      ctx.incumbent_cost = accumulated;
      ctx.incumbent = ctx.assignment;
    }
    return;
  }
  if (accumulated + remaining_bound(ctx, index) >= ctx.incumbent_cost - 1e-12) {
    return;
  }
  const auto& fc = ctx.components[index];
  const auto& request = ctx.requests[fc.request_index];

  struct Candidate {
    double incremental;
    NodeId host;
    bool new_instance;
  };
  std::vector<Candidate> candidates;
  for (const auto& h : ctx.hosts) {
    const bool reused = ctx.reuse && ctx.deployed.count({fc.ref, h}) > 0;
    if (!reused && ctx.residual[h] + 1e-9 < fc.footprint) {
      continue;
    }
    double inc = fc.run_cost + (reused ? 0.0 : fc.deploy_cost);
    bool routable = true;
    auto add_route = [&](const NodeId& a, const NodeId& b) {
      const auto p = ctx.topology.min_cost_path(a, b, true);
      if (!p) {
        routable = false;
      } else {
        inc += p->total_cost;
      }
    };
    if (fc.routed_from) {
      // predecessor already assigned: scan backwards for its host
      NodeId prev_host;
      for (std::size_t j = index; j-- > 0;) {
        if (ctx.components[j].request_index == fc.request_index &&
            ctx.components[j].ref == *fc.routed_from) {
          prev_host = ctx.assignment[j];
          break;
        }
      }
      add_route(prev_host, h);
    }
    if (fc.first_of_chain) {
      add_route(request.selected_content, h);
    }
    if (fc.last_of_chain) {
      add_route(h, request.end_user);
    }
    if (routable) {
      candidates.push_back(Candidate{inc, h, !reused});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.incremental != b.incremental) {
      return a.incremental < b.incremental;
    }
    return a.host < b.host;
  });

  const bool completes_request =
      index + 1 == ctx.components.size() ||
      ctx.components[index + 1].request_index != fc.request_index;

  for (const auto& cand : candidates) {
    if (ctx.exhausted) {
      return;
    }
    if (++ctx.explored > ctx.budget) {
      ctx.exhausted = true;
      return;
    }
    if (accumulated + cand.incremental + remaining_bound(ctx, index + 1) >=
        ctx.incumbent_cost - 1e-12) {
      continue;
    }
    ctx.assignment[index] = cand.host;
    const bool charge_capacity = cand.new_instance || !ctx.reuse;
    if (charge_capacity) {
      ctx.residual[cand.host] -= fc.footprint;
    }
    bool inserted = false;
    if (ctx.reuse && cand.new_instance) {
      inserted = ctx.deployed.insert({fc.ref, cand.host}).second;
    }

    bool delay_ok = true;
    if (completes_request) {
      std::map<ComponentRef, NodeId> hosts;
      for (std::size_t j = 0; j <= index; ++j) {
        if (ctx.components[j].request_index == fc.request_index) {
          hosts[ctx.components[j].ref] = ctx.assignment[j];
        }
      }
      try {
        auto rp = route_request(ctx.topology, request, ctx.catalog, hosts, true);
        const double delay = cost::e2e_delay(rp, request, ctx.topology, ctx.catalog,
                                             ctx.registries, true);
        delay_ok = delay <= ctx.delay_threshold + 1e-9;
      } catch (const std::exception&) {
        delay_ok = false;
      }
    }
    if (delay_ok) {
      dfs(ctx, index + 1, accumulated + cand.incremental);
    }

    if (inserted) {
      ctx.deployed.erase({fc.ref, cand.host});
    }
    if (charge_capacity) {
      ctx.residual[cand.host] += fc.footprint;
    }
    ctx.assignment[index].clear();
  }
}

SolverResult finish(SearchContext& ctx, Clock::time_point start) {
  SolverResult result;
  result.nodes_explored = ctx.explored;
  result.proven = !ctx.exhausted;
  if (std::isfinite(ctx.incumbent_cost)) {
    result.feasible = true;
    result.placement = build_placement(ctx, ctx.incumbent);
    result.cost = cost::evaluate_batch(result.placement, ctx.requests, ctx.topology,
                                       ctx.catalog, ctx.reuse);
  }
  result.wall_time_ms = elapsed_ms(start);
  return result;
}

} // namespace

SolverResult solve_exact(const Topology& topology,
                         const std::vector<ServiceRequest>& requests,
                         const Catalog& catalog, double delay_threshold_ms,
                         std::uint64_t budget, bool deployment_reuse) {
  const auto start = Clock::now();
  SearchContext ctx{topology, requests, catalog, delay_threshold_ms,
                    deployment_reuse, budget};
  ctx.components = flatten(requests, catalog);
  for (const auto& id : topology.node_ids()) {
    const auto& n = topology.node(id);
    if (is_hosting_kind(n.kind) && !n.failed) {
      ctx.hosts.push_back(id);
      ctx.residual[id] = n.residual;
    }
  }
  ctx.registries = topology.registry_nodes();
  ctx.assignment.resize(ctx.components.size());
  ctx.suffix_bound.assign(ctx.components.size() + 1, 0.0);
  if (!deployment_reuse) {
    for (std::size_t i = ctx.components.size(); i-- > 0;) {
      ctx.suffix_bound[i] = ctx.suffix_bound[i + 1] + ctx.components[i].run_cost +
                            ctx.components[i].deploy_cost;
    }
  }

  if (requests.empty()) {
    SolverResult result;
    result.feasible = true;
    result.proven = true;
    result.wall_time_ms = elapsed_ms(start);
    return result;
  }
  dfs(ctx, 0, 0.0);
  return finish(ctx, start);
}

SolverResult solve_brute(const Topology& topology,
                         const std::vector<ServiceRequest>& requests,
                         const Catalog& catalog, double delay_threshold_ms,
                         bool deployment_reuse, std::uint64_t enumeration_guard) {
  const auto start = Clock::now();
  SolverResult result;
  if (requests.empty()) {
    result.feasible = true;
    result.wall_time_ms = elapsed_ms(start);
    return result;
  }

  std::vector<NodeId> hosts;
  for (const auto& id : topology.node_ids()) {
    const auto& n = topology.node(id);
    if (is_hosting_kind(n.kind) && !n.failed) {
      hosts.push_back(id);
    }
  }
  const auto components = flatten(requests, catalog);
  if (hosts.empty()) {
    result.wall_time_ms = elapsed_ms(start);
    return result;
  }
  double combos = 1;
  for (std::size_t i = 0; i < components.size(); ++i) {
    combos *= static_cast<double>(hosts.size());
    if (combos > static_cast<double>(enumeration_guard)) {
      throw std::runtime_error("instance too large for brute-force enumeration");
    }
  }

  const auto registries = topology.registry_nodes();
  std::vector<std::size_t> pick(components.size(), 0);
  double best = std::numeric_limits<double>::infinity();
  std::vector<NodeId> best_assignment;

  bool done = false;
  while (!done) {
    ++result.nodes_explored;
    // Evaluate the complete assignment from scratch.
    std::map<std::size_t, std::map<ComponentRef, NodeId>> hosts_by_request;
    for (std::size_t i = 0; i < components.size(); ++i) {
      hosts_by_request[components[i].request_index][components[i].ref] = hosts[pick[i]];
    }
    bool ok = true;
    Placement placement;
    placement.registry_nodes = registries;
    try {
      for (std::size_t r = 0; r < requests.size() && ok; ++r) {
        placement.by_request[requests[r].id] =
            route_request(topology, requests[r], catalog, hosts_by_request[r], true);
      }
    } catch (const std::exception&) {
      ok = false;
    }
    if (ok) {
      const auto verdict = cost::check_feasible(placement, requests, topology, catalog,
                                                delay_threshold_ms, deployment_reuse);
      if (verdict.feasible) {
        const auto cost = cost::evaluate_batch(placement, requests, topology, catalog,
                                               deployment_reuse);
        if (cost.total < best - 1e-12) {
          best = cost.total;
          best_assignment.clear();
          for (std::size_t i = 0; i < components.size(); ++i) {
            best_assignment.push_back(hosts[pick[i]]);
          }
        }
      }
    }
    // next assignment, odometer-style
    std::size_t pos = 0;
    while (pos < pick.size()) {
      if (++pick[pos] < hosts.size()) {
        break;
      }
      pick[pos] = 0;
      ++pos;
    }
    done = pos == pick.size();
  }

  if (std::isfinite(best)) {
    result.feasible = true;
    std::map<std::size_t, std::map<ComponentRef, NodeId>> hosts_by_request;
    for (std::size_t i = 0; i < components.size(); ++i) {
      hosts_by_request[components[i].request_index][components[i].ref] = best_assignment[i];
    }
    result.placement.registry_nodes = registries;
    for (std::size_t r = 0; r < requests.size(); ++r) {
      result.placement.by_request[requests[r].id] =
          route_request(topology, requests[r], catalog, hosts_by_request[r], true);
    }
    result.cost = cost::evaluate_batch(result.placement, requests, topology, catalog,
                                       deployment_reuse);
  }
  result.wall_time_ms = elapsed_ms(start);
  return result;
}

} // namespace campinc
