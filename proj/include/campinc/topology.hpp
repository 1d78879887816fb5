#pragma once

#include "campinc/types.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <vector>

namespace campinc {

struct PhysicalNode {
  NodeId id;
  NodeKind kind = NodeKind::NetworkDevice;
  double capacity = 0; // CPU cycles/s
  double residual = 0;
  bool failed = false;
  bool hosts_registry = false;
};

struct PhysicalLink {
  NodeId a; // endpoints kept sorted, a < b
  NodeId b;
  double delay_ms = 0;
  double cost = 0; // monetary units per use
};

// A walk through the network. Paths returned by the topology search
// routines are always loop-free; routes built by solvers (notably the
// controller-relay baseline) may revisit nodes.
struct Path {
  std::vector<NodeId> nodes;
  double total_delay = 0;
  double total_cost = 0;

  bool empty() const { return nodes.empty(); }
  std::size_t hops() const { return nodes.empty() ? 0 : nodes.size() - 1; }
  const NodeId& front() const { return nodes.front(); }
  const NodeId& back() const { return nodes.back(); }

  bool operator==(const Path& other) const { return nodes == other.nodes; }
};

// Undirected simple graph of devices and users. Queries are pure given a
// snapshot; mutation is limited to failure flags, registry flags and
// residual capacity.
class Topology {
public:
  void add_node(PhysicalNode node);
  void add_link(const NodeId& a, const NodeId& b, double delay_ms, double cost);

  bool has_node(const NodeId& id) const { return nodes_.count(id) > 0; }
  const PhysicalNode& node(const NodeId& id) const;
  PhysicalNode& node(const NodeId& id);

  // Sorted by id, for deterministic iteration.
  std::vector<NodeId> node_ids() const;
  std::vector<NodeId> node_ids_of_kind(NodeKind kind) const;
  const std::map<NodeId, PhysicalNode>& nodes() const { return nodes_; }
  const std::vector<PhysicalLink>& links() const { return links_; }

  bool has_link(const NodeId& a, const NodeId& b) const;
  const PhysicalLink& link(const NodeId& a, const NodeId& b) const;
  // Neighbors in ascending id order.
  const std::vector<NodeId>& neighbors(const NodeId& id) const;

  void set_failed(const NodeId& id, bool failed);
  std::set<NodeId> failed_nodes() const;

  void set_registry(const NodeId& id, bool hosts);
  std::set<NodeId> registry_nodes() const;

  // Residual-capacity bookkeeping; throws if the reservation would leave
  // residual outside [0, capacity].
  void reserve(const NodeId& id, double amount);
  void release(const NodeId& id, double amount);

  // Minimum-total-delay loop-free path; ties broken by lexicographic node
  // sequence. Under alive_only, failed nodes are excluded both as interior
  // nodes and as endpoints. Returns nullopt when disconnected.
  std::optional<Path> shortest_delay(const NodeId& src, const NodeId& dst,
                                     bool alive_only = true) const;

  // Minimum-total-link-cost path over the alive subgraph (same tie rule).
  std::optional<Path> min_cost_path(const NodeId& src, const NodeId& dst,
                                    bool alive_only = true) const;

  // Up to k loop-free paths over the alive subgraph in nondecreasing
  // total_delay (ties lexicographic), each with total_delay <= delay_cap.
  // Yen-style deviation search with delay as the metric.
  std::vector<Path> k_shortest_paths(const NodeId& src, const NodeId& dst,
                                     double delay_cap_ms, std::size_t k) const;

  // PageRank over the alive topology (damping 0.85, L1 tolerance 1e-9).
  // Scores sum to 1 over alive nodes.
  std::map<NodeId, double> pagerank() const;

  // PageRank restricted to the path's members, excluding non-hosting kinds,
  // renormalized to sum to 1 over the returned mapping.
  std::map<NodeId, double> rank_nodes(const Path& path) const;

  // Rebuilds a Path over the given node sequence, recomputing delay/cost
  // from the current link attributes. Throws if consecutive nodes are not
  // adjacent.
  Path make_path(const std::vector<NodeId>& nodes) const;

  Topology() = default;
  Topology(const Topology& other);
  Topology& operator=(const Topology& other);
  Topology(Topology&&) = default;
  Topology& operator=(Topology&&) = default;

private:
  std::optional<Path> search(const NodeId& src, const NodeId& dst, bool alive_only,
                             bool by_cost, const std::set<NodeId>& banned_nodes,
                             const std::set<std::pair<NodeId, NodeId>>& banned_links) const;
  void invalidate_cache() const;

  std::map<NodeId, PhysicalNode> nodes_;
  std::vector<PhysicalLink> links_;
  std::map<NodeId, std::vector<NodeId>> adjacency_;
  std::map<std::pair<NodeId, NodeId>, std::size_t> link_index_;

  // Memoized search results; keyed (by_cost, alive_only, src, dst).
  // Guarded so read-only sharing across threads stays safe.
  using CacheKey = std::tuple<bool, bool, NodeId, NodeId>;
  mutable std::map<CacheKey, std::optional<Path>> path_cache_;
  mutable std::unique_ptr<std::mutex> cache_mutex_ = std::make_unique<std::mutex>();
};

} // namespace campinc
