#include "campinc/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace campinc {

namespace {

std::pair<NodeId, NodeId> ordered(const NodeId& a, const NodeId& b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

} // namespace

Topology::Topology(const Topology& other)
    : nodes_(other.nodes_),
      links_(other.links_),
      adjacency_(other.adjacency_),
      link_index_(other.link_index_) {}

Topology& Topology::operator=(const Topology& other) {
  if (this != &other) {
    nodes_ = other.nodes_;
    links_ = other.links_;
    adjacency_ = other.adjacency_;
    link_index_ = other.link_index_;
    invalidate_cache();
  }
  return *this;
}

void Topology::invalidate_cache() const {
  std::lock_guard<std::mutex> lock(*cache_mutex_);
  path_cache_.clear();
}

void Topology::add_node(PhysicalNode node) {
  if (node.id.empty()) {
    throw std::invalid_argument("node id must not be empty");
  }
  if (nodes_.count(node.id) > 0) {
    throw std::invalid_argument("duplicate node id: " + node.id);
  }
  if (!is_hosting_kind(node.kind) && node.capacity != 0) {
    throw std::invalid_argument("non-hosting node must have capacity 0: " + node.id);
  }
  if (node.capacity < 0) {
    throw std::invalid_argument("negative capacity: " + node.id);
  }
  node.residual = node.capacity;
  adjacency_[node.id]; // ensure entry
  nodes_.emplace(node.id, std::move(node));
  invalidate_cache();
}

void Topology::add_link(const NodeId& a, const NodeId& b, double delay_ms, double cost) {
  if (!has_node(a) || !has_node(b)) {
    throw std::invalid_argument("link endpoint not in topology: " + a + "," + b);
  }
  if (a == b) {
    throw std::invalid_argument("self-loop not allowed: " + a);
  }
  if (delay_ms < 0 || cost < 0) {
    throw std::invalid_argument("link delay and cost must be >= 0");
  }
  const auto key = ordered(a, b);
  if (link_index_.count(key) > 0) {
    throw std::invalid_argument("duplicate link: " + a + "," + b);
  }
  link_index_[key] = links_.size();
  links_.push_back(PhysicalLink{key.first, key.second, delay_ms, cost});
  auto insert_sorted = [](std::vector<NodeId>& v, const NodeId& id) {
    v.insert(std::lower_bound(v.begin(), v.end(), id), id);
  };
  insert_sorted(adjacency_[a], b);
  insert_sorted(adjacency_[b], a);
  invalidate_cache();
}

const PhysicalNode& Topology::node(const NodeId& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    throw std::invalid_argument("unknown node id: " + id);
  }
  return it->second;
}

PhysicalNode& Topology::node(const NodeId& id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    throw std::invalid_argument("unknown node id: " + id);
  }
  return it->second;
}

std::vector<NodeId> Topology::node_ids() const {
  std::vector<NodeId> ids;
  ids.reserve(nodes_.size());
  for (const auto& [id, _] : nodes_) {
    ids.push_back(id);
  }
  return ids;
}

std::vector<NodeId> Topology::node_ids_of_kind(NodeKind kind) const {
  std::vector<NodeId> ids;
  for (const auto& [id, n] : nodes_) {
    if (n.kind == kind) {
      ids.push_back(id);
    }
  }
  return ids;
}

bool Topology::has_link(const NodeId& a, const NodeId& b) const {
  return link_index_.count(ordered(a, b)) > 0;
}

const PhysicalLink& Topology::link(const NodeId& a, const NodeId& b) const {
  auto it = link_index_.find(ordered(a, b));
  if (it == link_index_.end()) {
    throw std::invalid_argument("no link between " + a + " and " + b);
  }
  return links_[it->second];
}

const std::vector<NodeId>& Topology::neighbors(const NodeId& id) const {
  auto it = adjacency_.find(id);
  if (it == adjacency_.end()) {
    throw std::invalid_argument("unknown node id: " + id);
  }
  return it->second;
}

void Topology::set_failed(const NodeId& id, bool failed) {
  auto& n = node(id);
  if (n.failed != failed) {
    n.failed = failed;
    invalidate_cache();
  }
}

std::set<NodeId> Topology::failed_nodes() const {
  std::set<NodeId> out;
  for (const auto& [id, n] : nodes_) {
    if (n.failed) {
      out.insert(id);
    }
  }
  return out;
}

void Topology::set_registry(const NodeId& id, bool hosts) {
  node(id).hosts_registry = hosts;
}

std::set<NodeId> Topology::registry_nodes() const {
  std::set<NodeId> out;
  for (const auto& [id, n] : nodes_) {
    if (n.hosts_registry) {
      out.insert(id);
    }
  }
  return out;
}

void Topology::reserve(const NodeId& id, double amount) {
  auto& n = node(id);
  if (amount < 0) {
    throw std::invalid_argument("reserve amount must be >= 0");
  }
  if (n.residual - amount < -1e-9) {
    throw std::runtime_error("capacity exceeded on node " + id);
  }
  n.residual = std::max(0.0, n.residual - amount);
}

void Topology::release(const NodeId& id, double amount) {
  auto& n = node(id);
  if (amount < 0) {
    throw std::invalid_argument("release amount must be >= 0");
  }
  if (n.residual + amount > n.capacity + 1e-9) {
    throw std::runtime_error("release would exceed capacity on node " + id);
  }
  n.residual = std::min(n.capacity, n.residual + amount);
}

Path Topology::make_path(const std::vector<NodeId>& seq) const {
  Path p;
  p.nodes = seq;
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    const auto& l = link(seq[i], seq[i + 1]);
    p.total_delay += l.delay_ms;
    p.total_cost += l.cost;
  }
  if (!seq.empty()) {
    node(seq.front()); // validate endpoints exist
    node(seq.back());
  }
  return p;
}

// Dijkstra with deterministic lexicographic reconstruction: distances are
// computed first, then the path is rebuilt greedily taking the smallest
// neighbor id consistent with the optimal distance at every step.
std::optional<Path> Topology::search(
    const NodeId& src, const NodeId& dst, bool alive_only, bool by_cost,
    const std::set<NodeId>& banned_nodes,
    const std::set<std::pair<NodeId, NodeId>>& banned_links) const {
  node(src);
  node(dst);
  auto usable = [&](const NodeId& id) {
    if (banned_nodes.count(id) > 0) {
      return false;
    }
    return !(alive_only && nodes_.at(id).failed);
  };
  if (!usable(src) || !usable(dst)) {
    return std::nullopt;
  }
  auto weight = [&](const NodeId& a, const NodeId& b) {
    const auto& l = link(a, b);
    return by_cost ? l.cost : l.delay_ms;
  };

  const double inf = std::numeric_limits<double>::infinity();
  std::map<NodeId, double> dist;
  for (const auto& [id, _] : nodes_) {
    dist[id] = inf;
  }
  dist[src] = 0;
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  pq.emplace(0.0, src);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) {
      continue;
    }
    for (const auto& v : adjacency_.at(u)) {
      if (!usable(v) || banned_links.count(ordered(u, v)) > 0) {
        continue;
      }
      const double nd = d + weight(u, v);
      if (nd < dist[v] - 1e-12) {
        dist[v] = nd;
        pq.emplace(nd, v);
      }
    }
  }
  if (dist[dst] == inf) {
    return std::nullopt;
  }

  // Reverse distances from dst so we can test optimality of each hop.
  std::map<NodeId, double> rdist;
  for (const auto& [id, _] : nodes_) {
    rdist[id] = inf;
  }
  rdist[dst] = 0;
  pq = {};
  pq.emplace(0.0, dst);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > rdist[u]) {
      continue;
    }
    for (const auto& v : adjacency_.at(u)) {
      if (!usable(v) || banned_links.count(ordered(u, v)) > 0) {
        continue;
      }
      const double nd = d + weight(u, v);
      if (nd < rdist[v] - 1e-12) {
        rdist[v] = nd;
        pq.emplace(nd, v);
      }
    }
  }

  std::vector<NodeId> seq{src};
  NodeId cur = src;
  double acc = 0;
  const double total = dist[dst];
  while (cur != dst) {
    NodeId next;
    bool found = false;
    for (const auto& v : adjacency_.at(cur)) {
      if (!usable(v) || banned_links.count(ordered(cur, v)) > 0) {
        continue;
      }
      if (std::abs(acc + weight(cur, v) + rdist[v] - total) < 1e-9) {
        next = v;
        found = true;
        break; // neighbors sorted: first hit is lexicographic minimum
      }
    }
    if (!found) {
      return std::nullopt;
    }
    acc += weight(cur, next);
    seq.push_back(next);
    cur = next;
  }
  return make_path(seq);
}

std::optional<Path> Topology::shortest_delay(const NodeId& src, const NodeId& dst,
                                             bool alive_only) const {
  const CacheKey key{false, alive_only, src, dst};
  {
    std::lock_guard<std::mutex> lock(*cache_mutex_);
    auto it = path_cache_.find(key);
    if (it != path_cache_.end()) {
      return it->second;
    }
  }
  auto result = search(src, dst, alive_only, false, {}, {});
  std::lock_guard<std::mutex> lock(*cache_mutex_);
  path_cache_.emplace(key, result);
  return result;
}

std::optional<Path> Topology::min_cost_path(const NodeId& src, const NodeId& dst,
                                            bool alive_only) const {
  const CacheKey key{true, alive_only, src, dst};
  {
    std::lock_guard<std::mutex> lock(*cache_mutex_);
    auto it = path_cache_.find(key);
    if (it != path_cache_.end()) {
      return it->second;
    }
  }
  auto result = search(src, dst, alive_only, true, {}, {});
  std::lock_guard<std::mutex> lock(*cache_mutex_);
  path_cache_.emplace(key, result);
  return result;
}

std::vector<Path> Topology::k_shortest_paths(const NodeId& src, const NodeId& dst,
                                             double delay_cap_ms, std::size_t k) const {
  if (k < 1) {
    throw std::invalid_argument("k must be >= 1");
  }
  node(src);
  node(dst);
  std::vector<Path> result;
  auto first = shortest_delay(src, dst, true);
  if (!first || first->total_delay > delay_cap_ms + 1e-12) {
    return result;
  }
  result.push_back(*first);

  auto path_less = [](const Path& x, const Path& y) {
    if (x.total_delay != y.total_delay) {
      return x.total_delay < y.total_delay;
    }
    return x.nodes < y.nodes;
  };
  std::vector<Path> candidates;

  while (result.size() < k) {
    const Path& prev = result.back();
    for (std::size_t i = 0; i + 1 < prev.nodes.size(); ++i) {
      const NodeId& spur = prev.nodes[i];
      std::vector<NodeId> root(prev.nodes.begin(), prev.nodes.begin() + i + 1);

      std::set<std::pair<NodeId, NodeId>> banned_links;
      for (const auto& p : result) {
        if (p.nodes.size() > i &&
            std::equal(root.begin(), root.end(), p.nodes.begin()) &&
            p.nodes.size() > i + 1) {
          banned_links.insert(ordered(p.nodes[i], p.nodes[i + 1]));
        }
      }
      std::set<NodeId> banned_nodes(root.begin(), root.end());
      banned_nodes.erase(spur);

      auto spur_path = search(spur, dst, true, false, banned_nodes, banned_links);
      if (!spur_path) {
        continue;
      }
      std::vector<NodeId> total_nodes = root;
      total_nodes.insert(total_nodes.end(), spur_path->nodes.begin() + 1,
                         spur_path->nodes.end());
      Path total = make_path(total_nodes);
      if (total.total_delay > delay_cap_ms + 1e-12) {
        continue;
      }
      bool known = std::any_of(result.begin(), result.end(),
                               [&](const Path& p) { return p.nodes == total.nodes; }) ||
                   std::any_of(candidates.begin(), candidates.end(),
                               [&](const Path& p) { return p.nodes == total.nodes; });
      if (!known) {
        candidates.push_back(std::move(total));
      }
    }
    if (candidates.empty()) {
      break;
    }
    auto best = std::min_element(candidates.begin(), candidates.end(), path_less);
    result.push_back(*best);
    candidates.erase(best);
  }
  std::sort(result.begin(), result.end(), path_less);
  return result;
}

std::map<NodeId, double> Topology::pagerank() const {
  constexpr double kDamping = 0.85;
  constexpr double kTolerance = 1e-9;
  constexpr int kMaxIterations = 10000;

  std::vector<NodeId> alive;
  for (const auto& [id, n] : nodes_) {
    if (!n.failed) {
      alive.push_back(id);
    }
  }
  std::map<NodeId, double> rank;
  if (alive.empty()) {
    return rank;
  }
  const double n = static_cast<double>(alive.size());
  for (const auto& id : alive) {
    rank[id] = 1.0 / n;
  }
  std::map<NodeId, std::vector<NodeId>> alive_adj;
  for (const auto& id : alive) {
    for (const auto& nb : adjacency_.at(id)) {
      if (!nodes_.at(nb).failed) {
        alive_adj[id].push_back(nb);
      }
    }
  }
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    std::map<NodeId, double> next;
    double dangling = 0;
    for (const auto& id : alive) {
      if (alive_adj[id].empty()) {
        dangling += rank[id];
      }
    }
    for (const auto& id : alive) {
      double in = 0;
      for (const auto& nb : alive_adj[id]) {
        in += rank[nb] / static_cast<double>(alive_adj[nb].size());
      }
      next[id] = (1.0 - kDamping) / n + kDamping * (in + dangling / n);
    }
    double delta = 0;
    for (const auto& id : alive) {
      delta += std::abs(next[id] - rank[id]);
    }
    rank = std::move(next);
    if (delta < kTolerance) {
      break;
    }
  }
  return rank;
}

std::map<NodeId, double> Topology::rank_nodes(const Path& path) const {
  if (path.empty()) {
    throw std::invalid_argument("rank_nodes requires a nonempty path");
  }
  const auto full = pagerank();
  std::map<NodeId, double> restricted;
  double sum = 0;
  for (const auto& id : path.nodes) {
    const auto& n = node(id);
    if (!is_hosting_kind(n.kind)) {
      continue;
    }
    auto it = full.find(id);
    if (it == full.end()) {
      continue; // failed node not ranked
    }
    restricted[id] = it->second;
    sum += it->second;
  }
  if (sum > 0) {
    for (auto& [_, score] : restricted) {
      score /= sum;
    }
  }
  return restricted;
}

} // namespace campinc
