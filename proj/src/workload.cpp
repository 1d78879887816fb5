#include "campinc/workload.hpp"

#include "campinc/rng.hpp"

#include <algorithm>
#include <stdexcept>

namespace campinc {

namespace {

const NodeKind kHostingKinds[] = {NodeKind::BaseStation, NodeKind::EdgeServer,
                                  NodeKind::NetworkDevice, NodeKind::CloudServer};

} // namespace

void Catalog::add_microservice(MicroserviceSpec ms) {
  if (ms.id.empty()) {
    throw std::invalid_argument("microservice id must not be empty");
  }
  if (microservices_.count(ms.id) > 0) {
    throw std::invalid_argument("duplicate microservice id: " + ms.id);
  }
  if (ms.cpu_demand < 0 || ms.container_overhead < 0 || ms.processing_delay_ms < 0 ||
      ms.run_cost < 0 || ms.deploy_cost < 0) {
    throw std::invalid_argument("microservice parameters must be >= 0: " + ms.id);
  }
  for (auto kind : kHostingKinds) {
    if (ms.container_create_ms.count(kind) == 0 ||
        ms.container_release_ms.count(kind) == 0) {
      throw std::invalid_argument("container timings missing for hosting kind " +
                                  to_string(kind) + " on " + ms.id);
    }
  }
  microservices_.emplace(ms.id, std::move(ms));
}

void Catalog::add_database(DatabaseSpec db) {
  if (db.id.empty()) {
    throw std::invalid_argument("database id must not be empty");
  }
  if (databases_.count(db.id) > 0) {
    throw std::invalid_argument("duplicate database id: " + db.id);
  }
  if (db.cpu_demand < 0 || db.container_overhead < 0 || db.run_cost < 0 ||
      db.deploy_cost < 0) {
    throw std::invalid_argument("database parameters must be >= 0: " + db.id);
  }
  if (db_by_owner_.count(db.owner_microservice) > 0) {
    throw std::invalid_argument("microservice already has a database: " +
                                db.owner_microservice);
  }
  db_by_owner_[db.owner_microservice] = db.id;
  databases_.emplace(db.id, std::move(db));
}

void Catalog::validate() const {
  for (const auto& [id, ms] : microservices_) {
    if (ms.needs_database != (db_by_owner_.count(id) > 0)) {
      throw std::invalid_argument("database presence mismatch for " + id);
    }
  }
  for (const auto& [db_id, db] : databases_) {
    auto it = microservices_.find(db.owner_microservice);
    if (it == microservices_.end() || !it->second.needs_database) {
      throw std::invalid_argument("database " + db_id + " has no owning microservice");
    }
  }
}

std::vector<std::string> Catalog::microservice_ids() const {
  std::vector<std::string> ids;
  ids.reserve(microservices_.size());
  for (const auto& [id, _] : microservices_) {
    ids.push_back(id);
  }
  return ids;
}

const MicroserviceSpec& Catalog::microservice(const std::string& id) const {
  auto it = microservices_.find(id);
  if (it == microservices_.end()) {
    throw std::invalid_argument("unknown microservice: " + id);
  }
  return it->second;
}

bool Catalog::has_database_for(const std::string& ms_id) const {
  return db_by_owner_.count(ms_id) > 0;
}

const DatabaseSpec& Catalog::database_for(const std::string& ms_id) const {
  auto it = db_by_owner_.find(ms_id);
  if (it == db_by_owner_.end()) {
    throw std::invalid_argument("microservice has no database: " + ms_id);
  }
  return databases_.at(it->second);
}

const DatabaseSpec& Catalog::database(const std::string& db_id) const {
  auto it = databases_.find(db_id);
  if (it == databases_.end()) {
    throw std::invalid_argument("unknown database: " + db_id);
  }
  return it->second;
}

void ServiceRequest::validate(const Catalog& catalog, const Topology& topology) const {
  if (chain.empty()) {
    throw std::invalid_argument("request chain must be nonempty: " + id);
  }
  for (const auto& ms : chain) {
    catalog.microservice(ms);
  }
  if (topology.node(end_user).kind != NodeKind::EndUser) {
    throw std::invalid_argument("request end user has wrong kind: " + end_user);
  }
  if (content_nodes.empty()) {
    throw std::invalid_argument("request needs at least one content node: " + id);
  }
  for (const auto& z : content_nodes) {
    if (topology.node(z).kind != NodeKind::ContentGenerator) {
      throw std::invalid_argument("content node has wrong kind: " + z);
    }
  }
  if (std::find(content_nodes.begin(), content_nodes.end(), selected_content) ==
      content_nodes.end()) {
    throw std::invalid_argument("selected content node not in content set: " + id);
  }
}

std::vector<VirtualEdge> virtual_edges_of(const ServiceRequest& request,
                                          const Catalog& catalog) {
  std::vector<VirtualEdge> edges;
  for (std::size_t i = 0; i + 1 < request.chain.size(); ++i) {
    edges.push_back({ComponentRef{ComponentRef::Kind::Microservice, request.chain[i]},
                     ComponentRef{ComponentRef::Kind::Microservice, request.chain[i + 1]}});
  }
  for (const auto& ms : request.chain) {
    if (catalog.microservice(ms).needs_database) {
      edges.push_back({ComponentRef{ComponentRef::Kind::Microservice, ms},
                       ComponentRef{ComponentRef::Kind::Database,
                                    catalog.database_for(ms).id}});
    }
  }
  return edges;
}

std::vector<ComponentRef> components_of(const ServiceRequest& request,
                                        const Catalog& catalog) {
  std::vector<ComponentRef> out;
  for (const auto& ms : request.chain) {
    out.push_back(ComponentRef{ComponentRef::Kind::Microservice, ms});
    if (catalog.microservice(ms).needs_database) {
      out.push_back(
          ComponentRef{ComponentRef::Kind::Database, catalog.database_for(ms).id});
    }
  }
  return out;
}

double component_footprint(const ComponentRef& c, const Catalog& catalog) {
  if (c.kind == ComponentRef::Kind::Microservice) {
    return catalog.microservice(c.id).footprint();
  }
  return catalog.database(c.id).footprint();
}

std::vector<ServiceRequest> generate_requests(const Catalog& catalog,
                                              const Topology& topology,
                                              std::size_t count,
                                              std::size_t chain_len_min,
                                              std::size_t chain_len_max,
                                              std::uint64_t rng_seed) {
  if (catalog.empty()) {
    throw std::invalid_argument("catalog must not be empty");
  }
  if (chain_len_min < 1 || chain_len_min > chain_len_max) {
    throw std::invalid_argument("invalid chain length range");
  }
  if (chain_len_max > catalog.size()) {
    throw std::invalid_argument("chain length exceeds catalog size");
  }
  const auto end_users = topology.node_ids_of_kind(NodeKind::EndUser);
  const auto generators = topology.node_ids_of_kind(NodeKind::ContentGenerator);
  if (end_users.empty() || generators.empty()) {
    throw std::invalid_argument("topology needs end users and content generators");
  }

  Rng rng(rng_seed);
  const auto ms_ids = catalog.microservice_ids();
  std::vector<ServiceRequest> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    ServiceRequest req;
    req.id = "q" + std::to_string(i);
    req.end_user = end_users[rng.uniform_index(end_users.size())];

    const std::size_t z_count = 1 + rng.uniform_index(std::min<std::size_t>(2, generators.size()));
    req.content_nodes = rng.sample_without_replacement(generators, z_count);
    std::sort(req.content_nodes.begin(), req.content_nodes.end());

    const std::size_t len =
        chain_len_min + rng.uniform_index(chain_len_max - chain_len_min + 1);
    req.chain = rng.sample_without_replacement(ms_ids, len);

    // Pick the sampled content node closest (by delay) to the end user.
    double best = std::numeric_limits<double>::infinity();
    for (const auto& z : req.content_nodes) {
      auto p = topology.shortest_delay(z, req.end_user, false);
      const double d = p ? p->total_delay : std::numeric_limits<double>::infinity();
      if (d < best) {
        best = d;
        req.selected_content = z;
      }
    }
    if (req.selected_content.empty()) {
      req.selected_content = req.content_nodes.front();
    }
    out.push_back(std::move(req));
  }
  return out;
}

} // namespace campinc
