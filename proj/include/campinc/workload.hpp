#pragma once

#include "campinc/topology.hpp"
#include "campinc/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace campinc {

struct MicroserviceSpec {
  std::string id;
  double cpu_demand = 0;          // c_v
  double container_overhead = 0;  // phi_v
  double processing_delay_ms = 0; // p_v
  double run_cost = 0;            // lambda_v, per placed instance
  double deploy_cost = 0;         // gamma_v, license per deployment
  std::map<NodeKind, double> container_create_ms;  // eta, per hosting kind
  std::map<NodeKind, double> container_release_ms; // psi, per hosting kind
  bool needs_database = false;

  double footprint() const { return cpu_demand + container_overhead; }
};

struct DatabaseSpec {
  std::string id;
  std::string owner_microservice;
  double cpu_demand = 0;
  double container_overhead = 0;
  double run_cost = 0;
  double deploy_cost = 0;

  double footprint() const { return cpu_demand + container_overhead; }
};

// Catalog of deployable microservices and their dedicated databases.
// Exactly one database per microservice with needs_database set.
class Catalog {
public:
  void add_microservice(MicroserviceSpec ms);
  void add_database(DatabaseSpec db);
  void validate() const;

  bool empty() const { return microservices_.empty(); }
  std::size_t size() const { return microservices_.size(); }
  // Ascending id order.
  std::vector<std::string> microservice_ids() const;
  const MicroserviceSpec& microservice(const std::string& id) const;
  bool has_database_for(const std::string& ms_id) const;
  const DatabaseSpec& database_for(const std::string& ms_id) const;
  const DatabaseSpec& database(const std::string& db_id) const;

private:
  std::map<std::string, MicroserviceSpec> microservices_;
  std::map<std::string, DatabaseSpec> databases_;        // by db id
  std::map<std::string, std::string> db_by_owner_;       // ms id -> db id
};

// A virtual component of one request: a chain microservice or the
// dedicated database of one.
struct ComponentRef {
  enum class Kind { Microservice, Database };
  Kind kind = Kind::Microservice;
  std::string id; // microservice id or database id

  bool operator<(const ComponentRef& o) const {
    return std::tie(kind, id) < std::tie(o.kind, o.id);
  }
  bool operator==(const ComponentRef& o) const {
    return kind == o.kind && id == o.id;
  }
  std::string label() const {
    return (kind == Kind::Microservice ? "ms:" : "db:") + id;
  }
};

using VirtualEdge = std::pair<ComponentRef, ComponentRef>;

struct ServiceRequest {
  std::string id;
  NodeId end_user;
  std::vector<NodeId> content_nodes; // Z_u, sorted, nonempty
  NodeId selected_content;           // member of content_nodes
  std::vector<std::string> chain;    // ordered microservice ids

  void validate(const Catalog& catalog, const Topology& topology) const;
};

// Chain-consecutive pairs in order, then one (ms, db) edge per
// database-backed chain member, in chain order.
std::vector<VirtualEdge> virtual_edges_of(const ServiceRequest& request,
                                          const Catalog& catalog);

// All components of the request in placement order: each chain
// microservice followed immediately by its database, if any.
std::vector<ComponentRef> components_of(const ServiceRequest& request,
                                        const Catalog& catalog);

double component_footprint(const ComponentRef& c, const Catalog& catalog);

// Deterministic request generation. Chain lengths uniform in
// [chain_len_min, chain_len_max], chains sampled without replacement from
// the catalog, end users and content nodes uniform over eligible nodes.
// The selected content node is the sampled one with the smallest
// shortest-path delay to the end user (ties by id).
std::vector<ServiceRequest> generate_requests(const Catalog& catalog,
                                              const Topology& topology,
                                              std::size_t count,
                                              std::size_t chain_len_min,
                                              std::size_t chain_len_max,
                                              std::uint64_t rng_seed);

} // namespace campinc
