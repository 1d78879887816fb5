#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace campinc {

using NodeId = std::string;

enum class NodeKind {
  EndUser,
  ContentGenerator,
  BaseStation,
  EdgeServer,
  NetworkDevice,
  CloudServer,
};

// End users and content generators relay traffic but never host components.
inline bool is_hosting_kind(NodeKind kind) {
  switch (kind) {
    case NodeKind::EndUser:
    case NodeKind::ContentGenerator:
      return false;
    case NodeKind::BaseStation:
    case NodeKind::EdgeServer:
    case NodeKind::NetworkDevice:
    case NodeKind::CloudServer:
      return true;
  }
  return false;
}

inline std::string to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::EndUser:
      return "end_user";
    case NodeKind::ContentGenerator:
      return "content_generator";
    case NodeKind::BaseStation:
      return "base_station";
    case NodeKind::EdgeServer:
      return "edge_server";
    case NodeKind::NetworkDevice:
      return "network_device";
    case NodeKind::CloudServer:
      return "cloud_server";
  }
  return "unknown";
}

inline NodeKind node_kind_from_string(const std::string& s) {
  if (s == "end_user") {
    return NodeKind::EndUser;
  } else if (s == "content_generator") {
    return NodeKind::ContentGenerator;
  } else if (s == "base_station") {
    return NodeKind::BaseStation;
  } else if (s == "edge_server") {
    return NodeKind::EdgeServer;
  } else if (s == "network_device") {
    return NodeKind::NetworkDevice;
  } else if (s == "cloud_server") {
    return NodeKind::CloudServer;
  }
  throw std::invalid_argument("unknown node kind: " + s);
}

} // namespace campinc
