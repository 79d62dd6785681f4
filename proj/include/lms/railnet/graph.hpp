#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lms/catalog/book.hpp"

namespace lms::railnet {

using EdgeId = std::string;

enum class NodeKind { Turntable, Intake, Kiosk, RackPort };

std::string_view to_string(NodeKind k);
NodeKind parse_node_kind(std::string_view s);

inline bool is_terminal(NodeKind k) { return k != NodeKind::Turntable; }

struct NodeSpec {
  NodeId id;
  NodeKind kind = NodeKind::Turntable;
  int ports = 4;                   // turntables: 1..4; terminals always 1
  std::optional<int> rack;         // RackPort only
};

struct PortRef {
  NodeId node;
  int port = 0;
};

struct EdgeSpec {
  EdgeId id;
  PortRef a;
  PortRef b;
  double length_m = 0.0;
};

struct RailLayout {
  std::vector<NodeSpec> nodes;
  std::vector<EdgeSpec> edges;
};

/// One edge-to-node attachment, as seen from a node.
struct Incidence {
  int port = 0;
  std::size_t edge = 0;   // index into edges()
  std::size_t other = 0;  // node index at the far end
  int other_port = 0;
};

/// Validated rail network. Node and edge indices are stable and follow the
/// order of the source layout.
class RailGraph {
 public:
  /// Throws DanglingEdge, PortConflict, Disconnected or MissingRackPort
  /// (the first violation found). `rack_ids` lists the racks that must each
  /// have exactly one RackPort; pass an empty list to skip that check.
  static RailGraph build(const RailLayout& layout, const std::vector<int>& rack_ids = {});

  const std::vector<NodeSpec>& nodes() const noexcept { return nodes_; }
  const std::vector<EdgeSpec>& edges() const noexcept { return edges_; }
  const std::vector<Incidence>& incident(std::size_t node) const { return adjacency_[node]; }

  std::size_t node_index(const NodeId& id) const;  // throws UnknownNode
  std::optional<std::size_t> find_node(const NodeId& id) const;
  std::size_t edge_index(const EdgeId& id) const;  // throws UnknownNode
  const NodeSpec& node(const NodeId& id) const { return nodes_[node_index(id)]; }

  /// RackPort node id serving `rack`.
  const NodeId& rack_port(int rack) const;  // throws MissingRackPort
  std::vector<NodeId> kiosks() const;
  std::optional<NodeId> intake() const;

  /// The single edge a terminal node hangs off.
  const EdgeSpec& terminal_edge(const NodeId& terminal) const;

 private:
  std::vector<NodeSpec> nodes_;
  std::vector<EdgeSpec> edges_;
  std::vector<std::vector<Incidence>> adjacency_;  // sorted by port
  std::map<NodeId, std::size_t> node_index_;
  std::map<EdgeId, std::size_t> edge_index_;
  std::map<int, NodeId> rack_ports_;
};

}  // namespace lms::railnet
