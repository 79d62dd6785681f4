#include "lms/railnet/graph.hpp"

#include <algorithm>
#include <set>

#include "lms/error.hpp"

namespace lms::railnet {

std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Turntable: return "turntable";
    case NodeKind::Intake: return "intake";
    case NodeKind::Kiosk: return "kiosk";
    case NodeKind::RackPort: return "rack_port";
  }
  return "?";
}

NodeKind parse_node_kind(std::string_view s) {
  if (s == "turntable") return NodeKind::Turntable;
  if (s == "intake") return NodeKind::Intake;
  if (s == "kiosk") return NodeKind::Kiosk;
  if (s == "rack_port") return NodeKind::RackPort;
  throw Error(Errc::LayoutInvalid, "unknown node kind '" + std::string(s) + "'");
}

RailGraph RailGraph::build(const RailLayout& layout, const std::vector<int>& rack_ids) {
  RailGraph g;
  g.nodes_ = layout.nodes;
  g.edges_ = layout.edges;
  g.adjacency_.resize(g.nodes_.size());

  for (std::size_t i = 0; i < g.nodes_.size(); ++i) {
    auto& n = g.nodes_[i];
    if (is_terminal(n.kind)) n.ports = 1;
    if (n.kind == NodeKind::Turntable && (n.ports < 1 || n.ports > 4)) {
      throw Error(Errc::LayoutInvalid, "turntable " + n.id + " must have 1..4 ports");
    }
    if (n.kind == NodeKind::RackPort && !n.rack) {
      throw Error(Errc::LayoutInvalid, "rack port " + n.id + " names no rack");
    }
    if (!g.node_index_.emplace(n.id, i).second) {
      throw Error(Errc::LayoutInvalid, "duplicate node id " + n.id);
    }
  }

  std::vector<std::vector<bool>> port_used(g.nodes_.size());
  for (std::size_t i = 0; i < g.nodes_.size(); ++i) port_used[i].assign(g.nodes_[i].ports, false);

  for (std::size_t e = 0; e < g.edges_.size(); ++e) {
    const auto& edge = g.edges_[e];
    if (!g.edge_index_.emplace(edge.id, e).second) {
      throw Error(Errc::LayoutInvalid, "duplicate edge id " + edge.id);
    }
    if (!(edge.length_m > 0.0)) {
      throw Error(Errc::LayoutInvalid, "edge " + edge.id + " must have positive length");
    }
    std::size_t ends[2];
    const PortRef* refs[2] = {&edge.a, &edge.b};
    for (int k = 0; k < 2; ++k) {
      auto it = g.node_index_.find(refs[k]->node);
      if (it == g.node_index_.end()) {
        throw Error(Errc::DanglingEdge, "edge " + edge.id + " names unknown node " + refs[k]->node);
      }
      const auto& n = g.nodes_[it->second];
      if (refs[k]->port < 0 || refs[k]->port >= n.ports) {
        throw Error(Errc::DanglingEdge, "edge " + edge.id + " uses port " +
                                            std::to_string(refs[k]->port) + " of " + n.id);
      }
      if (port_used[it->second][refs[k]->port]) {
        throw Error(Errc::PortConflict, n.id + " port " + std::to_string(refs[k]->port) +
                                            " hosts more than one edge");
      }
      port_used[it->second][refs[k]->port] = true;
      ends[k] = it->second;
    }
    if (ends[0] == ends[1]) {
      throw Error(Errc::PortConflict, "edge " + edge.id + " loops on " + edge.a.node);
    }
    g.adjacency_[ends[0]].push_back({edge.a.port, e, ends[1], edge.b.port});
    g.adjacency_[ends[1]].push_back({edge.b.port, e, ends[0], edge.a.port});
  }
  for (auto& adj : g.adjacency_) {
    std::sort(adj.begin(), adj.end(),
              [](const Incidence& x, const Incidence& y) { return x.port < y.port; });
  }

  // connectivity
  if (!g.nodes_.empty()) {
    std::vector<bool> seen(g.nodes_.size(), false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (const auto& inc : g.adjacency_[u]) {
        if (!seen[inc.other]) {
          seen[inc.other] = true;
          stack.push_back(inc.other);
        }
      }
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
      if (!seen[i]) throw Error(Errc::Disconnected, g.nodes_[i].id + " is unreachable");
    }
  }

  for (const auto& n : g.nodes_) {
    if (n.kind == NodeKind::RackPort) {
      if (!g.rack_ports_.emplace(*n.rack, n.id).second) {
        throw Error(Errc::LayoutInvalid, "rack " + std::to_string(*n.rack) + " has two rack ports");
      }
    }
  }
  if (!rack_ids.empty()) {
    for (int r : rack_ids) {
      if (!g.rack_ports_.contains(r)) {
        throw Error(Errc::MissingRackPort, "rack " + std::to_string(r) + " has no rack port");
      }
    }
    const std::set<int> known(rack_ids.begin(), rack_ids.end());
    for (const auto& [r, id] : g.rack_ports_) {
      if (!known.contains(r)) {
        throw Error(Errc::LayoutInvalid, id + " serves unknown rack " + std::to_string(r));
      }
    }
  }
  return g;
}

std::optional<std::size_t> RailGraph::find_node(const NodeId& id) const {
  auto it = node_index_.find(id);
  if (it == node_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t RailGraph::node_index(const NodeId& id) const {
  auto it = node_index_.find(id);
  if (it == node_index_.end()) throw Error(Errc::UnknownNode, id);
  return it->second;
}

std::size_t RailGraph::edge_index(const EdgeId& id) const {
  auto it = edge_index_.find(id);
  if (it == edge_index_.end()) throw Error(Errc::UnknownNode, "edge " + id);
  return it->second;
}

const NodeId& RailGraph::rack_port(int rack) const {
  auto it = rack_ports_.find(rack);
  if (it == rack_ports_.end()) {
    throw Error(Errc::MissingRackPort, "rack " + std::to_string(rack));
  }
  return it->second;
}

std::vector<NodeId> RailGraph::kiosks() const {
  std::vector<NodeId> out;
  for (const auto& n : nodes_) {
    if (n.kind == NodeKind::Kiosk) out.push_back(n.id);
  }
  return out;
}

std::optional<NodeId> RailGraph::intake() const {
  for (const auto& n : nodes_) {
    if (n.kind == NodeKind::Intake) return n.id;
  }
  return std::nullopt;
}

const EdgeSpec& RailGraph::terminal_edge(const NodeId& terminal) const {
  const auto idx = node_index(terminal);
  if (!is_terminal(nodes_[idx].kind) || adjacency_[idx].size() != 1) {
    throw Error(Errc::UnknownNode, terminal + " is not a terminal");
  }
  return edges_[adjacency_[idx].front().edge];
}

}  // namespace lms::railnet
