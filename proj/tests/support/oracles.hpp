#pragma once

// Independent oracles shared by the unit and acceptance suites. Written from
// the definitions, not from the library code they check.

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <tuple>
#include <vector>

#include "lms/catalog/sort_key.hpp"
#include "lms/railnet/graph.hpp"
#include "lms/railnet/routing.hpp"
#include "lms/shelving/shelf_map.hpp"
#include "support.hpp"

namespace lms::test {

using railnet::EdgeId;
using railnet::KinematicParams;
using railnet::NodeKind;
using railnet::NodeSpec;
using railnet::PortRef;
using railnet::RailLayout;
using catalog::SortKey;

struct Best {
  double time = INFINITY;
  std::vector<EdgeId> edges;
};

// Every node-simple path, costed step by step in the same order as the
// router: rotation at the node being left (turntables only), then travel.
inline Best enumerate_simple_paths(const RailLayout& layout, const NodeId& from, const NodeId& to,
                                   const KinematicParams& k, const std::set<EdgeId>& blocked) {
  std::map<NodeId, const NodeSpec*> nodes;
  for (const auto& n : layout.nodes) nodes[n.id] = &n;
  Best best;
  if (from == to) {
    best.time = 0.0;
    return best;
  }
  std::set<NodeId> visited{from};
  std::vector<EdgeId> trail;
  std::function<void(const NodeId&, int, double)> dfs = [&](const NodeId& at, int entry, double t) {
    if (at == to) {
      if (t < best.time || (t == best.time && trail < best.edges)) best = {t, trail};
      return;
    }
    const bool turntable = nodes[at]->kind == NodeKind::Turntable;
    if (at != from && !turntable) return;
    for (const auto& e : layout.edges) {
      if (blocked.contains(e.id)) continue;
      for (int side = 0; side < 2; ++side) {
        const PortRef& near = side == 0 ? e.a : e.b;
        const PortRef& far = side == 0 ? e.b : e.a;
        if (near.node != at || visited.contains(far.node)) continue;
        double next = t;
        if (at != from && turntable) {
          const int turns = std::min(((near.port - entry - 2) % 4 + 4) % 4, ((entry - near.port + 2) % 4 + 4) % 4);
          next += turns * k.t_rot_s;
        }
        next += e.length_m / k.rail_speed_mps;
        visited.insert(far.node);
        trail.push_back(e.id);
        dfs(far.node, far.port, next);
        trail.pop_back();
        visited.erase(far.node);
      }
    }
  };
  dfs(from, -1, 0.0);
  return best;
}

inline RailLayout random_layout(std::mt19937_64& rng) {
  const int n = uniform(rng, 2, 8);
  RailLayout l;
  std::vector<int> free_ports;
  std::vector<std::vector<bool>> used(n, std::vector<bool>(4, false));
  auto take_port = [&](int node) {
    std::vector<int> open;
    for (int p = 0; p < l.nodes[node].ports; ++p) {
      if (!used[node][p]) open.push_back(p);
    }
    const int p = open[rng() % open.size()];
    used[node][p] = true;
    --free_ports[node];
    return p;
  };
  int edge_no = 0;
  auto connect = [&](int a, int b) {
    const double len = 0.5 * uniform(rng, 1, 6);
    const int pa = take_port(a);
    const int pb = take_port(b);
    l.edges.push_back({"s" + std::to_string(edge_no++), {l.nodes[a].id, pa}, {l.nodes[b].id, pb}, len});
  };
  // Spanning tree: each node hangs off an earlier turntable with a free
  // port. A terminal is only added while another free port would remain.
  for (int i = 0; i < n; ++i) {
    std::vector<int> parents;
    int spare = 0;
    for (int j = 0; j < i; ++j) {
      if (l.nodes[j].kind == NodeKind::Turntable && free_ports[j] > 0) {
        parents.push_back(j);
        spare += free_ports[j];
      }
    }
    const bool turntable = i == 0 || spare == 1 || uniform(rng, 0, 2) > 0;
    NodeSpec spec;
    spec.id = "n" + std::to_string(i);
    spec.kind = turntable ? NodeKind::Turntable : NodeKind::Intake;
    spec.ports = turntable ? 4 : 1;
    l.nodes.push_back(spec);
    free_ports.push_back(spec.ports);
    if (i > 0) connect(parents[rng() % parents.size()], i);
  }
  const int extra = uniform(rng, 0, 6);
  for (int x = 0; x < extra; ++x) {
    const int a = uniform(rng, 0, n - 1);
    const int b = uniform(rng, 0, n - 1);
    if (a == b || free_ports[a] == 0 || free_ports[b] == 0) continue;
    connect(a, b);
  }
  return l;
}

// Brute force over the eligible slot sequence, written from the definitions:
// boundary with fewest out-of-order occupants (earliest on ties), then the
// free slot with fewest occupied slots between it and the boundary,
// preferring slots at or after the boundary, then the lower index.
struct SlotOracle {
  std::vector<ShelfAddress> slots;
  std::vector<std::optional<SortKey>> keys;  // occupant key per slot
  std::vector<bool> free;

  std::size_t boundary(const SortKey& k) const {
    std::size_t best = 0, best_v = SIZE_MAX;
    for (std::size_t p = 0; p <= slots.size(); ++p) {
      std::size_t v = 0;
      for (std::size_t j = 0; j < slots.size(); ++j) {
        if (!keys[j]) continue;
        if (j < p && *keys[j] > k) ++v;
        if (j >= p && *keys[j] < k) ++v;
      }
      if (v < best_v) {
        best_v = v;
        best = p;
      }
    }
    return best;
  }

  std::optional<ShelfAddress> choose(const SortKey& k) const {
    const std::size_t p = boundary(k);
    std::optional<std::size_t> best;
    std::tuple<std::size_t, int, std::size_t> best_rank{};
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (!free[i]) continue;
      std::size_t between = 0;
      const std::size_t lo = i >= p ? p : i + 1;
      const std::size_t hi = i >= p ? i : p;
      for (std::size_t j = lo; j < hi; ++j) between += keys[j] ? 1 : 0;
      const std::tuple<std::size_t, int, std::size_t> rank{between, i >= p ? 0 : 1, i};
      if (!best || rank < best_rank) {
        best = i;
        best_rank = rank;
      }
    }
    if (!best) return std::nullopt;
    return slots[*best];
  }
};

}  // namespace lms::test
