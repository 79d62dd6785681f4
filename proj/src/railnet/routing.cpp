#include "lms/railnet/routing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <queue>

#include "lms/error.hpp"

namespace lms::railnet {

double KinematicParams::rail_speed_for(double motor_rpm, double wheel_diameter_m) {
  return std::numbers::pi * wheel_diameter_m * motor_rpm / 60.0;
}

void KinematicParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(Errc::ConfigInvalid, std::string(name) + " must be strictly positive");
    }
  };
  positive(rail_speed_mps, "rail_speed_mps");
  positive(t_rot_s, "t_rot_s");
  positive(hoist_speed_mps, "hoist_speed_mps");
  positive(extend_time_s, "extend_time_s");
  positive(level_height_m, "level_height_m");
}

int rotation_steps(int entry_port, int exit_port) {
  auto mod4 = [](int v) { return ((v % 4) + 4) % 4; };
  return std::min(mod4(exit_port - entry_port - 2), mod4(entry_port - exit_port + 2));
}

std::vector<NodeId> Path::nodes() const {
  std::vector<NodeId> out{origin};
  for (const auto& s : steps) out.push_back(s.to);
  return out;
}

std::vector<EdgeId> Path::edges() const {
  std::vector<EdgeId> out;
  for (const auto& s : steps) out.push_back(s.edge);
  return out;
}

std::vector<int> Path::rotations(const RailGraph& g) const {
  std::vector<int> out;
  for (std::size_t i = 1; i < steps.size(); ++i) {
    const bool turntable = g.node(steps[i].from).kind == NodeKind::Turntable;
    out.push_back(turntable ? rotation_steps(steps[i - 1].entry_port, steps[i].exit_port) : 0);
  }
  return out;
}

double path_time_s(const RailGraph& g, const Path& path, const KinematicParams& params) {
  double t = 0.0;
  for (std::size_t i = 0; i < path.steps.size(); ++i) {
    if (i > 0 && g.node(path.steps[i].from).kind == NodeKind::Turntable) {
      t += rotation_steps(path.steps[i - 1].entry_port, path.steps[i].exit_port) * params.t_rot_s;
    }
    t += path.steps[i].length_m / params.rail_speed_mps;
  }
  return t;
}

namespace {

struct Label {
  double cost = 0.0;
  std::vector<std::size_t> edges;  // edge indices taken so far
  std::size_t node = 0;
  int entry_port = -1;  // -1 at the origin
  std::vector<bool> visited;  // only used by the simple-path search
};

class Search {
 public:
  Search(const RailGraph& g, const KinematicParams& p, const std::set<EdgeId>& blocked,
         std::size_t origin, std::size_t target)
      : g_(g), p_(p), origin_(origin), target_(target), blocked_(g.edges().size(), false) {
    for (const auto& id : blocked) {
      if (auto idx = try_edge(id)) blocked_[*idx] = true;
    }
  }

  // true if a ranks before b
  bool before(const Label& a, const Label& b) const {
    if (a.cost != b.cost) return a.cost < b.cost;
    return std::lexicographical_compare(
        a.edges.begin(), a.edges.end(), b.edges.begin(), b.edges.end(),
        [&](std::size_t x, std::size_t y) { return g_.edges()[x].id < g_.edges()[y].id; });
  }

  template <typename Visit>
  void expand(const Label& l, Visit&& visit) const {
    const auto& node = g_.nodes()[l.node];
    if (l.node != origin_ && is_terminal(node.kind)) return;  // no pass-through
    for (const auto& inc : g_.incident(l.node)) {
      if (blocked_[inc.edge]) continue;
      Label next;
      next.cost = l.cost;
      if (l.entry_port >= 0 && node.kind == NodeKind::Turntable) {
        next.cost += rotation_steps(l.entry_port, inc.port) * p_.t_rot_s;
      }
      next.cost += g_.edges()[inc.edge].length_m / p_.rail_speed_mps;
      next.edges = l.edges;
      next.edges.push_back(inc.edge);
      next.node = inc.other;
      next.entry_port = inc.other_port;
      visit(std::move(next));
    }
  }

  // Dijkstra over (node, entry port). Optimal over all walks.
  std::optional<Label> best_walk() const {
    const std::size_t n = g_.nodes().size();
    // state index: node * 5 + (entry_port + 1)
    std::vector<std::optional<Label>> best(n * 5);
    std::vector<bool> done(n * 5, false);
    auto cmp = [this](const Label& a, const Label& b) { return before(b, a); };
    std::priority_queue<Label, std::vector<Label>, decltype(cmp)> open(cmp);
    Label start;
    start.node = origin_;
    open.push(start);
    best[origin_ * 5] = start;
    while (!open.empty()) {
      Label cur = open.top();
      open.pop();
      const std::size_t s = cur.node * 5 + static_cast<std::size_t>(cur.entry_port + 1);
      if (done[s]) continue;
      done[s] = true;
      if (cur.node == target_) return cur;
      expand(cur, [&](Label&& next) {
        const std::size_t t = next.node * 5 + static_cast<std::size_t>(next.entry_port + 1);
        if (done[t]) return;
        if (!best[t] || before(next, *best[t])) {
          best[t] = next;
          open.push(std::move(next));
        }
      });
    }
    return std::nullopt;
  }

  // Uniform-cost search over node-simple partial paths. Exact but
  // exponential in the worst case; only used when the best walk loops.
  std::optional<Label> best_simple() const {
    auto cmp = [this](const Label& a, const Label& b) { return before(b, a); };
    std::priority_queue<Label, std::vector<Label>, decltype(cmp)> open(cmp);
    Label start;
    start.node = origin_;
    start.visited.assign(g_.nodes().size(), false);
    start.visited[origin_] = true;
    open.push(start);
    while (!open.empty()) {
      Label cur = open.top();
      open.pop();
      if (cur.node == target_) return cur;
      expand(cur, [&](Label&& next) {
        if (cur.visited[next.node]) return;
        next.visited = cur.visited;
        next.visited[next.node] = true;
        open.push(std::move(next));
      });
    }
    return std::nullopt;
  }

  bool is_simple(const Label& l) const {
    std::vector<bool> seen(g_.nodes().size(), false);
    std::size_t at = origin_;
    seen[at] = true;
    for (std::size_t e : l.edges) {
      const auto& edge = g_.edges()[e];
      at = g_.node_index(edge.a.node) == at ? g_.node_index(edge.b.node) : g_.node_index(edge.a.node);
      if (seen[at]) return false;
      seen[at] = true;
    }
    return true;
  }

 private:
  std::optional<std::size_t> try_edge(const EdgeId& id) const {
    for (std::size_t i = 0; i < g_.edges().size(); ++i) {
      if (g_.edges()[i].id == id) return i;
    }
    return std::nullopt;
  }

  const RailGraph& g_;
  const KinematicParams& p_;
  std::size_t origin_;
  std::size_t target_;
  std::vector<bool> blocked_;
};

}  // namespace

Path shortest_route(const RailGraph& g, const NodeId& from, const NodeId& to,
                    const KinematicParams& params, const std::set<EdgeId>& blocked) {
  const std::size_t origin = g.node_index(from);
  const std::size_t target = g.node_index(to);
  Path path;
  path.origin = from;
  if (origin == target) return path;

  Search search(g, params, blocked, origin, target);
  std::optional<Label> found = search.best_walk();
  if (found && !search.is_simple(*found)) found = search.best_simple();
  if (!found) throw Error(Errc::NoRoute, from + " -> " + to);

  std::size_t at = origin;
  for (std::size_t e : found->edges) {
    const auto& edge = g.edges()[e];
    const bool forward = g.node_index(edge.a.node) == at;
    const PortRef& near = forward ? edge.a : edge.b;
    const PortRef& far = forward ? edge.b : edge.a;
    path.steps.push_back({edge.id, near.node, near.port, far.node, far.port, edge.length_m});
    at = g.node_index(far.node);
  }
  path.total_time_s = found->cost;
  return path;
}

}  // namespace lms::railnet
