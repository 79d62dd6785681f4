#include "lms/railnet/reservation.hpp"

#include <algorithm>
#include <functional>

#include "lms/error.hpp"

namespace lms::railnet {

bool ReservationTable::grantable(const Request& r) const {
  return std::all_of(r.resources.begin(), r.resources.end(), [&](const ResourceId& id) {
    auto it = holder_.find(id);
    return it == holder_.end() || it->second == r.arm;
  });
}

void ReservationTable::grant(const Request& r) {
  for (const auto& id : r.resources) holder_[id] = r.arm;
}

void ReservationTable::rebuild_queues() {
  queues_.clear();
  for (const auto& r : pending_) {
    for (const auto& id : r.resources) {
      auto it = holder_.find(id);
      if (it != holder_.end() && it->second != r.arm) {
        queues_[id].push_back(r.arm);
        break;
      }
    }
  }
}

ReserveOutcome ReservationTable::reserve(ArmId arm, std::vector<ResourceId> resources) {
  std::vector<ResourceId> unique;
  for (auto& id : resources) {
    if (std::find(unique.begin(), unique.end(), id) == unique.end()) unique.push_back(std::move(id));
  }
  cancel(arm);
  Request req{arm, std::move(unique)};
  if (grantable(req)) {
    grant(req);
    return ReserveOutcome::Granted;
  }
  pending_.push_back(std::move(req));
  rebuild_queues();
  return ReserveOutcome::Queued;
}

std::vector<ArmId> ReservationTable::release(ArmId arm, const std::vector<ResourceId>& resources) {
  for (const auto& id : resources) {
    auto it = holder_.find(id);
    if (it == holder_.end() || it->second != arm) {
      throw Error(Errc::NotHolder, "arm " + std::to_string(arm) + " does not hold " + id);
    }
  }
  for (const auto& id : resources) holder_.erase(id);

  std::vector<ArmId> granted;
  for (auto it = pending_.begin(); it != pending_.end();) {
    if (grantable(*it)) {
      grant(*it);
      granted.push_back(it->arm);
      it = pending_.erase(it);
    } else {
      ++it;
    }
  }
  rebuild_queues();
  return granted;
}

bool ReservationTable::cancel(ArmId arm) {
  auto it = std::find_if(pending_.begin(), pending_.end(),
                         [&](const Request& r) { return r.arm == arm; });
  if (it == pending_.end()) return false;
  pending_.erase(it);
  rebuild_queues();
  return true;
}

std::optional<ArmId> ReservationTable::holder(const ResourceId& r) const {
  auto it = holder_.find(r);
  if (it == holder_.end()) return std::nullopt;
  return it->second;
}

std::vector<ResourceId> ReservationTable::held_by(ArmId arm) const {
  std::vector<ResourceId> out;
  for (const auto& [id, h] : holder_) {
    if (h == arm) out.push_back(id);
  }
  return out;
}

bool ReservationTable::is_queued(ArmId arm) const { return queued_request(arm) != nullptr; }

const std::vector<ResourceId>* ReservationTable::queued_request(ArmId arm) const {
  for (const auto& r : pending_) {
    if (r.arm == arm) return &r.resources;
  }
  return nullptr;
}

std::vector<ArmId> ReservationTable::waiters(const ResourceId& r) const {
  auto it = queues_.find(r);
  if (it == queues_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

std::vector<ResourceId> ReservationTable::contested(ArmId arm) const {
  std::vector<ResourceId> out;
  if (const auto* req = queued_request(arm)) {
    for (const auto& id : *req) {
      auto it = holder_.find(id);
      if (it != holder_.end() && it->second != arm) out.push_back(id);
    }
  }
  return out;
}

std::map<ArmId, std::set<ArmId>> ReservationTable::wait_for() const {
  std::map<ArmId, std::set<ArmId>> out;
  for (const auto& r : pending_) {
    auto& targets = out[r.arm];
    for (const auto& id : r.resources) {
      auto it = holder_.find(id);
      if (it != holder_.end() && it->second != r.arm) targets.insert(it->second);
    }
  }
  return out;
}

std::optional<std::vector<ArmId>> ReservationTable::detect_deadlock() const {
  const auto graph = wait_for();
  enum class Mark { White, Grey, Black };
  std::map<ArmId, Mark> mark;
  std::vector<ArmId> stack;
  std::optional<std::vector<ArmId>> cycle;

  std::function<bool(ArmId)> dfs = [&](ArmId u) {
    mark[u] = Mark::Grey;
    stack.push_back(u);
    if (auto it = graph.find(u); it != graph.end()) {
      for (ArmId v : it->second) {  // ascending
        const Mark m = mark.contains(v) ? mark[v] : Mark::White;
        if (m == Mark::Grey) {
          auto from = std::find(stack.begin(), stack.end(), v);
          cycle.emplace(from, stack.end());
          return true;
        }
        if (m == Mark::White && dfs(v)) return true;
      }
    }
    stack.pop_back();
    mark[u] = Mark::Black;
    return false;
  };

  for (const auto& [arm, targets] : graph) {
    if (!mark.contains(arm) && dfs(arm)) break;
  }
  if (!cycle) return std::nullopt;
  auto smallest = std::min_element(cycle->begin(), cycle->end());
  std::rotate(cycle->begin(), smallest, cycle->end());
  return cycle;
}

}  // namespace lms::railnet
