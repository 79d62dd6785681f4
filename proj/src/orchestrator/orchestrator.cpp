#include "lms/orchestrator/orchestrator.hpp"

#include <limits>

#include "lms/catalog/io.hpp"
#include "lms/error.hpp"

namespace lms::orchestrator {

using catalog::BookState;
using catalog::TxKind;
namespace st = catalog::state;

std::string_view to_string(TaskKind k) { return k == TaskKind::Return ? "Return" : "Retrieve"; }

std::string_view to_string(TaskState s) {
  switch (s) {
    case TaskState::Pending: return "Pending";
    case TaskState::Assigned: return "Assigned";
    case TaskState::Active: return "Active";
    case TaskState::Done: return "Done";
    case TaskState::Failed: return "Failed";
  }
  return "?";
}

nlohmann::json task_to_json(const Task& t) {
  nlohmann::json j = {{"id", t.id},
                      {"kind", std::string(to_string(t.kind))},
                      {"barcode", t.barcode.str()},
                      {"state", std::string(to_string(t.state))},
                      {"submitted_ms", t.submitted_ms}};
  if (t.kiosk) j["kiosk"] = *t.kiosk;
  if (t.address) j["address"] = *t.address;
  if (t.arm) j["arm"] = *t.arm;
  if (t.failure) j["failure"] = *t.failure;
  if (t.active_ms) j["active_ms"] = *t.active_ms;
  if (t.completed_ms) j["completed_ms"] = *t.completed_ms;
  return j;
}

Orchestrator::Orchestrator(catalog::Catalog initial, shelving::ShelfMap shelves,
                           const railnet::RailGraph& graph, catalog::SortPolicy policy)
    : catalog_(initial), shelves_(std::move(shelves)), graph_(&graph), policy_(std::move(policy)) {
  for (const auto& [barcode, rec] : initial.records()) {
    const BookState& s = rec.state;
    if (std::holds_alternative<st::Queued>(s) || std::holds_alternative<st::InTransit>(s)) {
      throw Error(Errc::ScenarioInvalid, "initial catalog has " + barcode.str() + " in " + catalog::describe(s));
    }
    if (const auto* sh = std::get_if<st::Shelved>(&s)) {
      try {
        shelves_.place(sh->address, barcode, catalog::sort_key(rec, policy_), rec.width_mm);
      } catch (const Error& ex) {
        throw Error(Errc::ScenarioInvalid, "initial catalog: " + barcode.str() + ": " + ex.what());
      }
      log_entry(TxKind::Shelved, barcode, 0, {}, {}, sh->address);
    } else if (const auto* k = std::get_if<st::AtKiosk>(&s)) {
      if (graph.node(k->kiosk).kind != railnet::NodeKind::Kiosk) {
        throw Error(Errc::ScenarioInvalid, "initial catalog: " + k->kiosk + " is not a kiosk");
      }
      log_entry(TxKind::Delivered, barcode, 0, {}, {}, {}, k->kiosk);
    } else if (std::holds_alternative<st::ManualHandling>(s)) {
      log_entry(TxKind::TaskFailed, barcode, 0, {});
    }
  }
}

void Orchestrator::log_entry(TxKind kind, const Barcode& b, TimeMs t, std::optional<TaskId> task,
                             std::optional<ArmId> arm, std::optional<ShelfAddress> addr,
                             std::optional<KioskId> kiosk) {
  catalog::TransactionEntry e{0, t, kind, b, addr, arm, task, std::move(kiosk)};
  catalog_.set_state(b, catalog::apply(log_.record(std::move(e))));
}

const Task& Orchestrator::task(TaskId id) const {
  auto it = tasks_.find(id);
  if (it == tasks_.end()) throw Error(Errc::UnknownTask, "task " + std::to_string(id));
  return it->second;
}

Task& Orchestrator::task_mut(TaskId id) { return const_cast<Task&>(task(id)); }

std::size_t Orchestrator::pending_count() const {
  std::size_t n = 0;
  for (const auto& [id, t] : tasks_) n += t.state == TaskState::Pending;
  return n;
}

bool Orchestrator::all_terminal() const {
  for (const auto& [id, t] : tasks_) {
    if (!t.terminal()) return false;
  }
  return true;
}

SubmitResult Orchestrator::submit_return(catalog::BookRecord record, TimeMs now) {
  if (const auto* known = catalog_.find(record.barcode)) {
    const BookState& s = known->state;
    if (!std::holds_alternative<st::AtIntake>(s) && !std::holds_alternative<st::AtKiosk>(s) &&
        !std::holds_alternative<st::ManualHandling>(s)) {
      throw Error(Errc::DuplicateBarcode, record.barcode.str() + " is " + catalog::describe(s));
    }
  }
  record.state = st::AtIntake{};
  catalog_.upsert(record);

  Task t;
  t.id = next_task_++;
  t.kind = TaskKind::Return;
  t.barcode = record.barcode;
  t.submitted_ms = now;
  SubmitResult out{t.id, {}};
  out.notices.push_back({EventKind::TaskSubmitted,
                         {{"task", t.id}, {"kind", "Return"}, {"barcode", t.barcode.str()}}});
  log_entry(TxKind::ReturnAccepted, t.barcode, now, t.id);

  std::optional<std::string> no_slot;
  try {
    t.address = shelves_.assign_slot(record, catalog::sort_key(record, policy_));
  } catch (const Error& ex) {
    if (ex.code() != Errc::NoEligibleLevel && ex.code() != Errc::ShelfFull) throw;
    no_slot = std::string(lms::to_string(ex.code()));
  }
  Task& stored = tasks_.emplace(t.id, std::move(t)).first->second;
  if (no_slot) out.notices.push_back(fail(stored, *no_slot, now));
  return out;
}

SubmitResult Orchestrator::submit_retrieve(const Barcode& barcode, const KioskId& kiosk, TimeMs now) {
  auto idx = graph_->find_node(kiosk);
  if (!idx || graph_->nodes()[*idx].kind != railnet::NodeKind::Kiosk) {
    throw Error(Errc::UnknownKiosk, "'" + kiosk + "'");
  }
  const catalog::BookRecord& rec = catalog_.at(barcode);
  const auto* sh = std::get_if<st::Shelved>(&rec.state);
  if (!sh) throw Error(Errc::BookNotShelved, barcode.str() + " is " + catalog::describe(rec.state));

  Task t;
  t.id = next_task_++;
  t.kind = TaskKind::Retrieve;
  t.barcode = barcode;
  t.kiosk = kiosk;
  t.address = sh->address;
  t.submitted_ms = now;
  SubmitResult out{t.id, {}};
  out.notices.push_back({EventKind::TaskSubmitted,
                         {{"task", t.id}, {"kind", "Retrieve"}, {"barcode", barcode.str()}, {"kiosk", kiosk}}});
  log_entry(TxKind::RetrievalRequested, barcode, now, t.id);
  tasks_.emplace(t.id, std::move(t));
  return out;
}

NodeId Orchestrator::first_destination(const Task& t) const {
  if (t.kind == TaskKind::Return) return *graph_->intake();
  return graph_->rack_port(t.address->rack);
}

std::vector<Assignment> Orchestrator::dispatch(std::vector<IdleArm> idle) const {
  std::vector<Assignment> out;
  for (const auto& [id, t] : tasks_) {
    if (idle.empty()) break;
    if (t.state != TaskState::Pending) continue;
    const NodeId dest = first_destination(t);
    std::size_t best = idle.size();
    double best_time = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < idle.size(); ++i) {
      double time = 0.0;
      try {
        time = railnet::shortest_route(*graph_, idle[i].node, dest, idle[i].kinematics).total_time_s;
      } catch (const Error& ex) {
        if (ex.code() != Errc::NoRoute) throw;
        continue;
      }
      if (time < best_time || (time == best_time && idle[i].id < idle[best].id)) {
        best = i;
        best_time = time;
      }
    }
    if (best == idle.size()) continue;
    out.push_back({id, idle[best].id});
    idle.erase(idle.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return out;
}

Notice Orchestrator::fail(Task& t, const std::string& reason, TimeMs now) {
  if (t.terminal()) {
    throw Error(Errc::StateMachineViolation, "task " + std::to_string(t.id) + " already " +
                                                 std::string(to_string(t.state)));
  }
  // Slot policy: a return that never left the intake gives its slot back;
  // a slot implicated in a failed pick or alignment needs a person.
  if (t.address) {
    if (reason == "GripFailure" && t.kind == TaskKind::Return) {
      shelves_.release_slot(*t.address);
    } else {
      shelves_.quarantine(*t.address);
    }
  }
  t.state = TaskState::Failed;
  t.failure = reason;
  t.completed_ms = now;
  log_entry(TxKind::TaskFailed, t.barcode, now, t.id, t.arm);
  nlohmann::json p = {{"task", t.id}, {"reason", reason}, {"barcode", t.barcode.str()}};
  if (t.arm) p["arm"] = *t.arm;
  return {EventKind::TaskFailed, std::move(p)};
}

Notice Orchestrator::complete(Task& t, TimeMs now) {
  if (t.state != TaskState::Active) {
    throw Error(Errc::StateMachineViolation, "task " + std::to_string(t.id) + " completes from " +
                                                 std::string(to_string(t.state)));
  }
  t.state = TaskState::Done;
  t.completed_ms = now;
  return {EventKind::TaskCompleted,
          {{"task", t.id}, {"arm", *t.arm}, {"kind", std::string(to_string(t.kind))},
           {"latency_ms", now - t.submitted_ms}}};
}

std::vector<Notice> Orchestrator::on_event(const Event& e) {
  const auto& p = e.payload;
  auto task_of = [&]() -> Task& { return task_mut(p.at("task").get<TaskId>()); };
  auto expect_arm = [&](const Task& t) {
    if (!t.arm || *t.arm != p.at("arm").get<ArmId>()) {
      throw Error(Errc::StateMachineViolation, std::string(lms::to_string(e.kind)) + " from an arm not assigned to task " +
                                                   std::to_string(t.id));
    }
  };
  std::vector<Notice> out;
  switch (e.kind) {
    case EventKind::ArmAssigned: {
      Task& t = task_of();
      if (t.state != TaskState::Pending) {
        throw Error(Errc::StateMachineViolation, "assigning task " + std::to_string(t.id) + " in state " +
                                                     std::string(to_string(t.state)));
      }
      t.state = TaskState::Assigned;
      t.arm = p.at("arm").get<ArmId>();
      break;
    }
    case EventKind::SegmentReserved: {
      if (!p.contains("task")) break;
      Task& t = task_of();
      if (t.state == TaskState::Assigned) {
        expect_arm(t);
        t.state = TaskState::Active;
        t.active_ms = e.time_ms;
      }
      break;
    }
    case EventKind::BookPicked: {
      Task& t = task_of();
      expect_arm(t);
      if (t.kind != TaskKind::Retrieve || t.state != TaskState::Active) {
        throw Error(Errc::StateMachineViolation, "BookPicked for task " + std::to_string(t.id));
      }
      shelves_.release_slot(*t.address);
      log_entry(TxKind::Picked, t.barcode, e.time_ms, t.id, *t.arm, t.address);
      break;
    }
    case EventKind::BookPlaced: {
      Task& t = task_of();
      expect_arm(t);
      const auto addr = p.at("address").get<ShelfAddress>();
      if (t.kind != TaskKind::Return || addr != *t.address) {
        throw Error(Errc::StateMachineViolation, "BookPlaced at " + to_string(addr) + " for task " +
                                                     std::to_string(t.id));
      }
      log_entry(TxKind::Shelved, t.barcode, e.time_ms, t.id, *t.arm, addr);
      out.push_back(complete(t, e.time_ms));
      break;
    }
    case EventKind::BookDelivered: {
      Task& t = task_of();
      expect_arm(t);
      if (t.kind != TaskKind::Retrieve || p.at("kiosk").get<std::string>() != *t.kiosk) {
        throw Error(Errc::StateMachineViolation, "BookDelivered for task " + std::to_string(t.id));
      }
      log_entry(TxKind::Delivered, t.barcode, e.time_ms, t.id, *t.arm, {}, t.kiosk);
      out.push_back(complete(t, e.time_ms));
      break;
    }
    case EventKind::GripFail:
      if (p.contains("task") && p.value("final", false)) out.push_back(fail(task_of(), "GripFailure", e.time_ms));
      break;
    case EventKind::PhaseComplete:
      if (p.contains("task") && p.value("outcome", "") == "MissedBeacon") {
        out.push_back(fail(task_of(), "MissedBeacon", e.time_ms));
      }
      break;
    default: break;
  }
  return out;
}

std::vector<std::string> Orchestrator::check_consistency() const {
  std::vector<std::string> bad;
  auto say = [&](const Barcode& b, const std::string& what) { bad.push_back(b.str() + ": " + what); };
  auto live_task = [&](TaskId id, const Barcode& b) -> const Task* {
    auto it = tasks_.find(id);
    if (it == tasks_.end() || it->second.terminal() || it->second.barcode != b) return nullptr;
    return &it->second;
  };

  for (const auto& [b, rec] : catalog_.records()) {
    const auto where = shelves_.find(b);
    if (const auto* s = std::get_if<st::Shelved>(&rec.state)) {
      if (where != s->address) say(b, "Shelved at " + to_string(s->address) + " but not in that slot");
    } else if (const auto* q = std::get_if<st::Queued>(&rec.state)) {
      const Task* t = live_task(q->task, b);
      if (!t) {
        say(b, "Queued for a task that is not live");
      } else if (t->address && where != t->address) {
        say(b, "Queued but its slot " + to_string(*t->address) + " does not hold it");
      }
    } else if (const auto* tr = std::get_if<st::InTransit>(&rec.state)) {
      bool found = false;
      for (const auto& [id, t] : tasks_) {
        found |= !t.terminal() && t.kind == TaskKind::Retrieve && t.barcode == b && t.arm == tr->arm;
      }
      if (!found) say(b, "InTransit without a live retrieval on arm " + std::to_string(tr->arm));
      if (where) say(b, "InTransit but still occupies " + to_string(*where));
    } else if (where) {
      say(b, catalog::describe(rec.state) + " but occupies " + to_string(*where));
    }
  }

  for (const auto& [addr, occ] : shelves_.occupancy()) {
    if (!catalog_.contains(occ.barcode)) say(occ.barcode, "on the shelf but not in the catalog");
  }

  const auto replayed = catalog::replay(log_);
  for (const auto& [b, s] : replayed) {
    const auto* rec = catalog_.find(b);
    if (!rec) {
      say(b, "in the log but not in the catalog");
    } else if (!(rec->state == s)) {
      say(b, "log replays to " + catalog::describe(s) + ", catalog says " + catalog::describe(rec->state));
    }
  }
  for (const auto& [b, rec] : catalog_.records()) {
    if (!replayed.contains(b) && !std::holds_alternative<st::AtIntake>(rec.state)) {
      say(b, catalog::describe(rec.state) + " with no log history");
    }
  }
  return bad;
}

}  // namespace lms::orchestrator
