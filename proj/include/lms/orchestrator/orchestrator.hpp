#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lms/catalog/catalog.hpp"
#include "lms/catalog/transaction_log.hpp"
#include "lms/railnet/graph.hpp"
#include "lms/railnet/routing.hpp"
#include "lms/shelving/shelf_map.hpp"
#include "lms/sim/event.hpp"

namespace lms::orchestrator {

using catalog::Barcode;

enum class TaskKind { Return, Retrieve };
enum class TaskState { Pending, Assigned, Active, Done, Failed };

std::string_view to_string(TaskKind k);
std::string_view to_string(TaskState s);

struct Task {
  TaskId id = 0;
  TaskKind kind = TaskKind::Return;
  Barcode barcode = Barcode::validate("0000000000000");
  std::optional<KioskId> kiosk;          // Retrieve only
  std::optional<ShelfAddress> address;   // Return: assigned slot; Retrieve: where the book sits
  TaskState state = TaskState::Pending;
  std::optional<ArmId> arm;
  std::optional<std::string> failure;
  TimeMs submitted_ms = 0;
  std::optional<TimeMs> active_ms;
  std::optional<TimeMs> completed_ms;  // Done or Failed

  bool terminal() const { return state == TaskState::Done || state == TaskState::Failed; }
};

nlohmann::json task_to_json(const Task& t);

/// A trace event still to be stamped with time and seq by the engine.
struct Notice {
  EventKind kind;
  nlohmann::json payload;
};

struct IdleArm {
  ArmId id = 0;
  NodeId node;
  railnet::KinematicParams kinematics;
};

struct Assignment {
  TaskId task = 0;
  ArmId arm = 0;
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct SubmitResult {
  TaskId task = 0;
  std::vector<Notice> notices;
};

/// Owns the catalog, the shelf map and the transaction log, and keeps them
/// in agreement. Single writer: every mutation comes from submit_* or
/// on_event, both called from the engine thread.
class Orchestrator {
 public:
  /// Shelved books in `initial` are placed at their addresses and every
  /// non-AtIntake book is bootstrapped into the log at t=0.
  /// Throws ScenarioInvalid for books in Queued/InTransit or at bad addresses.
  Orchestrator(catalog::Catalog initial, shelving::ShelfMap shelves, const railnet::RailGraph& graph,
               catalog::SortPolicy policy = {});

  /// Accepts a returned book and reserves its slot. If no slot is available
  /// the task fails at once and the book goes to ManualHandling.
  /// Throws DuplicateBarcode if the book is already in the library's hands.
  SubmitResult submit_return(catalog::BookRecord record, TimeMs now);
  /// Throws UnknownBook, BookNotShelved, UnknownKiosk.
  SubmitResult submit_retrieve(const Barcode& barcode, const KioskId& kiosk, TimeMs now);

  /// Lowest-id Pending task first, each to the idle arm with the smallest
  /// route time to the task's first destination (ties: lower arm id);
  /// repeats while both remain. Pure: the caller emits ArmAssigned.
  std::vector<Assignment> dispatch(std::vector<IdleArm> idle) const;
  /// Intake for a return, the book's rack port for a retrieval.
  NodeId first_destination(const Task& t) const;

  /// Applies an engine event and returns follow-up notices (TaskCompleted,
  /// TaskFailed). Throws UnknownTask, StateMachineViolation.
  std::vector<Notice> on_event(const Event& e);

  /// Catalog, shelves and log agree; empty when consistent.
  std::vector<std::string> check_consistency() const;

  const catalog::Catalog& catalog() const noexcept { return catalog_; }
  const shelving::ShelfMap& shelves() const noexcept { return shelves_; }
  const catalog::TransactionLog& log() const noexcept { return log_; }
  const std::map<TaskId, Task>& tasks() const noexcept { return tasks_; }
  const Task& task(TaskId id) const;  // throws UnknownTask
  const catalog::SortPolicy& policy() const noexcept { return policy_; }
  std::size_t pending_count() const;
  bool all_terminal() const;

 private:
  Task& task_mut(TaskId id);
  void log_entry(catalog::TxKind kind, const Barcode& b, TimeMs t, std::optional<TaskId> task,
                 std::optional<ArmId> arm = {}, std::optional<ShelfAddress> addr = {},
                 std::optional<KioskId> kiosk = {});
  Notice fail(Task& t, const std::string& reason, TimeMs now);
  Notice complete(Task& t, TimeMs now);

  catalog::Catalog catalog_;
  shelving::ShelfMap shelves_;
  const railnet::RailGraph* graph_;
  catalog::SortPolicy policy_;
  catalog::TransactionLog log_;
  std::map<TaskId, Task> tasks_;
  TaskId next_task_ = 1;
};

}  // namespace lms::orchestrator
