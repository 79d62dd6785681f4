#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "lms/arm/state_machine.hpp"
#include "lms/layout.hpp"
#include "lms/orchestrator/orchestrator.hpp"
#include "lms/railnet/reservation.hpp"
#include "lms/sim/event.hpp"
#include "lms/sim/rng.hpp"

namespace lms::sim {

struct Request {
  enum class Op { Return, Retrieve };
  TimeMs at_ms = 0;
  Op op = Op::Return;
  std::optional<catalog::BookRecord> record;  // Return
  std::optional<catalog::Barcode> barcode;    // Retrieve
  KioskId kiosk;                              // Retrieve
};

struct SimOptions {
  std::uint64_t seed = 0;
  std::optional<TimeMs> budget_ms;  // no limit when absent
  bool keep_trace = true;
  bool check_invariants = false;    // run every consistency check after every event
};

/// What an API client sees of one arm.
struct ArmView {
  ArmId id = 0;
  NodeId home;
  NodeId node;  // last node reached
  std::string mode;
  std::optional<TaskId> task;
  std::optional<std::string> carried;
  std::optional<std::string> phase;
  std::optional<railnet::EdgeId> edge;  // while travelling
  int level = 0;
  int slot = 0;
};

nlohmann::json arm_view_to_json(const ArmView& a);

/// Discrete-event world: arms, rail reservations and sensors driven from one
/// timer queue ordered by (time, insertion seq), with the orchestrator as the
/// single owner of catalog, shelves and log. Every observable change is an
/// Event; the trace is the authoritative record.
class Simulator {
 public:
  /// Each arm starts parked on its home node holding the home segment.
  Simulator(Layout layout, catalog::Catalog initial, SimOptions options);
  ~Simulator();
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  /// Queues an external request. Returns arrive over the RF link, so they
  /// reach the controller rf_latency_ms after at_ms. Throws ScenarioInvalid
  /// if the arrival would lie in the past.
  void schedule(const Request& r);

  /// Immediate submissions at the current clock (the kiosk API path).
  /// Domain errors propagate unchanged.
  TaskId submit_return(catalog::BookRecord record);
  TaskId submit_retrieve(const catalog::Barcode& barcode, const KioskId& kiosk);

  /// Processes the earliest timer. False when none is pending.
  bool step();
  /// Processes every timer due at or before t, then sets the clock to t.
  void advance_to(TimeMs t);
  /// Runs until no timer is pending. Throws SimTimeBudgetExceeded if the
  /// clock would pass the budget or tasks remain that can never finish.
  void run();
  /// With nothing scheduled, sends arms parked by deadlock recovery on their
  /// way. True if that scheduled anything. run() does this itself; a
  /// wall-clock driver calls it after each advance.
  bool wake_parked();

  TimeMs now() const noexcept { return now_; }
  std::optional<TimeMs> next_time() const;
  const std::vector<Event>& trace() const noexcept { return trace_; }
  std::uint64_t events_emitted() const noexcept { return next_seq_; }
  void on_event(std::function<void(const Event&)> listener) { listener_ = std::move(listener); }

  const orchestrator::Orchestrator& orchestrator() const noexcept { return *orch_; }
  const Layout& layout() const noexcept { return layout_; }
  const railnet::RailGraph& graph() const noexcept { return *graph_; }
  const railnet::ReservationTable& reservations() const noexcept { return table_; }
  std::vector<ArmView> arms() const;
  std::vector<ArmId> arm_ids() const;
  int deadlocks_resolved() const noexcept { return deadlocks_resolved_; }
  /// Violations found by check_invariants, prefixed with the event seq.
  const std::vector<std::string>& violations() const noexcept { return violations_; }
  /// World-level checks beyond the orchestrator's three-way agreement.
  std::vector<std::string> check_world() const;

 private:
  enum class LegKind { Task, Home, Relocate, Retreat, Recovery };
  struct Leg {
    NodeId to;
    arm::MotionProgram work;
    bool ends_in_standby = false;
    LegKind kind = LegKind::Task;
  };
  struct Job {
    TaskId task = 0;
    orchestrator::TaskKind kind = orchestrator::TaskKind::Return;
    catalog::Barcode book = catalog::Barcode::validate("0000000000000");
    ShelfAddress address;
    std::optional<KioskId> kiosk;
  };
  struct Arm {
    ArmSpec spec;
    arm::ArmTiming timing;
    arm::ArmState fsm;
    std::optional<Job> job;
    std::deque<Leg> legs;            // front is the next leg to request
    std::optional<Leg> leg;          // leg being executed
    bool queued = false;
    railnet::Path pending_path;      // of the queued request
    railnet::Path path;              // of the current leg
    std::size_t steps_done = 0;      // travel steps completed on `path`
    std::uint64_t token = 0;         // invalidates timers of an abandoned phase
    TimeMs phase_start = 0;
    // Sensor-gated phases run as a chain of ticks.
    std::vector<TimeMs> ticks;       // absolute times
    std::size_t tick = 0;
    std::size_t tick_events = 0;     // leading ticks that carry a sample or pulse
    std::vector<arm::ForceSample> samples;  // grip: current attempt, relative times
    arm::GripAttempt attempt_result;
    int attempt = 0;
    arm::AlignResult align_result;
    bool parked = false;             // retreated from a deadlock, waiting on `awaiting`
    std::set<railnet::ResourceId> awaiting;
  };
  enum class TimerKind { Request, PhaseEnd, Tick };
  struct Timer {
    TimeMs at = 0;
    std::uint64_t seq = 0;
    TimerKind kind = TimerKind::Request;
    std::size_t index = 0;  // request index or arm index
    std::uint64_t token = 0;
    bool operator>(const Timer& o) const { return at != o.at ? at > o.at : seq > o.seq; }
  };

  void schedule_timer(TimeMs at, TimerKind kind, std::size_t index, std::uint64_t token);
  void handle(const Timer& t);
  void emit(EventKind kind, nlohmann::json payload);
  void emit_all(const std::vector<orchestrator::Notice>& notices);
  nlohmann::json arm_payload(const Arm& a) const;

  void submit_request(const Request& r);
  void dispatch();
  void assign(Arm& a, TaskId task);
  void request_next_leg(Arm& a);
  void start_leg(Arm& a, railnet::Path path);
  void begin_phase(Arm& a);
  void end_timed_phase(Arm& a);
  void on_tick(Arm& a);
  void start_grip_attempt(Arm& a);
  void finish_grip(Arm& a);
  void finish_align(Arm& a);
  void leg_done(Arm& a);
  void recover(Arm& a, bool extended, int pulses_out);
  void release(Arm& a, const std::vector<railnet::ResourceId>& resources);
  void resolve_contention();
  struct Refuge {
    NodeId node;
    railnet::Path path;
  };
  /// Nearest free terminal reachable with resources grantable right now,
  /// preferring ones nobody is about to need. `avoid` lists parking segments
  /// that must not be chosen.
  std::optional<Refuge> find_refuge(const Arm& a, const std::set<railnet::ResourceId>& avoid) const;
  void move_to_refuge(Arm& a, const Refuge& r, LegKind kind, bool ends_in_standby);
  bool resolve_deadlock(const std::vector<ArmId>& cycle);
  void unpark_all();
  void check_now(const Event& e);

  std::vector<railnet::ResourceId> resources_for(const NodeId& from, const railnet::Path& p) const;
  bool grantable(const Arm& a, const std::vector<railnet::ResourceId>& rs) const;
  std::set<railnet::ResourceId> wanted_resources() const;
  const railnet::EdgeId& parking_segment(const NodeId& terminal) const;
  Arm& arm(ArmId id);
  bool stationary_free(const Arm& a) const;

  Layout layout_;
  std::unique_ptr<railnet::RailGraph> graph_;
  std::unique_ptr<orchestrator::Orchestrator> orch_;
  SimOptions options_;
  Rng rng_;
  railnet::ReservationTable table_;
  std::vector<Arm> arms_;
  std::vector<Request> requests_;
  std::priority_queue<Timer, std::vector<Timer>, std::greater<Timer>> timers_;
  std::uint64_t next_timer_seq_ = 0;
  std::uint64_t next_seq_ = 0;
  TimeMs now_ = 0;
  std::vector<Event> trace_;
  std::function<void(const Event&)> listener_;
  int deadlocks_resolved_ = 0;
  std::vector<std::string> violations_;
  bool in_contention_ = false;
  bool contention_dirty_ = false;
  bool in_dispatch_ = false;
  bool dispatch_dirty_ = false;
};

}  // namespace lms::sim
