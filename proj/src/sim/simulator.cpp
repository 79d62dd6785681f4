#include "lms/sim/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "lms/catalog/io.hpp"
#include "lms/error.hpp"

namespace lms::sim {

using arm::Phase;
using arm::PhaseKind;
using orchestrator::TaskKind;
using railnet::ResourceId;
namespace ev = arm::event;
namespace st = catalog::state;

nlohmann::json arm_view_to_json(const ArmView& a) {
  nlohmann::json j = {{"id", a.id}, {"home", a.home}, {"node", a.node}, {"mode", a.mode},
                      {"level", a.level}, {"slot", a.slot}};
  j["task"] = a.task ? nlohmann::json(*a.task) : nlohmann::json(nullptr);
  j["carried"] = a.carried ? nlohmann::json(*a.carried) : nlohmann::json(nullptr);
  j["phase"] = a.phase ? nlohmann::json(*a.phase) : nlohmann::json(nullptr);
  j["edge"] = a.edge ? nlohmann::json(*a.edge) : nlohmann::json(nullptr);
  return j;
}

namespace {

std::int64_t to_mm(double metres) { return std::llround(metres * 1000.0); }

}  // namespace

Simulator::Simulator(Layout layout, catalog::Catalog initial, SimOptions options)
    : layout_(std::move(layout)), options_(options), rng_(options.seed) {
  graph_ = std::make_unique<railnet::RailGraph>(layout_.build_graph());
  orch_ = std::make_unique<orchestrator::Orchestrator>(std::move(initial), layout_.build_shelves(), *graph_);
  for (const auto& spec : layout_.arms) {
    Arm a;
    a.spec = spec;
    a.timing = layout_.timing_for(spec);
    a.fsm.node = spec.home;
    // Initial parking is part of the installation, not a traced action.
    if (table_.reserve(spec.id, {parking_segment(spec.home)}) != railnet::ReserveOutcome::Granted) {
      throw Error(Errc::LayoutInvalid, "arm " + std::to_string(spec.id) + " home segment is already taken");
    }
    arms_.push_back(std::move(a));
  }
}

Simulator::~Simulator() = default;

const railnet::EdgeId& Simulator::parking_segment(const NodeId& terminal) const {
  return graph_->terminal_edge(terminal).id;
}

Simulator::Arm& Simulator::arm(ArmId id) {
  for (auto& a : arms_) {
    if (a.spec.id == id) return a;
  }
  throw Error(Errc::StateMachineViolation, "no arm " + std::to_string(id));
}

std::vector<ArmId> Simulator::arm_ids() const {
  std::vector<ArmId> ids;
  for (const auto& a : arms_) ids.push_back(a.spec.id);
  return ids;
}

std::vector<ArmView> Simulator::arms() const {
  std::vector<ArmView> out;
  for (const auto& a : arms_) {
    ArmView v;
    v.id = a.spec.id;
    v.home = a.spec.home;
    v.node = a.fsm.node;
    v.mode = std::string(arm::to_string(a.fsm.mode));
    if (a.job) v.task = a.job->task;
    if (a.fsm.carried) v.carried = a.fsm.carried->str();
    if (const Phase* p = a.fsm.current_phase()) {
      v.phase = std::string(arm::to_string(p->kind));
      if (p->kind == PhaseKind::Travel) v.edge = p->edge;
    }
    v.level = a.fsm.level;
    v.slot = a.fsm.slot;
    out.push_back(std::move(v));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Engine

void Simulator::schedule_timer(TimeMs at, TimerKind kind, std::size_t index, std::uint64_t token) {
  timers_.push({at, next_timer_seq_++, kind, index, token});
}

std::optional<TimeMs> Simulator::next_time() const {
  if (timers_.empty()) return std::nullopt;
  return timers_.top().at;
}

bool Simulator::step() {
  if (timers_.empty()) return false;
  const Timer t = timers_.top();
  if (options_.budget_ms && t.at > *options_.budget_ms) {
    throw Error(Errc::SimTimeBudgetExceeded, "next event at " + std::to_string(t.at) + " ms exceeds budget " +
                                                 std::to_string(*options_.budget_ms) + " ms");
  }
  timers_.pop();
  now_ = t.at;
  handle(t);
  return true;
}

void Simulator::advance_to(TimeMs t) {
  while (!timers_.empty() && timers_.top().at <= t) step();
  now_ = std::max(now_, t);
}

void Simulator::run() {
  for (;;) {
    if (step() || wake_parked()) continue;
    if (!orch_->all_terminal()) {
      std::size_t open = 0;
      for (const auto& [id, t] : orch_->tasks()) open += !t.terminal();
      throw Error(Errc::SimTimeBudgetExceeded,
                  std::to_string(open) + " tasks can make no further progress at " + std::to_string(now_) + " ms");
    }
    return;
  }
}

bool Simulator::wake_parked() {
  if (!timers_.empty()) return false;
  if (std::none_of(arms_.begin(), arms_.end(), [](const Arm& a) { return a.parked && !a.leg; })) return false;
  unpark_all();
  return !timers_.empty();
}

void Simulator::handle(const Timer& t) {
  if (t.kind == TimerKind::Request) {
    submit_request(requests_[t.index]);
    return;
  }
  Arm& a = arms_[t.index];
  if (t.token != a.token) return;
  if (t.kind == TimerKind::PhaseEnd) {
    end_timed_phase(a);
  } else {
    on_tick(a);
  }
}

void Simulator::emit(EventKind kind, nlohmann::json payload) {
  Event e{now_, next_seq_++, kind, std::move(payload)};
  const auto follow = orch_->on_event(e);
  if (listener_) listener_(e);
  check_now(e);
  if (options_.keep_trace) trace_.push_back(std::move(e));
  emit_all(follow);
}

void Simulator::emit_all(const std::vector<orchestrator::Notice>& notices) {
  for (const auto& n : notices) emit(n.kind, n.payload);
}

nlohmann::json Simulator::arm_payload(const Arm& a) const {
  nlohmann::json p = {{"arm", a.spec.id}};
  if (a.job) p["task"] = a.job->task;
  return p;
}

// ---------------------------------------------------------------------------
// Requests and dispatch

void Simulator::schedule(const Request& r) {
  const TimeMs arrival = r.at_ms + (r.op == Request::Op::Return ? layout_.rf_latency_ms : 0);
  if (arrival < now_) {
    throw Error(Errc::ScenarioInvalid, "request at " + std::to_string(r.at_ms) + " ms lies in the past");
  }
  if ((r.op == Request::Op::Return && !r.record) || (r.op == Request::Op::Retrieve && !r.barcode)) {
    throw Error(Errc::ScenarioInvalid, "request at " + std::to_string(r.at_ms) + " ms is incomplete");
  }
  requests_.push_back(r);
  schedule_timer(arrival, TimerKind::Request, requests_.size() - 1, 0);
}

void Simulator::submit_request(const Request& r) {
  orchestrator::SubmitResult res;
  try {
    res = r.op == Request::Op::Return ? orch_->submit_return(*r.record, now_)
                                      : orch_->submit_retrieve(*r.barcode, r.kiosk, now_);
  } catch (const Error& ex) {
    throw Error(Errc::ScenarioInvalid, "request at " + std::to_string(r.at_ms) + " ms: " + ex.what());
  }
  emit_all(res.notices);
  dispatch();
}

TaskId Simulator::submit_return(catalog::BookRecord record) {
  auto res = orch_->submit_return(std::move(record), now_);
  emit_all(res.notices);
  dispatch();
  return res.task;
}

TaskId Simulator::submit_retrieve(const catalog::Barcode& barcode, const KioskId& kiosk) {
  auto res = orch_->submit_retrieve(barcode, kiosk, now_);
  emit_all(res.notices);
  dispatch();
  return res.task;
}

void Simulator::dispatch() {
  if (in_dispatch_) {
    dispatch_dirty_ = true;
    return;
  }
  in_dispatch_ = true;
  do {
    dispatch_dirty_ = false;
    std::vector<orchestrator::IdleArm> idle;
    for (const auto& a : arms_) {
      if (a.fsm.mode == arm::Mode::Standby && !a.job && !a.leg && !a.queued) {
        idle.push_back({a.spec.id, a.fsm.node, a.timing.kinematics});
      }
    }
    for (const auto& as : orch_->dispatch(std::move(idle))) assign(arm(as.arm), as.task);
  } while (dispatch_dirty_);
  in_dispatch_ = false;
}

void Simulator::assign(Arm& a, TaskId task) {
  const auto& t = orch_->task(task);
  a.job = Job{t.id, t.kind, t.barcode, *t.address, t.kiosk};
  emit(EventKind::ArmAssigned, {{"task", t.id}, {"arm", a.spec.id}, {"node", a.fsm.node}});

  const NodeId port = graph_->rack_port(t.address->rack);
  const auto& shelves = orch_->shelves();
  if (t.kind == TaskKind::Return) {
    a.legs.push_back({*graph_->intake(), arm::plan_station_work(arm::ShelfAction::Pick, a.timing), false, LegKind::Task});
    a.legs.push_back({port, arm::plan_shelf_work(shelves, arm::ShelfAction::Place, *t.address, a.timing), false,
                      LegKind::Task});
  } else {
    a.legs.push_back({port, arm::plan_shelf_work(shelves, arm::ShelfAction::Pick, *t.address, a.timing), false,
                      LegKind::Task});
    a.legs.push_back({*t.kiosk, arm::plan_station_work(arm::ShelfAction::Place, a.timing), false, LegKind::Task});
  }
  a.legs.push_back({a.spec.home, {}, true, LegKind::Home});
  request_next_leg(a);
}

// ---------------------------------------------------------------------------
// Legs and phases

std::vector<ResourceId> Simulator::resources_for(const NodeId& from, const railnet::Path& p) const {
  if (p.empty()) return {parking_segment(from)};
  std::vector<ResourceId> rs;
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    rs.push_back(p.steps[i].edge);
    if (i + 1 < p.steps.size()) rs.push_back(p.steps[i].to);  // always a turntable
  }
  return rs;
}

bool Simulator::grantable(const Arm& a, const std::vector<ResourceId>& rs) const {
  return std::all_of(rs.begin(), rs.end(), [&](const ResourceId& r) {
    auto h = table_.holder(r);
    return !h || *h == a.spec.id;
  });
}

void Simulator::request_next_leg(Arm& a) {
  const Leg& leg = a.legs.front();
  railnet::Path path = railnet::shortest_route(*graph_, a.fsm.node, leg.to, a.timing.kinematics);
  if (table_.reserve(a.spec.id, resources_for(a.fsm.node, path)) == railnet::ReserveOutcome::Granted) {
    start_leg(a, std::move(path));
    return;
  }
  a.queued = true;
  a.pending_path = std::move(path);
  resolve_contention();
}

void Simulator::start_leg(Arm& a, railnet::Path path) {
  a.queued = false;
  Leg leg = std::move(a.legs.front());
  a.legs.pop_front();

  nlohmann::json p = arm_payload(a);
  p["segments"] = resources_for(a.fsm.node, path);
  p["to"] = leg.to;
  emit(EventKind::SegmentReserved, std::move(p));

  arm::MotionProgram program = arm::plan_travel(*graph_, path, a.timing.kinematics);
  program.append(leg.work);
  const bool first_of_task = a.fsm.mode == arm::Mode::Standby && a.job && leg.kind == LegKind::Task;
  if (first_of_task) {
    a.fsm = arm::step(a.fsm, ev::AssignTask{std::move(program), leg.ends_in_standby});
  } else {
    a.fsm = arm::step(a.fsm, ev::Depart{std::move(program), leg.ends_in_standby});
  }
  a.path = std::move(path);
  a.steps_done = 0;
  a.leg = std::move(leg);
  begin_phase(a);
}

void Simulator::begin_phase(Arm& a) {
  const Phase* p = a.fsm.current_phase();
  if (!p) {
    leg_done(a);
    return;
  }
  a.phase_start = now_;
  ++a.token;
  const std::size_t idx = static_cast<std::size_t>(&a - arms_.data());
  if (p->kind == PhaseKind::Grip) {
    a.attempt = 0;
    start_grip_attempt(a);
    return;
  }
  if (p->kind == PhaseKind::Align && p->pulses > 0) {
    const SensorNoise& noise = layout_.noise;
    std::vector<TimeMs> times;
    TimeMs t = 0;
    for (int k = 0; k < p->pulses; ++k) {
      double gap = static_cast<double>(p->pulse_interval_ms);
      if (noise.ir_jitter_fraction > 0.0) gap *= 1.0 + rng_.uniform(-noise.ir_jitter_fraction, noise.ir_jitter_fraction);
      t += std::max<TimeMs>(1, std::llround(gap));
      if (rng_.bernoulli(noise.ir_miss_probability)) continue;  // this beacon never fires
      times.push_back(t);
    }
    a.align_result = arm::ir_align(0, p->pulses, times, p->pulse_interval_ms, a.timing.ir);
    a.ticks.clear();
    for (int k = 0; k < a.align_result.pulses_counted; ++k) a.ticks.push_back(now_ + times[static_cast<std::size_t>(k)]);
    a.tick_events = a.ticks.size();
    if (!a.align_result.aligned) a.ticks.push_back(now_ + a.align_result.at_ms);
    a.tick = 0;
    schedule_timer(a.ticks[0], TimerKind::Tick, idx, a.token);
    return;
  }
  schedule_timer(now_ + p->duration_ms, TimerKind::PhaseEnd, idx, a.token);
}

void Simulator::start_grip_attempt(Arm& a) {
  const SensorNoise& noise = layout_.noise;
  const arm::GripParams& gp = a.timing.grip;
  ++a.attempt;
  ++a.token;
  int dead_jaw = 0;  // 1 left, 2 right
  if (rng_.bernoulli(noise.grip_slip_probability)) dead_jaw = rng_.uniform() < 0.5 ? 1 : 2;
  auto force = [&]() {
    double f = noise.grip_nominal_newton;
    if (noise.grip_sigma_newton > 0.0) f = rng_.normal(f, noise.grip_sigma_newton);
    return static_cast<double>(std::max<std::int64_t>(0, std::llround(f * 1000.0))) / 1000.0;
  };
  a.samples.clear();
  for (TimeMs t = 0; t <= gp.timeout_ms; t += gp.sample_period_ms) {
    const double left = force();
    const double right = force();
    a.samples.push_back({t, dead_jaw == 1 ? 0.0 : left, dead_jaw == 2 ? 0.0 : right});
  }
  a.attempt_result = arm::grip_attempt(a.samples, gp);
  a.ticks.clear();
  for (const auto& s : a.samples) {
    if (s.t_ms > a.attempt_result.at_ms) break;
    a.ticks.push_back(now_ + s.t_ms);
  }
  a.tick_events = a.ticks.size();
  if (a.ticks.empty() || a.ticks.back() != now_ + a.attempt_result.at_ms) a.ticks.push_back(now_ + a.attempt_result.at_ms);
  a.tick = 0;
  schedule_timer(a.ticks[0], TimerKind::Tick, static_cast<std::size_t>(&a - arms_.data()), a.token);
}

void Simulator::on_tick(Arm& a) {
  const Phase phase = *a.fsm.current_phase();
  const std::size_t i = a.tick;
  const bool last = i + 1 == a.ticks.size();
  if (phase.kind == PhaseKind::Grip) {
    if (i < a.tick_events) {
      const auto& s = a.samples[i];
      nlohmann::json p = arm_payload(a);
      p["attempt"] = a.attempt;
      p["t_ms"] = s.t_ms;
      p["left_mn"] = std::llround(s.left_n * 1000.0);
      p["right_mn"] = std::llround(s.right_n * 1000.0);
      emit(EventKind::GripSample, std::move(p));
      a.fsm = arm::step(a.fsm, ev::GripSample{});
    }
    if (last) {
      finish_grip(a);
      return;
    }
  } else {
    if (i < a.tick_events) {
      nlohmann::json p = arm_payload(a);
      p["pulse"] = static_cast<int>(i) + 1;
      p["of"] = phase.pulses;
      emit(EventKind::BeaconPulse, std::move(p));
      a.fsm = arm::step(a.fsm, ev::BeaconPulse{});
    }
    if (last) {
      finish_align(a);
      return;
    }
  }
  a.tick = i + 1;
  schedule_timer(a.ticks[a.tick], TimerKind::Tick, static_cast<std::size_t>(&a - arms_.data()), a.token);
}

void Simulator::finish_align(Arm& a) {
  nlohmann::json p = arm_payload(a);
  p["phase"] = "align";
  p["duration_ms"] = now_ - a.phase_start;
  p["pulses"] = a.align_result.pulses_counted;
  if (a.align_result.aligned) {
    // The last BeaconPulse already advanced the state machine.
    p["slot"] = a.fsm.slot;
    emit(EventKind::PhaseComplete, std::move(p));
    begin_phase(a);
    return;
  }
  p["outcome"] = "MissedBeacon";
  emit(EventKind::PhaseComplete, std::move(p));
  a.fsm = arm::step(a.fsm, ev::MissedBeacon{});
  recover(a, false, a.align_result.pulses_counted);
}

void Simulator::finish_grip(Arm& a) {
  const bool final = !a.attempt_result.gripped && a.attempt > a.timing.grip.max_retries;
  nlohmann::json done = arm_payload(a);
  done["phase"] = "grip";
  done["attempts"] = a.attempt;

  if (a.attempt_result.gripped) {
    const catalog::Barcode book = a.job->book;
    nlohmann::json p = arm_payload(a);
    p["barcode"] = book.str();
    p["attempt"] = a.attempt;
    emit(EventKind::GripOk, std::move(p));
    a.fsm = arm::step(a.fsm, ev::GripOk{book});
    done["duration_ms"] = now_ - a.phase_start;
    emit(EventKind::PhaseComplete, std::move(done));
    if (a.job->kind == TaskKind::Retrieve && a.leg->kind == LegKind::Task) {
      emit(EventKind::BookPicked, {{"task", a.job->task}, {"arm", a.spec.id}, {"barcode", book.str()},
                                   {"address", a.job->address}});
    }
    begin_phase(a);
    return;
  }

  nlohmann::json p = arm_payload(a);
  p["attempt"] = a.attempt;
  p["final"] = final;
  emit(EventKind::GripFail, std::move(p));
  a.fsm = arm::step(a.fsm, ev::GripFail{final});
  if (!final) {
    start_grip_attempt(a);
    return;
  }
  done["duration_ms"] = now_ - a.phase_start;
  done["outcome"] = "GripFailure";
  emit(EventKind::PhaseComplete, std::move(done));
  recover(a, true, 0);
}

void Simulator::end_timed_phase(Arm& a) {
  const Phase phase = *a.fsm.current_phase();
  nlohmann::json p = arm_payload(a);
  p["phase"] = std::string(arm::to_string(phase.kind));
  p["duration_ms"] = phase.duration_ms;
  switch (phase.kind) {
    case PhaseKind::Travel:
      p["edge"] = phase.edge;
      p["node"] = phase.node;
      p["distance_mm"] = to_mm(phase.distance_m);
      break;
    case PhaseKind::Rotate:
      p["node"] = phase.node;
      p["steps"] = phase.steps;
      break;
    case PhaseKind::Hoist:
    case PhaseKind::Unhoist: p["level"] = phase.level; break;
    case PhaseKind::Align:
    case PhaseKind::Unalign:
      p["slot"] = phase.slot;
      p["pulses"] = phase.pulses;
      break;
    default: break;
  }
  emit(EventKind::PhaseComplete, std::move(p));

  if (phase.kind == PhaseKind::Release) {
    const catalog::Barcode book = *a.fsm.carried;
    a.fsm = arm::step(a.fsm, ev::ReleaseOk{});
    if (a.job && a.leg->kind == LegKind::Task) {
      if (a.job->kind == TaskKind::Return) {
        emit(EventKind::BookPlaced, {{"task", a.job->task}, {"arm", a.spec.id}, {"barcode", book.str()},
                                     {"address", a.job->address}});
      } else {
        emit(EventKind::BookDelivered, {{"task", a.job->task}, {"arm", a.spec.id}, {"barcode", book.str()},
                                        {"kiosk", *a.job->kiosk}});
      }
    }
  } else {
    a.fsm = arm::step(a.fsm, ev::PhaseComplete{});
  }

  if (phase.kind == PhaseKind::Travel) {
    ++a.steps_done;
    // Arriving at the next node frees the edge and turntable behind.
    if (a.steps_done >= 2) {
      const auto& behind = a.path.steps[a.steps_done - 2];
      release(a, {behind.edge, behind.to});
    }
  }
  begin_phase(a);
}

void Simulator::leg_done(Arm& a) {
  a.leg.reset();
  if (a.fsm.mode == arm::Mode::Standby) {
    a.job.reset();
    a.parked = false;
    a.awaiting.clear();
    dispatch();
    resolve_contention();
    return;
  }
  if (a.legs.empty()) {
    throw Error(Errc::StateMachineViolation, "arm " + std::to_string(a.spec.id) + " waiting with no next leg");
  }
  if (a.parked && !a.awaiting.empty()) return;
  a.parked = false;
  request_next_leg(a);
}

void Simulator::recover(Arm& a, bool extended, int pulses_out) {
  a.job.reset();
  a.legs.clear();
  a.leg.reset();
  const auto& k = a.timing.kinematics;
  arm::MotionProgram work;
  if (extended) {
    Phase p;
    p.kind = PhaseKind::Retract;
    p.duration_ms = arm::to_ms(k.extend_time_s);
    work.phases.push_back(p);
  }
  const auto& node = graph_->node(a.fsm.node);
  if (node.kind == railnet::NodeKind::RackPort) {
    const int pulses = pulses_out + a.fsm.slot;
    if (pulses > 0) {
      Phase p;
      p.kind = PhaseKind::Unalign;
      p.pulses = pulses;
      p.pulse_interval_ms =
          arm::expected_pulse_interval_ms(orch_->shelves().level_spec(*node.rack, a.fsm.level).pitch_mm, k.hoist_speed_mps);
      p.duration_ms = pulses * p.pulse_interval_ms;
      work.phases.push_back(p);
    }
    if (a.fsm.level > 0) {
      Phase p;
      p.kind = PhaseKind::Unhoist;
      p.distance_m = a.fsm.level * k.level_height_m;
      p.duration_ms = arm::to_ms(arm::travel_time(p.distance_m, k.hoist_speed_mps));
      work.phases.push_back(p);
    }
  }
  // A book still in the jaws is set down at home for a person to collect.
  arm::MotionProgram drop;
  if (a.fsm.carried) drop = arm::plan_station_work(arm::ShelfAction::Place, a.timing);
  a.legs.push_back({a.fsm.node, std::move(work), false, LegKind::Recovery});
  a.legs.push_back({a.spec.home, std::move(drop), true, LegKind::Home});
  request_next_leg(a);
}

// ---------------------------------------------------------------------------
// Contention

void Simulator::release(Arm& a, const std::vector<ResourceId>& resources) {
  nlohmann::json p = arm_payload(a);
  p["segments"] = resources;
  emit(EventKind::SegmentReleased, std::move(p));
  const auto granted = table_.release(a.spec.id, resources);
  for (auto& other : arms_) {
    for (const auto& r : resources) other.awaiting.erase(r);
  }
  for (ArmId id : granted) {
    Arm& w = arm(id);
    start_leg(w, w.pending_path);
  }
  for (auto& other : arms_) {
    if (other.parked && other.awaiting.empty() && !other.leg && !other.queued) {
      other.parked = false;
      request_next_leg(other);
    }
  }
  resolve_contention();
}

bool Simulator::stationary_free(const Arm& a) const {
  if (a.leg || a.queued) return false;
  return (a.fsm.mode == arm::Mode::Standby && !a.job) || a.parked;
}

std::set<ResourceId> Simulator::wanted_resources() const {
  std::set<ResourceId> wanted;
  for (const auto& a : arms_) {
    if (const auto* req = table_.queued_request(a.spec.id)) wanted.insert(req->begin(), req->end());
    for (const auto& leg : a.legs) wanted.insert(parking_segment(leg.to));
  }
  return wanted;
}

std::optional<Simulator::Refuge> Simulator::find_refuge(const Arm& a, const std::set<ResourceId>& avoid) const {
  const std::set<ResourceId> wanted = wanted_resources();
  std::optional<Refuge> best;
  std::tuple<int, double, NodeId> best_rank;
  for (const auto& n : graph_->nodes()) {
    if (!railnet::is_terminal(n.kind) || n.id == a.fsm.node) continue;
    const auto& seg = parking_segment(n.id);
    if (table_.holder(seg) || avoid.contains(seg)) continue;
    railnet::Path path;
    try {
      path = railnet::shortest_route(*graph_, a.fsm.node, n.id, a.timing.kinematics);
    } catch (const Error& ex) {
      if (ex.code() != Errc::NoRoute) throw;
      continue;
    }
    if (!grantable(a, resources_for(a.fsm.node, path))) continue;
    std::tuple<int, double, NodeId> rank{wanted.contains(seg) ? 1 : 0, path.total_time_s, n.id};
    if (!best || rank < best_rank) {
      best_rank = rank;
      best = Refuge{n.id, std::move(path)};
    }
  }
  return best;
}

void Simulator::move_to_refuge(Arm& a, const Refuge& r, LegKind kind, bool ends_in_standby) {
  if (a.queued) {
    table_.cancel(a.spec.id);
    a.queued = false;
  }
  if (table_.reserve(a.spec.id, resources_for(a.fsm.node, r.path)) != railnet::ReserveOutcome::Granted) {
    throw Error(Errc::StateMachineViolation, "refuge path for arm " + std::to_string(a.spec.id) + " not grantable");
  }
  a.legs.push_front({r.node, {}, ends_in_standby, kind});
  start_leg(a, r.path);
}

void Simulator::resolve_contention() {
  if (in_contention_) {
    contention_dirty_ = true;
    return;
  }
  in_contention_ = true;
  int rounds = 0;
  do {
    contention_dirty_ = false;
    // An arm with nothing to do steps aside for one that is waiting on it.
    for (auto& w : arms_) {
      if (!w.queued) continue;
      for (const auto& r : table_.contested(w.spec.id)) {
        auto h = table_.holder(r);
        if (!h) continue;
        Arm& holder = arm(*h);
        if (!stationary_free(holder) || !w.queued) continue;
        const auto* req = table_.queued_request(w.spec.id);
        if (auto refuge = find_refuge(holder, std::set<ResourceId>(req->begin(), req->end()))) {
          const bool idle = holder.fsm.mode == arm::Mode::Standby && !holder.job;
          move_to_refuge(holder, *refuge, LegKind::Relocate, idle);
          contention_dirty_ = true;
        }
      }
    }
    if (auto cycle = table_.detect_deadlock()) {
      if (resolve_deadlock(*cycle)) contention_dirty_ = true;
    }
  } while (contention_dirty_ && ++rounds < 10000);
  in_contention_ = false;
  if (rounds >= 10000) throw Error(Errc::StateMachineViolation, "contention resolution does not settle");
}

bool Simulator::resolve_deadlock(const std::vector<ArmId>& cycle) {
  std::vector<Arm*> order;
  for (ArmId id : cycle) order.push_back(&arm(id));
  // Arms without a task yield first, then the youngest task.
  std::sort(order.begin(), order.end(), [](const Arm* x, const Arm* y) {
    if (x->job.has_value() != y->job.has_value()) return !x->job.has_value();
    if (x->job && x->job->task != y->job->task) return x->job->task > y->job->task;
    return x->spec.id > y->spec.id;
  });

  for (Arm* v : order) {
    const auto contested = table_.contested(v->spec.id);
    const std::set<ResourceId> cs(contested.begin(), contested.end());
    nlohmann::json p = {{"cycle", cycle}, {"victim", v->spec.id}, {"contested", contested}};
    if (v->job) p["task"] = v->job->task;

    std::set<railnet::EdgeId> blocked;
    for (const auto& r : cs) {
      if (auto n = graph_->find_node(r)) {
        for (const auto& inc : graph_->incident(*n)) blocked.insert(graph_->edges()[inc.edge].id);
      } else {
        blocked.insert(r);
      }
    }
    try {
      railnet::Path path = railnet::shortest_route(*graph_, v->fsm.node, v->legs.front().to, v->timing.kinematics, blocked);
      const auto rs = resources_for(v->fsm.node, path);
      if (grantable(*v, rs)) {
        p["action"] = "reroute";
        p["to"] = v->legs.front().to;
        emit(EventKind::DeadlockResolved, std::move(p));
        ++deadlocks_resolved_;
        table_.cancel(v->spec.id);
        table_.reserve(v->spec.id, rs);
        start_leg(*v, std::move(path));
        return true;
      }
    } catch (const Error& ex) {
      if (ex.code() != Errc::NoRoute) throw;
    }

    if (auto refuge = find_refuge(*v, cs)) {
      p["action"] = "retreat";
      p["to"] = refuge->node;
      emit(EventKind::DeadlockResolved, std::move(p));
      ++deadlocks_resolved_;
      v->parked = true;
      v->awaiting = cs;
      move_to_refuge(*v, *refuge, LegKind::Retreat, false);
      return true;
    }
  }
  return false;
}

void Simulator::unpark_all() {
  for (auto& a : arms_) {
    if (a.parked && !a.leg && !a.queued) {
      a.parked = false;
      a.awaiting.clear();
      request_next_leg(a);
    }
  }
}

// ---------------------------------------------------------------------------
// Checks

std::vector<std::string> Simulator::check_world() const {
  std::vector<std::string> bad;
  const auto& cat = orch_->catalog();
  for (const auto& a : arms_) {
    const std::string who = "arm " + std::to_string(a.spec.id);
    if (a.fsm.carried) {
      const auto* rec = cat.find(*a.fsm.carried);
      if (!rec) {
        bad.push_back(who + " carries an unknown book");
      } else {
        const auto& s = rec->state;
        const auto* q = std::get_if<st::Queued>(&s);
        const auto* tr = std::get_if<st::InTransit>(&s);
        const bool ok = (q && a.job && q->task == a.job->task) || (tr && tr->arm == a.spec.id) ||
                        (std::holds_alternative<st::ManualHandling>(s) && !a.job);
        if (!ok) bad.push_back(who + " carries " + rec->barcode.str() + " which is " + catalog::describe(s));
      }
    }
    if (const Phase* p = a.fsm.current_phase(); p && p->kind == PhaseKind::Travel) {
      if (table_.holder(p->edge) != a.spec.id) bad.push_back(who + " travels " + p->edge + " without holding it");
    }
    if (!a.leg && railnet::is_terminal(graph_->node(a.fsm.node).kind)) {
      if (table_.holder(parking_segment(a.fsm.node)) != a.spec.id) {
        bad.push_back(who + " parked at " + a.fsm.node + " without its segment");
      }
    }
  }
  for (const auto& [b, rec] : cat.records()) {
    if (const auto* tr = std::get_if<st::InTransit>(&rec.state)) {
      bool held = false;
      for (const auto& a : arms_) held |= a.spec.id == tr->arm && a.fsm.carried == b;
      if (!held) bad.push_back(b.str() + " InTransit on an arm that does not carry it");
    }
  }
  return bad;
}

void Simulator::check_now(const Event& e) {
  if (!options_.check_invariants) return;
  const std::string at = "seq " + std::to_string(e.seq) + " (" + std::string(to_string(e.kind)) + "): ";
  if (!trace_.empty() && trace_.back().time_ms > e.time_ms) violations_.push_back(at + "time went backwards");
  for (auto& v : orch_->check_consistency()) violations_.push_back(at + v);
  for (auto& v : check_world()) violations_.push_back(at + v);
}

}  // namespace lms::sim
