#include "lms/arm/state_machine.hpp"

#include <string>

#include "lms/error.hpp"

namespace lms::arm {

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::Standby: return "Standby";
    case Mode::Waiting: return "Waiting";
    case Mode::Moving: return "Moving";
    case Mode::Hoisting: return "Hoisting";
    case Mode::Aligning: return "Aligning";
    case Mode::Extending: return "Extending";
    case Mode::Gripping: return "Gripping";
    case Mode::Releasing: return "Releasing";
    case Mode::Retracting: return "Retracting";
  }
  return "?";
}

Mode mode_for(PhaseKind k) {
  switch (k) {
    case PhaseKind::Travel:
    case PhaseKind::Rotate: return Mode::Moving;
    case PhaseKind::Hoist:
    case PhaseKind::Unhoist: return Mode::Hoisting;
    case PhaseKind::Align:
    case PhaseKind::Unalign: return Mode::Aligning;
    case PhaseKind::Extend: return Mode::Extending;
    case PhaseKind::Grip: return Mode::Gripping;
    case PhaseKind::Release: return Mode::Releasing;
    case PhaseKind::Retract: return Mode::Retracting;
  }
  return Mode::Standby;
}

const Phase* ArmState::current_phase() const {
  if (mode == Mode::Standby || mode == Mode::Waiting) return nullptr;
  return &program.phases[phase];
}

std::string_view event_name(const ArmEvent& e) {
  static constexpr std::string_view names[] = {"AssignTask",   "Depart",     "PhaseComplete",
                                                "BeaconPulse",  "MissedBeacon", "GripSample",
                                                "GripOk",       "GripFail",   "ReleaseOk"};
  return names[e.index()];
}

namespace {

[[noreturn]] void illegal(const ArmState& s, const ArmEvent& e) {
  std::string what(event_name(e));
  what += " in ";
  what += to_string(s.mode);
  if (const Phase* p = s.current_phase()) {
    what += "/";
    what += to_string(p->kind);
  }
  throw Error(Errc::IllegalTransition, what);
}

void halt(ArmState& s) {
  s.mode = Mode::Waiting;
  s.program = {};
  s.phase = 0;
  s.pulses_seen = 0;
}

void enter(ArmState& s) {
  s.pulses_seen = 0;
  if (s.phase >= s.program.phases.size()) {
    s.mode = s.ends_in_standby ? Mode::Standby : Mode::Waiting;
    s.program = {};
    s.phase = 0;
    return;
  }
  s.mode = mode_for(s.program.phases[s.phase].kind);
}

// Effects of finishing the current phase, then move to the next.
void advance(ArmState& s) {
  const Phase& p = s.program.phases[s.phase];
  switch (p.kind) {
    case PhaseKind::Travel: s.node = p.node; break;
    case PhaseKind::Hoist:
    case PhaseKind::Unhoist: s.level = p.level; break;
    case PhaseKind::Align:
    case PhaseKind::Unalign: s.slot = p.slot; break;
    default: break;
  }
  ++s.phase;
  enter(s);
}

// Grips and releases must alternate starting from what is carried now.
bool carries_consistently(const MotionProgram& program, bool carrying) {
  for (const auto& p : program.phases) {
    if (p.kind == PhaseKind::Grip) {
      if (carrying) return false;
      carrying = true;
    } else if (p.kind == PhaseKind::Release) {
      if (!carrying) return false;
      carrying = false;
    }
  }
  return true;
}

void start(ArmState& s, MotionProgram program, bool ends_in_standby) {
  s.program = std::move(program);
  s.phase = 0;
  s.ends_in_standby = ends_in_standby;
  enter(s);
}

bool timed(const Phase& p) {
  switch (p.kind) {
    case PhaseKind::Grip:
    case PhaseKind::Release: return false;
    case PhaseKind::Align: return p.pulses == 0;
    default: return true;
  }
}

}  // namespace

ArmState step(ArmState s, const ArmEvent& e) {
  const Phase* p = s.current_phase();
  std::visit(
      [&](const auto& ev) {
        using E = std::decay_t<decltype(ev)>;
        if constexpr (std::is_same_v<E, event::AssignTask>) {
          if (s.mode != Mode::Standby || !carries_consistently(ev.program, s.carried.has_value())) {
            illegal(s, e);
          }
          start(s, ev.program, ev.ends_in_standby);
        } else if constexpr (std::is_same_v<E, event::Depart>) {
          if ((s.mode != Mode::Standby && s.mode != Mode::Waiting) ||
              !carries_consistently(ev.program, s.carried.has_value())) {
            illegal(s, e);
          }
          start(s, ev.program, ev.ends_in_standby);
        } else if constexpr (std::is_same_v<E, event::PhaseComplete>) {
          if (!p || !timed(*p)) illegal(s, e);
          advance(s);
        } else if constexpr (std::is_same_v<E, event::BeaconPulse>) {
          if (!p || p->kind != PhaseKind::Align || s.pulses_seen >= p->pulses) illegal(s, e);
          if (++s.pulses_seen == p->pulses) advance(s);
        } else if constexpr (std::is_same_v<E, event::MissedBeacon>) {
          if (!p || p->kind != PhaseKind::Align || p->pulses == 0) illegal(s, e);
          halt(s);
        } else if constexpr (std::is_same_v<E, event::GripSample>) {
          if (!p || p->kind != PhaseKind::Grip) illegal(s, e);
        } else if constexpr (std::is_same_v<E, event::GripOk>) {
          if (!p || p->kind != PhaseKind::Grip || s.carried) illegal(s, e);
          s.carried = ev.barcode;
          advance(s);
        } else if constexpr (std::is_same_v<E, event::GripFail>) {
          if (!p || p->kind != PhaseKind::Grip) illegal(s, e);
          if (ev.final) halt(s);
        } else if constexpr (std::is_same_v<E, event::ReleaseOk>) {
          if (!p || p->kind != PhaseKind::Release || !s.carried) illegal(s, e);
          s.carried.reset();
          advance(s);
        }
      },
      e);
  return s;
}

}  // namespace lms::arm
