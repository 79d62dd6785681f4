#pragma once

#include <optional>
#include <string_view>
#include <variant>

#include "lms/arm/motion.hpp"

namespace lms::arm {

/// Waiting: parked mid-task at a node, between legs or after an abort,
/// holding its program slot until told to depart.
enum class Mode { Standby, Waiting, Moving, Hoisting, Aligning, Extending, Gripping, Releasing, Retracting };

std::string_view to_string(Mode m);

/// Mode the arm is in while executing a phase of the given kind.
Mode mode_for(PhaseKind k);

struct ArmState {
  NodeId node;
  Mode mode = Mode::Standby;
  std::optional<catalog::Barcode> carried;
  MotionProgram program;
  std::size_t phase = 0;        // index into program while running
  bool ends_in_standby = true;  // otherwise the program ends in Waiting
  int level = 0;
  int slot = 0;
  int pulses_seen = 0;

  const Phase* current_phase() const;
  bool idle() const { return mode == Mode::Standby; }
  friend bool operator==(const ArmState&, const ArmState&) = default;
};

namespace event {
struct AssignTask {
  MotionProgram program;
  bool ends_in_standby = false;
};
struct Depart {
  MotionProgram program;
  bool ends_in_standby = false;
};
struct PhaseComplete {};
struct BeaconPulse {};
struct MissedBeacon {};
struct GripSample {};
struct GripOk {
  catalog::Barcode barcode;
};
struct GripFail {
  bool final = false;
};
struct ReleaseOk {};
}  // namespace event

using ArmEvent = std::variant<event::AssignTask, event::Depart, event::PhaseComplete, event::BeaconPulse,
                              event::MissedBeacon, event::GripSample, event::GripOk, event::GripFail,
                              event::ReleaseOk>;

std::string_view event_name(const ArmEvent& e);

/// Deterministic transition. Timed phases end on PhaseComplete, alignment
/// with pulses on the last BeaconPulse, grips on GripOk, releases on
/// ReleaseOk. MissedBeacon and a final GripFail halt the arm in Waiting with
/// its program dropped. A program is accepted only if its grips and
/// releases alternate starting from what the arm carries.
/// Throws IllegalTransition for any other pair.
ArmState step(ArmState s, const ArmEvent& e);

}  // namespace lms::arm
