#pragma once

#include <string_view>
#include <vector>

#include "lms/arm/sensors.hpp"
#include "lms/railnet/routing.hpp"
#include "lms/shelving/shelf_map.hpp"

namespace lms::arm {

using railnet::KinematicParams;

enum class PhaseKind { Travel, Rotate, Hoist, Align, Extend, Grip, Release, Retract, Unalign, Unhoist };

std::string_view to_string(PhaseKind k);

/// One timed step of a motion program. duration_ms is the nominal time;
/// Grip and Align are sensor-gated in simulation and may take longer.
struct Phase {
  PhaseKind kind = PhaseKind::Travel;
  TimeMs duration_ms = 0;
  railnet::EdgeId edge;     // Travel
  NodeId node;              // Travel: arrival node; Rotate: the turntable
  int steps = 0;            // Rotate: 90 degree steps
  int level = 0;            // Hoist/Unhoist
  int slot = 0;             // Align/Unalign: slot at the end of the phase
  int pulses = 0;           // Align/Unalign
  TimeMs pulse_interval_ms = 0;
  double distance_m = 0.0;  // Travel, Hoist, Unhoist

  friend bool operator==(const Phase&, const Phase&) = default;
};

struct MotionProgram {
  std::vector<Phase> phases;

  TimeMs total_ms() const;
  void append(const MotionProgram& other);
  friend bool operator==(const MotionProgram&, const MotionProgram&) = default;
};

struct ArmTiming {
  KinematicParams kinematics;
  GripParams grip;
  IrParams ir;
};

enum class ShelfAction { Place, Pick };

/// Travel and rotate phases along `path`; a rotate phase only where steps > 0.
MotionProgram plan_travel(const railnet::RailGraph& g, const railnet::Path& path,
                          const KinematicParams& k);

/// The same path walked backwards.
railnet::Path reversed(const railnet::Path& path);

/// hoist, align, extend, grip or release, retract, then unalign and unhoist
/// back to the rail. Throws InvalidAddress.
MotionProgram plan_shelf_work(const shelving::ShelfMap& shelves, ShelfAction action,
                              const ShelfAddress& addr, const ArmTiming& timing);

/// extend, grip or release, retract at a station (intake or kiosk).
MotionProgram plan_station_work(ShelfAction action, const ArmTiming& timing);

/// Full out-and-back program for a shelf task: travel along `path` to the
/// rack port of addr.rack, shelf work, then the reverse leg.
/// Throws InvalidAddress if the address is unknown or `path` does not end at
/// its rack port.
MotionProgram plan_motion(const railnet::RailGraph& g, const shelving::ShelfMap& shelves,
                          ShelfAction action, const railnet::Path& path, const ShelfAddress& addr,
                          const ArmTiming& timing);

}  // namespace lms::arm
