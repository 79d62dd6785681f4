#include "lms/arm/motion.hpp"

#include <algorithm>
#include <numeric>

#include "lms/error.hpp"

namespace lms::arm {

std::string_view to_string(PhaseKind k) {
  switch (k) {
    case PhaseKind::Travel: return "travel";
    case PhaseKind::Rotate: return "rotate";
    case PhaseKind::Hoist: return "hoist";
    case PhaseKind::Align: return "align";
    case PhaseKind::Extend: return "extend";
    case PhaseKind::Grip: return "grip";
    case PhaseKind::Release: return "release";
    case PhaseKind::Retract: return "retract";
    case PhaseKind::Unalign: return "unalign";
    case PhaseKind::Unhoist: return "unhoist";
  }
  return "?";
}

TimeMs MotionProgram::total_ms() const {
  return std::accumulate(phases.begin(), phases.end(), TimeMs{0},
                         [](TimeMs acc, const Phase& p) { return acc + p.duration_ms; });
}

void MotionProgram::append(const MotionProgram& other) {
  phases.insert(phases.end(), other.phases.begin(), other.phases.end());
}

MotionProgram plan_travel(const railnet::RailGraph& g, const railnet::Path& path,
                          const KinematicParams& k) {
  MotionProgram prog;
  for (std::size_t i = 0; i < path.steps.size(); ++i) {
    const auto& step = path.steps[i];
    if (i > 0 && g.node(step.from).kind == railnet::NodeKind::Turntable) {
      const int steps = railnet::rotation_steps(path.steps[i - 1].entry_port, step.exit_port);
      if (steps > 0) {
        Phase rot;
        rot.kind = PhaseKind::Rotate;
        rot.node = step.from;
        rot.steps = steps;
        rot.duration_ms = to_ms(steps * k.t_rot_s);
        prog.phases.push_back(rot);
      }
    }
    Phase tr;
    tr.kind = PhaseKind::Travel;
    tr.edge = step.edge;
    tr.node = step.to;
    tr.distance_m = step.length_m;
    tr.duration_ms = to_ms(travel_time(step.length_m, k.rail_speed_mps));
    prog.phases.push_back(tr);
  }
  return prog;
}

railnet::Path reversed(const railnet::Path& path) {
  railnet::Path out;
  out.origin = path.destination();
  out.total_time_s = path.total_time_s;  // rotation counts are symmetric
  for (auto it = path.steps.rbegin(); it != path.steps.rend(); ++it) {
    out.steps.push_back({it->edge, it->to, it->entry_port, it->from, it->exit_port, it->length_m});
  }
  return out;
}

namespace {

Phase fixed(PhaseKind kind, TimeMs ms) {
  Phase p;
  p.kind = kind;
  p.duration_ms = ms;
  return p;
}

}  // namespace

MotionProgram plan_station_work(ShelfAction action, const ArmTiming& timing) {
  const TimeMs extend = to_ms(timing.kinematics.extend_time_s);
  MotionProgram prog;
  prog.phases.push_back(fixed(PhaseKind::Extend, extend));
  prog.phases.push_back(fixed(action == ShelfAction::Pick ? PhaseKind::Grip : PhaseKind::Release,
                              timing.grip.hold_ms));
  prog.phases.push_back(fixed(PhaseKind::Retract, extend));
  return prog;
}

MotionProgram plan_shelf_work(const shelving::ShelfMap& shelves, ShelfAction action,
                              const ShelfAddress& addr, const ArmTiming& timing) {
  if (!shelves.is_valid(addr)) throw Error(Errc::InvalidAddress, to_string(addr));
  const auto& k = timing.kinematics;
  const int pitch = shelves.level_spec(addr.rack, addr.level).pitch_mm;
  const TimeMs interval = expected_pulse_interval_ms(pitch, k.hoist_speed_mps);
  const double height = addr.level * k.level_height_m;

  MotionProgram prog;
  Phase hoist = fixed(PhaseKind::Hoist, to_ms(travel_time(height, k.hoist_speed_mps)));
  hoist.level = addr.level;
  hoist.distance_m = height;
  prog.phases.push_back(hoist);

  // The arm reaches every level facing slot 0.
  Phase align = fixed(PhaseKind::Align, addr.slot * interval);
  align.slot = addr.slot;
  align.pulses = addr.slot;
  align.pulse_interval_ms = interval;
  prog.phases.push_back(align);

  prog.append(plan_station_work(action, timing));

  Phase unalign = align;
  unalign.kind = PhaseKind::Unalign;
  unalign.slot = 0;
  prog.phases.push_back(unalign);

  Phase unhoist = hoist;
  unhoist.kind = PhaseKind::Unhoist;
  unhoist.level = 0;
  prog.phases.push_back(unhoist);
  return prog;
}

MotionProgram plan_motion(const railnet::RailGraph& g, const shelving::ShelfMap& shelves,
                          ShelfAction action, const railnet::Path& path, const ShelfAddress& addr,
                          const ArmTiming& timing) {
  if (!shelves.is_valid(addr)) throw Error(Errc::InvalidAddress, to_string(addr));
  if (path.destination() != g.rack_port(addr.rack)) {
    throw Error(Errc::InvalidAddress,
                "path ends at " + path.destination() + ", not the port of rack " + std::to_string(addr.rack));
  }
  MotionProgram prog = plan_travel(g, path, timing.kinematics);
  prog.append(plan_shelf_work(shelves, action, addr, timing));
  prog.append(plan_travel(g, reversed(path), timing.kinematics));
  return prog;
}

}  // namespace lms::arm
