#pragma once

#include <set>
#include <vector>

#include "lms/railnet/graph.hpp"

namespace lms::railnet {

/// Motion constants shared by routing and the arm. Seconds and metres.
struct KinematicParams {
  static constexpr double kDefaultWheelDiameterM = 0.10;
  static constexpr double kDefaultMotorRpm = 150.0;

  double rail_speed_mps = rail_speed_for(kDefaultMotorRpm, kDefaultWheelDiameterM);
  double t_rot_s = 2.0;  // per 90 degree turntable step
  double hoist_speed_mps = 0.3;
  double extend_time_s = 1.0;
  double level_height_m = 0.4;

  /// Surface speed of a drive wheel: pi * d * rpm / 60.
  static double rail_speed_for(double motor_rpm, double wheel_diameter_m);

  /// Throws ConfigInvalid unless every field is strictly positive.
  void validate() const;
};

/// Number of 90 degree turns needed to leave through `exit_port` after
/// arriving through `entry_port`. Entering through port a points the arm at
/// port a+2, so straight through is 0 and reversing is 2.
int rotation_steps(int entry_port, int exit_port);

struct PathStep {
  EdgeId edge;
  NodeId from;
  int exit_port = 0;   // port of `edge` at `from`
  NodeId to;
  int entry_port = 0;  // port of `edge` at `to`
  double length_m = 0.0;
};

struct Path {
  NodeId origin;
  std::vector<PathStep> steps;
  double total_time_s = 0.0;

  bool empty() const noexcept { return steps.empty(); }
  const NodeId& destination() const { return steps.empty() ? origin : steps.back().to; }
  std::vector<NodeId> nodes() const;
  std::vector<EdgeId> edges() const;
  /// Rotation steps taken at each intermediate node (size steps()-1);
  /// 0 for non-turntable nodes.
  std::vector<int> rotations(const RailGraph& g) const;
};

/// Time-optimal node-simple route. Cost accumulates step by step from the
/// origin: before each step after the first, the turntable rotation
/// (steps * t_rot_s) is added, then length / rail_speed. Terminals other than
/// the origin cannot be passed through. Equal-time routes resolve to the
/// lexicographically smallest edge-id sequence.
/// Throws UnknownNode, NoRoute.
Path shortest_route(const RailGraph& g, const NodeId& from, const NodeId& to,
                    const KinematicParams& params, const std::set<EdgeId>& blocked = {});

/// Recomputes a path's time with the same accumulation order.
double path_time_s(const RailGraph& g, const Path& path, const KinematicParams& params);

}  // namespace lms::railnet
