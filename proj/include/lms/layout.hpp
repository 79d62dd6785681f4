#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lms/arm/motion.hpp"
#include "lms/railnet/graph.hpp"
#include "lms/shelving/shelf_map.hpp"

namespace lms {

struct ArmSpec {
  ArmId id = 0;
  NodeId home;
  std::optional<railnet::KinematicParams> kinematics;  // overrides the rail params
};

/// Simulated sensor imperfection. All zero means a noise-free run whose
/// trace does not depend on the seed.
struct SensorNoise {
  double grip_nominal_newton = 2.0;
  double grip_sigma_newton = 0.0;
  double grip_slip_probability = 0.0;  // per attempt: one jaw reads nothing
  double ir_jitter_fraction = 0.0;     // pulse gap = interval * (1 + U(-j, j))
  double ir_miss_probability = 0.0;    // per pulse
  void validate() const;               // throws ConfigInvalid
};

/// Everything a library installation is made of, as loaded from one JSON file.
struct Layout {
  std::vector<shelving::RackSpec> racks;
  int clearance_mm = shelving::ShelfMap::kDefaultClearanceMm;
  railnet::RailLayout rail;
  railnet::KinematicParams kinematics;
  std::vector<ArmSpec> arms;  // sorted by id
  arm::GripParams grip;
  arm::IrParams ir;
  SensorNoise noise;
  arm::PowerParams power;
  std::string rng = "mt19937_64";
  TimeMs rf_latency_ms = 10;
  nlohmann::json document;  // the source, served to clients as is

  arm::ArmTiming timing_for(const ArmSpec& a) const {
    return {a.kinematics.value_or(kinematics), grip, ir};
  }
  shelving::ShelfMap build_shelves() const { return shelving::ShelfMap(racks, clearance_mm); }
  railnet::RailGraph build_graph() const;
};

/// Validates as it parses: shelf geometry, rail topology (every rack has a
/// port), arm homes on distinct terminal nodes, sensor and power parameters.
/// Throws ParseError for malformed JSON, LayoutInvalid/ConfigInvalid or the
/// rail errors for bad content.
Layout parse_layout(const nlohmann::json& j);
Layout load_layout(const std::filesystem::path& path);

}  // namespace lms
