#include "lms/layout.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "lms/error.hpp"

namespace lms {

using nlohmann::json;

void SensorNoise::validate() const {
  auto probability = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::ConfigInvalid, std::string(name) + " must be in [0, 1]");
  };
  if (!(grip_nominal_newton > 0.0)) throw Error(Errc::ConfigInvalid, "grip nominal force must be positive");
  if (!(grip_sigma_newton >= 0.0)) throw Error(Errc::ConfigInvalid, "grip sigma must be >= 0");
  probability(grip_slip_probability, "grip slip_probability");
  probability(ir_miss_probability, "ir miss_probability");
  // Beyond 0.5 a jittered gap can exceed the 1.5x tolerance on its own.
  if (!(ir_jitter_fraction >= 0.0 && ir_jitter_fraction < 1.0)) {
    throw Error(Errc::ConfigInvalid, "ir jitter_fraction must be in [0, 1)");
  }
}

railnet::RailGraph Layout::build_graph() const {
  std::vector<int> ids;
  for (const auto& r : racks) ids.push_back(r.id);
  return railnet::RailGraph::build(rail, ids);
}

namespace {

railnet::KinematicParams parse_kinematics(const json& j, railnet::KinematicParams k) {
  if (j.contains("rail_speed_mps")) {
    k.rail_speed_mps = j["rail_speed_mps"].get<double>();
  } else if (j.contains("motor_rpm") || j.contains("wheel_diameter_m")) {
    k.rail_speed_mps = railnet::KinematicParams::rail_speed_for(
        j.value("motor_rpm", railnet::KinematicParams::kDefaultMotorRpm),
        j.value("wheel_diameter_m", railnet::KinematicParams::kDefaultWheelDiameterM));
  }
  k.t_rot_s = j.value("t_rot_s", k.t_rot_s);
  k.hoist_speed_mps = j.value("hoist_speed_mps", k.hoist_speed_mps);
  k.extend_time_s = j.value("extend_time_s", k.extend_time_s);
  k.level_height_m = j.value("level_height_m", k.level_height_m);
  if (k.rail_speed_mps <= 0.0 || k.hoist_speed_mps <= 0.0) {
    throw Error(Errc::NonPositiveSpeed, "rail and hoist speeds must be positive");
  }
  k.validate();
  return k;
}

railnet::PortRef parse_port(const json& j) { return {j.at("node").get<std::string>(), j.at("port").get<int>()}; }

Layout parse(const json& j) {
  Layout l;
  l.document = j;

  for (const auto& r : j.at("racks")) {
    shelving::RackSpec spec;
    spec.id = r.at("id").get<int>();
    for (const auto& lv : r.at("levels")) {
      spec.levels.push_back({lv.at("pitch_mm").get<int>(), lv.at("slot_count").get<int>()});
    }
    l.racks.push_back(std::move(spec));
  }
  l.clearance_mm = j.value("clearance_mm", l.clearance_mm);
  (void)l.build_shelves();  // geometry checks

  const json& rail = j.at("rail");
  for (const auto& n : rail.at("nodes")) {
    railnet::NodeSpec spec;
    spec.id = n.at("id").get<std::string>();
    spec.kind = railnet::parse_node_kind(n.at("kind").get<std::string>());
    spec.ports = n.value("ports", railnet::is_terminal(spec.kind) ? 1 : 4);
    if (n.contains("rack")) spec.rack = n["rack"].get<int>();
    l.rail.nodes.push_back(std::move(spec));
  }
  for (const auto& e : rail.at("edges")) {
    l.rail.edges.push_back({e.at("id").get<std::string>(), parse_port(e.at("a")), parse_port(e.at("b")),
                            e.at("length_m").get<double>()});
  }
  if (rail.contains("params")) l.kinematics = parse_kinematics(rail["params"], l.kinematics);
  const railnet::RailGraph graph = l.build_graph();
  if (!graph.intake()) throw Error(Errc::LayoutInvalid, "rail has no intake node");
  if (graph.kiosks().empty()) throw Error(Errc::LayoutInvalid, "rail has no kiosk node");

  std::set<NodeId> homes;
  for (const auto& a : j.at("arms")) {
    ArmSpec spec;
    spec.id = a.at("id").get<ArmId>();
    spec.home = a.at("home_node").get<std::string>();
    if (a.contains("kinematics")) spec.kinematics = parse_kinematics(a["kinematics"], l.kinematics);
    if (!railnet::is_terminal(graph.node(spec.home).kind)) {
      throw Error(Errc::LayoutInvalid, "arm " + std::to_string(spec.id) + " must be homed on a terminal node");
    }
    if (!homes.insert(spec.home).second) {
      throw Error(Errc::LayoutInvalid, "two arms share home node " + spec.home);
    }
    l.arms.push_back(std::move(spec));
  }
  if (l.arms.empty()) throw Error(Errc::LayoutInvalid, "layout declares no arms");
  std::sort(l.arms.begin(), l.arms.end(), [](const ArmSpec& a, const ArmSpec& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < l.arms.size(); ++i) {
    if (l.arms[i].id == l.arms[i - 1].id) throw Error(Errc::LayoutInvalid, "duplicate arm id");
  }

  if (j.contains("sensors")) {
    const json& s = j["sensors"];
    if (s.contains("grip")) {
      const json& g = s["grip"];
      l.grip.f_min_newton = g.value("f_min_newton", l.grip.f_min_newton);
      l.grip.hold_ms = g.value("hold_ms", l.grip.hold_ms);
      l.grip.timeout_ms = g.value("timeout_ms", l.grip.timeout_ms);
      l.grip.max_retries = g.value("max_retries", l.grip.max_retries);
      l.grip.sample_period_ms = g.value("sample_period_ms", l.grip.sample_period_ms);
      l.noise.grip_nominal_newton = g.value("nominal_newton", l.noise.grip_nominal_newton);
      l.noise.grip_sigma_newton = g.value("noise_sigma_newton", l.noise.grip_sigma_newton);
      l.noise.grip_slip_probability = g.value("slip_probability", l.noise.grip_slip_probability);
    }
    if (s.contains("ir")) {
      const json& ir = s["ir"];
      l.ir.tolerance_factor = ir.value("tolerance_factor", l.ir.tolerance_factor);
      l.noise.ir_jitter_fraction = ir.value("jitter_fraction", l.noise.ir_jitter_fraction);
      l.noise.ir_miss_probability = ir.value("miss_probability", l.noise.ir_miss_probability);
    }
  }
  l.grip.validate();
  l.ir.validate();
  l.noise.validate();

  if (j.contains("power")) l.power.bus_voltage_v = j["power"].value("bus_voltage_v", l.power.bus_voltage_v);
  l.power.validate();

  l.rng = j.value("rng", l.rng);
  if (l.rng != "mt19937_64") throw Error(Errc::ConfigInvalid, "unsupported rng '" + l.rng + "'");
  l.rf_latency_ms = j.value("rf_latency_ms", l.rf_latency_ms);
  if (l.rf_latency_ms < 0) throw Error(Errc::ConfigInvalid, "rf_latency_ms must be >= 0");
  return l;
}

}  // namespace

Layout parse_layout(const json& j) {
  try {
    return parse(j);
  } catch (const json::exception& ex) {
    throw Error(Errc::ParseError, std::string("layout: ") + ex.what());
  }
}

Layout load_layout(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& ex) {
    throw Error(Errc::ParseError, path.string() + ": " + ex.what());
  }
  return parse_layout(j);
}

}  // namespace lms
