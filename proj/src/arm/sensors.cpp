#include "lms/arm/sensors.hpp"

#include <cmath>
#include <cstdlib>
#include <optional>

#include "lms/error.hpp"

namespace lms::arm {

void GripParams::validate() const {
  if (!(f_min_newton > 0.0)) throw Error(Errc::ConfigInvalid, "grip f_min_newton must be positive");
  if (hold_ms <= 0 || timeout_ms <= 0 || sample_period_ms <= 0) {
    throw Error(Errc::ConfigInvalid, "grip durations must be positive");
  }
  if (hold_ms >= timeout_ms) throw Error(Errc::ConfigInvalid, "grip hold_ms must be below timeout_ms");
  if (max_retries < 0) throw Error(Errc::ConfigInvalid, "grip max_retries must not be negative");
}

void IrParams::validate() const {
  if (!(tolerance_factor > 0.0)) {
    throw Error(Errc::ConfigInvalid, "ir tolerance_factor must be positive");
  }
}

void PowerParams::validate() const {
  if (!(bus_voltage_v >= kMinBusVolts && bus_voltage_v <= kMaxBusVolts)) {
    throw Error(Errc::ConfigInvalid, "bus voltage " + std::to_string(bus_voltage_v) +
                                         " V outside the 19-34 V band");
  }
}

double travel_time(double distance_m, double speed_mps) {
  if (!(speed_mps > 0.0)) throw Error(Errc::NonPositiveSpeed, std::to_string(speed_mps));
  if (distance_m < 0.0) throw Error(Errc::ConfigInvalid, "negative distance");
  return distance_m / speed_mps;
}

TimeMs to_ms(double seconds) { return static_cast<TimeMs>(std::floor(seconds * 1000.0 + 0.5)); }

TimeMs expected_pulse_interval_ms(int pitch_mm, double hoist_speed_mps) {
  return to_ms(travel_time(pitch_mm / 1000.0, hoist_speed_mps));
}

AlignResult ir_align(int current_slot, int target_slot, const std::vector<TimeMs>& pulse_times_ms,
                     TimeMs expected_interval_ms, const IrParams& params) {
  const int needed = std::abs(target_slot - current_slot);
  const double limit = static_cast<double>(expected_interval_ms) * params.tolerance_factor;
  const TimeMs timeout_gap = static_cast<TimeMs>(std::floor(limit)) + 1;

  AlignResult r;
  TimeMs previous = 0;
  for (int i = 0; i < needed; ++i) {
    const bool have = static_cast<std::size_t>(i) < pulse_times_ms.size();
    if (!have || static_cast<double>(pulse_times_ms[i] - previous) > limit) {
      r.at_ms = previous + timeout_gap;
      return r;
    }
    previous = pulse_times_ms[i];
    ++r.pulses_counted;
  }
  r.aligned = true;
  r.at_ms = previous;
  return r;
}

GripAttempt grip_attempt(const std::vector<ForceSample>& samples, const GripParams& params) {
  std::optional<TimeMs> run_start;
  for (const auto& s : samples) {
    if (s.t_ms > params.timeout_ms) break;
    const bool firm = s.left_n >= params.f_min_newton && s.right_n >= params.f_min_newton;
    if (!firm) {
      run_start.reset();
      continue;
    }
    if (!run_start) run_start = s.t_ms;
    if (s.t_ms - *run_start >= params.hold_ms) return {true, s.t_ms};
  }
  return {false, params.timeout_ms};
}

GripResult grip(const std::vector<std::vector<ForceSample>>& attempts, const GripParams& params) {
  GripResult r;
  TimeMs offset = 0;
  const int allowed = 1 + params.max_retries;
  for (int k = 0; k < allowed && k < static_cast<int>(attempts.size()); ++k) {
    const auto a = grip_attempt(attempts[k], params);
    ++r.attempts;
    if (a.gripped) {
      r.gripped = true;
      r.at_ms = offset + a.at_ms;
      return r;
    }
    offset += a.at_ms;
  }
  r.at_ms = offset;
  return r;
}

}  // namespace lms::arm
