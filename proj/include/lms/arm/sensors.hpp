#pragma once

#include <vector>

#include "lms/catalog/book.hpp"

namespace lms::arm {

/// Piezo grip gate: both sensors at or above f_min_newton continuously for
/// hold_ms, within timeout_ms of the attempt start.
struct GripParams {
  double f_min_newton = 1.0;
  TimeMs hold_ms = 200;
  TimeMs timeout_ms = 3000;
  int max_retries = 2;
  TimeMs sample_period_ms = 10;

  void validate() const;  // throws ConfigInvalid
};

/// IR beacon counting. A pulse is on time when it follows the previous one
/// (or the start of alignment) by at most expected * tolerance_factor.
struct IrParams {
  double tolerance_factor = 1.5;

  void validate() const;  // throws ConfigInvalid
};

/// Supply bus sanity band, volts.
struct PowerParams {
  static constexpr double kMinBusVolts = 19.0;
  static constexpr double kMaxBusVolts = 34.0;
  double bus_voltage_v = 24.0;

  void validate() const;  // throws ConfigInvalid outside the band
};

/// Seconds to cover `distance_m` at `speed_mps`. Throws NonPositiveSpeed,
/// ConfigInvalid for a negative distance.
double travel_time(double distance_m, double speed_mps);

/// Seconds rounded half-up to whole milliseconds.
TimeMs to_ms(double seconds);

/// Beacon spacing in time: one slot pitch covered at hoist speed.
TimeMs expected_pulse_interval_ms(int pitch_mm, double hoist_speed_mps);

struct AlignResult {
  bool aligned = false;
  int pulses_counted = 0;
  TimeMs at_ms = 0;  // last counted pulse, or the moment the beacon was declared missed
};

/// Counts |target - current| beacon pulses. `pulse_times_ms` are arrival
/// times relative to the start of alignment, nondecreasing. A gap longer
/// than expected_interval_ms * tolerance_factor (or running out of pulses)
/// is a missed beacon, declared at previous + floor(limit) + 1.
AlignResult ir_align(int current_slot, int target_slot, const std::vector<TimeMs>& pulse_times_ms,
                     TimeMs expected_interval_ms, const IrParams& params);

struct ForceSample {
  TimeMs t_ms = 0;  // relative to the attempt start
  double left_n = 0.0;
  double right_n = 0.0;
};

struct GripAttempt {
  bool gripped = false;
  TimeMs at_ms = 0;  // gate satisfied, or timeout_ms on failure
};

/// One attempt over a time-ordered sample stream.
GripAttempt grip_attempt(const std::vector<ForceSample>& samples, const GripParams& params);

struct GripResult {
  bool gripped = false;
  int attempts = 0;
  TimeMs at_ms = 0;  // from the start of the first attempt
};

/// Runs up to 1 + max_retries attempts, one sample stream each. A failed
/// attempt lasts timeout_ms.
GripResult grip(const std::vector<std::vector<ForceSample>>& attempts, const GripParams& params);

}  // namespace lms::arm
