#pragma once

#include <map>
#include <string>
#include <vector>

#include "lms/sim/event.hpp"

namespace lms::sim {

struct Metrics {
  int tasks_submitted = 0;
  int tasks_completed = 0;
  int tasks_failed = 0;
  double mean_latency_ms = 0.0;  // over completed tasks, submission to TaskCompleted
  TimeMs p95_latency_ms = 0;     // nearest rank: ceil(0.95 n)-th smallest
  std::map<ArmId, double> utilization;  // busy phase time / end of trace
  double distance_m = 0.0;              // rail travel, all arms
  int deadlocks_resolved = 0;
};

/// Pure function of the trace. `arms` lists every arm so that idle ones get a
/// column too.
Metrics compute_metrics(const std::vector<Event>& trace, const std::vector<ArmId>& arms);

/// Nearest-rank percentile of an unsorted sample; 0 when empty.
TimeMs nearest_rank(std::vector<TimeMs> values, double fraction);

/// Header line plus one data line, fixed decimals, newline-terminated.
std::string metrics_csv(const Metrics& m);

}  // namespace lms::sim
