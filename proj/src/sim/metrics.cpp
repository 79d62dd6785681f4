#include "lms/sim/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace lms::sim {

TimeMs nearest_rank(std::vector<TimeMs> values, double fraction) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  auto rank = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(values.size())));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

Metrics compute_metrics(const std::vector<Event>& trace, const std::vector<ArmId>& arms) {
  Metrics m;
  std::map<TaskId, TimeMs> submitted;
  std::map<ArmId, TimeMs> busy;
  for (ArmId a : arms) busy[a] = 0;
  std::vector<TimeMs> latencies;
  std::int64_t distance_mm = 0;
  TimeMs end = 0;

  for (const Event& e : trace) {
    end = std::max(end, e.time_ms);
    const auto& p = e.payload;
    switch (e.kind) {
      case EventKind::TaskSubmitted:
        ++m.tasks_submitted;
        submitted[p.at("task").get<TaskId>()] = e.time_ms;
        break;
      case EventKind::TaskCompleted:
        ++m.tasks_completed;
        latencies.push_back(e.time_ms - submitted.at(p.at("task").get<TaskId>()));
        break;
      case EventKind::TaskFailed: ++m.tasks_failed; break;
      case EventKind::PhaseComplete:
        busy[p.at("arm").get<ArmId>()] += p.at("duration_ms").get<TimeMs>();
        if (p.at("phase").get<std::string>() == "travel") distance_mm += p.at("distance_mm").get<std::int64_t>();
        break;
      case EventKind::DeadlockResolved: ++m.deadlocks_resolved; break;
      default: break;
    }
  }

  if (!latencies.empty()) {
    double sum = 0.0;
    for (TimeMs l : latencies) sum += static_cast<double>(l);
    m.mean_latency_ms = sum / static_cast<double>(latencies.size());
  }
  m.p95_latency_ms = nearest_rank(latencies, 0.95);
  for (const auto& [arm, ms] : busy) {
    m.utilization[arm] = end > 0 ? std::min(1.0, static_cast<double>(ms) / static_cast<double>(end)) : 0.0;
  }
  m.distance_m = static_cast<double>(distance_mm) / 1000.0;
  return m;
}

std::string metrics_csv(const Metrics& m) {
  std::string header = "tasks_completed,tasks_failed,mean_latency_ms,p95_latency_ms";
  std::string row = fmt::format("{},{},{:.3f},{}", m.tasks_completed, m.tasks_failed, m.mean_latency_ms,
                                m.p95_latency_ms);
  for (const auto& [arm, u] : m.utilization) {
    header += fmt::format(",utilization_arm_{}", arm);
    row += fmt::format(",{:.6f}", u);
  }
  header += ",distance_m,deadlocks_resolved\n";
  row += fmt::format(",{:.3f},{}\n", m.distance_m, m.deadlocks_resolved);
  return header + row;
}

}  // namespace lms::sim
