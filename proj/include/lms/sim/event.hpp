#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "lms/catalog/book.hpp"

namespace lms {

enum class EventKind {
  TaskSubmitted,
  ArmAssigned,
  SegmentReserved,
  SegmentReleased,
  PhaseComplete,
  BeaconPulse,
  GripSample,
  GripOk,
  GripFail,
  BookPlaced,
  BookPicked,
  BookDelivered,
  TaskCompleted,
  TaskFailed,
  DeadlockResolved,
};

std::string_view to_string(EventKind k);
EventKind parse_event_kind(std::string_view s);  // throws ParseError

/// One trace record. (time_ms, seq) is unique and totally ordered; seq is
/// assigned in emission order. Payload values are integers or strings so
/// that serialized traces are byte-stable.
struct Event {
  TimeMs time_ms = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::TaskSubmitted;
  nlohmann::json payload = nlohmann::json::object();

  /// Payload fields plus "kind", "seq", "time_ms", keys sorted.
  nlohmann::json to_json() const;
  static Event from_json(const nlohmann::json& j);
  std::string to_line() const { return to_json().dump(); }
};

}  // namespace lms
