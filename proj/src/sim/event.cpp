#include "lms/sim/event.hpp"

#include <array>

#include "lms/error.hpp"

namespace lms {

namespace {

constexpr std::array<std::string_view, 15> kNames = {
    "TaskSubmitted", "ArmAssigned", "SegmentReserved", "SegmentReleased", "PhaseComplete",
    "BeaconPulse",   "GripSample",  "GripOk",          "GripFail",        "BookPlaced",
    "BookPicked",    "BookDelivered", "TaskCompleted", "TaskFailed",      "DeadlockResolved"};

}  // namespace

std::string_view to_string(EventKind k) { return kNames[static_cast<std::size_t>(k)]; }

EventKind parse_event_kind(std::string_view s) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == s) return static_cast<EventKind>(i);
  }
  throw Error(Errc::ParseError, "unknown event kind '" + std::string(s) + "'");
}

nlohmann::json Event::to_json() const {
  nlohmann::json j = payload;
  j["kind"] = std::string(to_string(kind));
  j["seq"] = seq;
  j["time_ms"] = time_ms;
  return j;
}

Event Event::from_json(const nlohmann::json& j) {
  Event e;
  e.kind = parse_event_kind(j.at("kind").get<std::string>());
  e.seq = j.at("seq").get<std::uint64_t>();
  e.time_ms = j.at("time_ms").get<TimeMs>();
  e.payload = j;
  e.payload.erase("kind");
  e.payload.erase("seq");
  e.payload.erase("time_ms");
  return e;
}

}  // namespace lms
