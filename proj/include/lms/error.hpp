#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lms {

// Every domain failure the core can raise. Normal outcomes (a queued
// reservation, a missed beacon, a failed grip attempt) are values, not errors.
enum class Errc {
  // catalog
  BadLength,
  NonDigit,
  ChecksumMismatch,
  DuplicateBarcode,
  SeqGap,
  UnknownBook,
  // shelving
  NoEligibleLevel,
  ShelfFull,
  EmptySlot,
  InvalidAddress,
  LayoutInvalid,
  // railnet
  Disconnected,
  PortConflict,
  DanglingEdge,
  MissingRackPort,
  NoRoute,
  NotHolder,
  UnknownNode,
  // arm
  IllegalTransition,
  NonPositiveSpeed,
  ConfigInvalid,
  // orchestrator
  BookNotShelved,
  UnknownKiosk,
  InvalidBarcode,
  UnknownTask,
  StateMachineViolation,
  // sim
  ScenarioInvalid,
  SimTimeBudgetExceeded,
  // cli
  UnknownFlag,
  MissingArgument,
  ConflictingFlags,
  // io
  ParseError,
  IoError,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace lms
