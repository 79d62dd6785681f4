#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "lms/catalog/barcode.hpp"
#include "lms/shelving/address.hpp"

namespace lms {

using TaskId = std::uint64_t;
using ArmId = int;
using NodeId = std::string;
using KioskId = std::string;  // node id of a kiosk station
using TimeMs = std::int64_t;

}  // namespace lms

namespace lms::catalog {

namespace state {
struct AtIntake {
  friend bool operator==(const AtIntake&, const AtIntake&) = default;
};
struct Queued {
  TaskId task = 0;
  friend bool operator==(const Queued&, const Queued&) = default;
};
struct InTransit {
  ArmId arm = 0;
  friend bool operator==(const InTransit&, const InTransit&) = default;
};
struct Shelved {
  ShelfAddress address;
  friend bool operator==(const Shelved&, const Shelved&) = default;
};
struct AtKiosk {
  KioskId kiosk;
  friend bool operator==(const AtKiosk&, const AtKiosk&) = default;
};
struct ManualHandling {
  friend bool operator==(const ManualHandling&, const ManualHandling&) = default;
};
}  // namespace state

using BookState = std::variant<state::AtIntake, state::Queued, state::InTransit,
                               state::Shelved, state::AtKiosk, state::ManualHandling>;

std::string state_name(const BookState& s);
std::string describe(const BookState& s);

struct BookRecord {
  Barcode barcode;
  std::string title;
  std::string author;
  std::string genre;
  int width_mm = 1;
  BookState state = state::AtIntake{};

  friend bool operator==(const BookRecord&, const BookRecord&) = default;
};

}  // namespace lms::catalog
