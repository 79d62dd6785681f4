#pragma once

#include <compare>
#include <string>

namespace lms {

/// A grabber position on a shelf. Racks are numbered as in the layout file,
/// levels from 0 at the bottom, slots from 0 at the rack-port end.
struct ShelfAddress {
  int rack = 0;
  int level = 0;
  int slot = 0;

  friend auto operator<=>(const ShelfAddress&, const ShelfAddress&) = default;
};

inline std::string to_string(const ShelfAddress& a) {
  return "R" + std::to_string(a.rack) + "/L" + std::to_string(a.level) + "/S" +
         std::to_string(a.slot);
}

}  // namespace lms
