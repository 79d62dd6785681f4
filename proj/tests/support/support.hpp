#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lms/catalog/book.hpp"
#include "lms/railnet/graph.hpp"
#include "lms/shelving/shelf_map.hpp"

namespace lms::test {

// Check digit computed independently of the library: weights 1,3,1,3...
inline int oracle_check_digit(const std::string& prefix12) {
  int sum = 0;
  for (std::size_t i = 0; i < 12; ++i) sum += (prefix12[i] - '0') * (i % 2 == 0 ? 1 : 3);
  return (10 - sum % 10) % 10;
}

inline std::string barcode_string(std::uint64_t n) {
  std::string prefix = std::to_string(n);
  prefix.insert(0, 12 - prefix.size(), '0');
  return prefix + static_cast<char>('0' + oracle_check_digit(prefix));
}

inline catalog::Barcode barcode(std::uint64_t n) {
  return catalog::Barcode::validate(barcode_string(n));
}

inline catalog::BookRecord book(std::uint64_t n, std::string genre, std::string author,
                                std::string title, int width_mm = 20) {
  return {barcode(n), std::move(title), std::move(author), std::move(genre), width_mm, {}};
}

inline int uniform(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

// Seven nodes, six edges: intake - T1 - T2 with rack:1 on T1 and
// rack:2, rack:3, kiosk1 on T2.
inline railnet::RailLayout reference_rail() {
  using railnet::NodeKind;
  railnet::RailLayout l;
  l.nodes = {
      {"intake", NodeKind::Intake, 1, {}},  {"T1", NodeKind::Turntable, 4, {}},
      {"T2", NodeKind::Turntable, 4, {}},   {"rack:1", NodeKind::RackPort, 1, 1},
      {"rack:2", NodeKind::RackPort, 1, 2}, {"rack:3", NodeKind::RackPort, 1, 3},
      {"kiosk1", NodeKind::Kiosk, 1, {}},
  };
  l.edges = {
      {"e1", {"intake", 0}, {"T1", 0}, 2.0}, {"e2", {"T1", 1}, {"rack:1", 0}, 1.5},
      {"e3", {"T1", 2}, {"T2", 0}, 3.0},     {"e4", {"T2", 1}, {"rack:2", 0}, 1.5},
      {"e5", {"T2", 3}, {"rack:3", 0}, 1.5}, {"e6", {"T2", 2}, {"kiosk1", 0}, 2.0},
  };
  return l;
}

inline std::vector<shelving::RackSpec> reference_racks() {
  std::vector<shelving::RackSpec> racks;
  for (int id = 1; id <= 3; ++id) racks.push_back({id, {{50, 20}, {40, 20}, {30, 20}}});
  return racks;
}

}  // namespace lms::test
