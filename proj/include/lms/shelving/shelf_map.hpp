#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "lms/catalog/book.hpp"
#include "lms/catalog/sort_key.hpp"
#include "lms/shelving/address.hpp"

namespace lms::shelving {

using catalog::Barcode;
using catalog::SortKey;

/// One shelf level. pitch_mm is the spacing between successive grabbers.
struct LevelSpec {
  int pitch_mm = 0;
  int slot_count = 0;
};

struct RackSpec {
  int id = 0;
  std::vector<LevelSpec> levels;  // index 0 is the bottom level
};

struct LevelRef {
  int rack = 0;
  int level = 0;
  friend auto operator<=>(const LevelRef&, const LevelRef&) = default;
};

struct Occupant {
  Barcode barcode;
  SortKey key;
  int width_mm = 0;
  friend bool operator==(const Occupant&, const Occupant&) = default;
};

struct LevelOccupancy {
  int rack = 0;
  int level = 0;
  int capacity = 0;
  int used = 0;
  int out_of_service = 0;
  double fill_ratio = 0.0;
};

/// Rack geometry plus occupancy. Racks are scanned in ascending id, then
/// level ascending, then slot ascending; that is the "global order" every
/// index below refers to.
class ShelfMap {
 public:
  static constexpr int kDefaultClearanceMm = 10;

  /// Throws LayoutInvalid on duplicate rack ids, non-positive pitch, slot
  /// count or clearance, or a level wider-pitched than the one below it.
  explicit ShelfMap(std::vector<RackSpec> racks, int clearance_mm = kDefaultClearanceMm);

  /// Levels with pitch_mm >= width_mm + clearance, in global order.
  std::vector<LevelRef> eligible_levels(int width_mm) const;

  /// Every slot of the given levels, in global order.
  std::vector<ShelfAddress> slots_of(const std::vector<LevelRef>& levels) const;

  /// Boundary index p in [0, slots] over the eligible slots such that every
  /// occupied slot before p has key <= `key` and every one at or after p has
  /// key >= `key`; earliest such p. If occupancy is out of order there may be
  /// no such boundary, and the one with the fewest out-of-order occupants wins.
  std::size_t ideal_insertion_point(const SortKey& key, const std::vector<LevelRef>& eligible) const;

  /// Picks and occupies the free eligible slot with the fewest occupied slots
  /// between it and the ideal insertion point. Ties prefer slots at or after
  /// the insertion point, then the lower global index.
  /// Throws NoEligibleLevel or ShelfFull.
  ShelfAddress assign_slot(const catalog::BookRecord& record, const SortKey& key);

  /// Occupies a specific slot (used when loading a catalog whose books are
  /// already on the shelves). Throws InvalidAddress if the slot is unknown,
  /// taken, out of service, too narrow, or the barcode is shelved elsewhere.
  void place(const ShelfAddress& addr, const Barcode& barcode, const SortKey& key, int width_mm);

  /// Throws EmptySlot if nothing is there, InvalidAddress if out of bounds.
  Barcode release_slot(const ShelfAddress& addr);

  /// Takes a slot out of service (e.g. its beacon or book needs a person).
  /// Any occupant is dropped from the map and returned.
  std::optional<Barcode> quarantine(const ShelfAddress& addr);
  void restore(const ShelfAddress& addr);

  std::vector<LevelOccupancy> occupancy_report() const;

  bool is_valid(const ShelfAddress& addr) const;
  bool is_free(const ShelfAddress& addr) const;
  bool is_out_of_service(const ShelfAddress& addr) const { return out_of_service_.contains(addr); }
  const Occupant* occupant(const ShelfAddress& addr) const;
  std::optional<ShelfAddress> find(const Barcode& barcode) const;

  const LevelSpec& level_spec(int rack, int level) const;  // throws InvalidAddress
  const std::vector<RackSpec>& racks() const noexcept { return racks_; }
  int clearance_mm() const noexcept { return clearance_mm_; }
  const std::map<ShelfAddress, Occupant>& occupancy() const noexcept { return occupancy_; }
  const std::set<ShelfAddress>& out_of_service() const noexcept { return out_of_service_; }

 private:
  const RackSpec* rack(int id) const;

  std::vector<RackSpec> racks_;  // sorted by id
  int clearance_mm_;
  std::map<ShelfAddress, Occupant> occupancy_;
  std::map<Barcode, ShelfAddress> where_;
  std::set<ShelfAddress> out_of_service_;
};

}  // namespace lms::shelving
