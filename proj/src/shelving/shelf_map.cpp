#include "lms/shelving/shelf_map.hpp"

#include <algorithm>
#include <limits>

#include "lms/error.hpp"

namespace lms::shelving {

ShelfMap::ShelfMap(std::vector<RackSpec> racks, int clearance_mm)
    : racks_(std::move(racks)), clearance_mm_(clearance_mm) {
  if (clearance_mm_ <= 0) throw Error(Errc::LayoutInvalid, "clearance_mm must be positive");
  std::sort(racks_.begin(), racks_.end(),
            [](const RackSpec& a, const RackSpec& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < racks_.size(); ++i) {
    const auto& r = racks_[i];
    if (i > 0 && racks_[i - 1].id == r.id) {
      throw Error(Errc::LayoutInvalid, "duplicate rack id " + std::to_string(r.id));
    }
    if (r.levels.empty()) {
      throw Error(Errc::LayoutInvalid, "rack " + std::to_string(r.id) + " has no levels");
    }
    for (std::size_t l = 0; l < r.levels.size(); ++l) {
      const auto& lv = r.levels[l];
      const std::string where = "rack " + std::to_string(r.id) + " level " + std::to_string(l);
      if (lv.pitch_mm <= 0) throw Error(Errc::LayoutInvalid, where + ": pitch_mm must be positive");
      if (lv.slot_count <= 0) {
        throw Error(Errc::LayoutInvalid, where + ": slot_count must be positive");
      }
      if (l > 0 && lv.pitch_mm > r.levels[l - 1].pitch_mm) {
        throw Error(Errc::LayoutInvalid, where + ": pitch exceeds the level below");
      }
    }
  }
}

const RackSpec* ShelfMap::rack(int id) const {
  auto it = std::lower_bound(racks_.begin(), racks_.end(), id,
                             [](const RackSpec& r, int v) { return r.id < v; });
  return it != racks_.end() && it->id == id ? &*it : nullptr;
}

bool ShelfMap::is_valid(const ShelfAddress& a) const {
  const RackSpec* r = rack(a.rack);
  if (r == nullptr || a.level < 0 || a.level >= static_cast<int>(r->levels.size())) return false;
  return a.slot >= 0 && a.slot < r->levels[a.level].slot_count;
}

bool ShelfMap::is_free(const ShelfAddress& a) const {
  return is_valid(a) && !occupancy_.contains(a) && !out_of_service_.contains(a);
}

const LevelSpec& ShelfMap::level_spec(int rack_id, int level) const {
  const RackSpec* r = rack(rack_id);
  if (r == nullptr || level < 0 || level >= static_cast<int>(r->levels.size())) {
    throw Error(Errc::InvalidAddress,
                "no level " + std::to_string(level) + " on rack " + std::to_string(rack_id));
  }
  return r->levels[level];
}

const Occupant* ShelfMap::occupant(const ShelfAddress& a) const {
  auto it = occupancy_.find(a);
  return it == occupancy_.end() ? nullptr : &it->second;
}

std::optional<ShelfAddress> ShelfMap::find(const Barcode& barcode) const {
  auto it = where_.find(barcode);
  if (it == where_.end()) return std::nullopt;
  return it->second;
}

std::vector<LevelRef> ShelfMap::eligible_levels(int width_mm) const {
  std::vector<LevelRef> out;
  for (const auto& r : racks_) {
    for (std::size_t l = 0; l < r.levels.size(); ++l) {
      if (r.levels[l].pitch_mm >= width_mm + clearance_mm_) {
        out.push_back({r.id, static_cast<int>(l)});
      }
    }
  }
  return out;
}

std::vector<ShelfAddress> ShelfMap::slots_of(const std::vector<LevelRef>& levels) const {
  std::vector<ShelfAddress> out;
  for (const auto& lv : levels) {
    const int n = level_spec(lv.rack, lv.level).slot_count;
    for (int s = 0; s < n; ++s) out.push_back({lv.rack, lv.level, s});
  }
  return out;
}

std::size_t ShelfMap::ideal_insertion_point(const SortKey& key,
                                            const std::vector<LevelRef>& eligible) const {
  const auto slots = slots_of(eligible);
  // violations(p) = #occupied before p with key > k  +  #occupied at/after p with key < k
  std::size_t after_below = 0;
  for (const auto& a : slots) {
    if (const Occupant* o = occupant(a); o != nullptr && o->key < key) ++after_below;
  }
  std::size_t best = 0;
  std::size_t best_violations = after_below;
  std::size_t before_above = 0;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (const Occupant* o = occupant(slots[i]); o != nullptr) {
      if (o->key < key) --after_below;
      if (o->key > key) ++before_above;
    }
    const std::size_t v = before_above + after_below;
    if (v < best_violations) {
      best_violations = v;
      best = i + 1;
    }
  }
  return best;
}

ShelfAddress ShelfMap::assign_slot(const catalog::BookRecord& record, const SortKey& key) {
  if (where_.contains(record.barcode)) {
    throw Error(Errc::InvalidAddress, record.barcode.str() + " is already on a shelf");
  }
  const auto eligible = eligible_levels(record.width_mm);
  if (eligible.empty()) {
    throw Error(Errc::NoEligibleLevel, "width " + std::to_string(record.width_mm) +
                                           " mm plus clearance exceeds every pitch");
  }
  const auto slots = slots_of(eligible);
  const std::size_t p = ideal_insertion_point(key, eligible);

  // prefix[i] = occupied slots among slots[0..i)
  std::vector<std::size_t> prefix(slots.size() + 1, 0);
  for (std::size_t i = 0; i < slots.size(); ++i) {
    prefix[i + 1] = prefix[i] + (occupancy_.contains(slots[i]) ? 1 : 0);
  }

  std::optional<std::size_t> best;
  std::size_t best_disp = std::numeric_limits<std::size_t>::max();
  bool best_after = false;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!is_free(slots[i])) continue;
    const bool after = i >= p;
    // occupied strictly between slot i and boundary p
    const std::size_t disp = after ? prefix[i] - prefix[p] : prefix[p] - prefix[i + 1];
    const bool better = !best || disp < best_disp || (disp == best_disp && after && !best_after);
    if (better) {
      best = i;
      best_disp = disp;
      best_after = after;
    }
  }
  if (!best) {
    throw Error(Errc::ShelfFull, "no free slot for width " + std::to_string(record.width_mm) + " mm");
  }
  const ShelfAddress addr = slots[*best];
  occupancy_.emplace(addr, Occupant{record.barcode, key, record.width_mm});
  where_.emplace(record.barcode, addr);
  return addr;
}

void ShelfMap::place(const ShelfAddress& addr, const Barcode& barcode, const SortKey& key,
                     int width_mm) {
  if (!is_valid(addr)) throw Error(Errc::InvalidAddress, to_string(addr) + " is out of bounds");
  if (!is_free(addr)) throw Error(Errc::InvalidAddress, to_string(addr) + " is not free");
  if (width_mm + clearance_mm_ > level_spec(addr.rack, addr.level).pitch_mm) {
    throw Error(Errc::InvalidAddress,
                barcode.str() + " is too wide for " + to_string(addr));
  }
  if (where_.contains(barcode)) {
    throw Error(Errc::InvalidAddress, barcode.str() + " is already on a shelf");
  }
  occupancy_.emplace(addr, Occupant{barcode, key, width_mm});
  where_.emplace(barcode, addr);
}

Barcode ShelfMap::release_slot(const ShelfAddress& addr) {
  if (!is_valid(addr)) throw Error(Errc::InvalidAddress, to_string(addr) + " is out of bounds");
  auto it = occupancy_.find(addr);
  if (it == occupancy_.end()) throw Error(Errc::EmptySlot, to_string(addr));
  Barcode b = it->second.barcode;
  where_.erase(b);
  occupancy_.erase(it);
  return b;
}

std::optional<Barcode> ShelfMap::quarantine(const ShelfAddress& addr) {
  if (!is_valid(addr)) throw Error(Errc::InvalidAddress, to_string(addr) + " is out of bounds");
  std::optional<Barcode> dropped;
  if (occupancy_.contains(addr)) dropped = release_slot(addr);
  out_of_service_.insert(addr);
  return dropped;
}

void ShelfMap::restore(const ShelfAddress& addr) { out_of_service_.erase(addr); }

std::vector<LevelOccupancy> ShelfMap::occupancy_report() const {
  std::vector<LevelOccupancy> out;
  for (const auto& r : racks_) {
    for (std::size_t l = 0; l < r.levels.size(); ++l) {
      out.push_back({r.id, static_cast<int>(l), r.levels[l].slot_count, 0, 0, 0.0});
    }
  }
  auto row = [&](const ShelfAddress& a) -> LevelOccupancy& {
    for (auto& o : out) {
      if (o.rack == a.rack && o.level == a.level) return o;
    }
    throw Error(Errc::InvalidAddress, to_string(a));
  };
  for (const auto& [a, occ] : occupancy_) ++row(a).used;
  for (const auto& a : out_of_service_) ++row(a).out_of_service;
  for (auto& o : out) o.fill_ratio = static_cast<double>(o.used) / o.capacity;
  return out;
}

}  // namespace lms::shelving
