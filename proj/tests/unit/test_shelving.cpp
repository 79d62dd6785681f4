#include <doctest.h>

#include <random>

#include "lms/catalog/sort_key.hpp"
#include "lms/error.hpp"
#include "lms/shelving/shelf_map.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace lms;
using namespace lms::shelving;
using lms::catalog::SortKey;
using lms::test::barcode;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::IoError;
}

catalog::BookRecord sized(std::uint64_t n, int width) {
  return test::book(n, "g", "a", "t", width);
}

}  // namespace

TEST_CASE("eligible levels follow pitch minus clearance") {
  ShelfMap one({{1, {{40, 5}}}});
  CHECK(one.eligible_levels(25).size() == 1);
  CHECK(one.eligible_levels(30).size() == 1);
  CHECK(one.eligible_levels(35).empty());

  ShelfMap two({{1, {{50, 5}, {30, 5}}}, {2, {{50, 5}, {30, 5}}}});
  const auto levels = two.eligible_levels(25);
  REQUIRE(levels.size() == 2);
  CHECK(levels[0] == LevelRef{1, 0});
  CHECK(levels[1] == LevelRef{2, 0});
  CHECK(two.eligible_levels(20).size() == 4);
}

TEST_CASE("shelf layout validation") {
  CHECK(code_of([] { ShelfMap({{1, {{30, 5}, {40, 5}}}}); }) == Errc::LayoutInvalid);
  CHECK(code_of([] { ShelfMap({{1, {{0, 5}}}}); }) == Errc::LayoutInvalid);
  CHECK(code_of([] { ShelfMap({{1, {{30, 0}}}}); }) == Errc::LayoutInvalid);
  CHECK(code_of([] { ShelfMap({{1, {{30, 5}}}, {1, {{30, 5}}}}); }) == Errc::LayoutInvalid);
  CHECK(code_of([] { ShelfMap({{1, {{30, 5}}}}, 0); }) == Errc::LayoutInvalid);
}

TEST_CASE("ideal insertion point") {
  ShelfMap m({{1, {{50, 5}}}});
  const auto levels = m.eligible_levels(10);
  CHECK(m.ideal_insertion_point(SortKey("c"), levels) == 0);

  m.place({1, 0, 0}, barcode(1), SortKey("b"), 10);
  m.place({1, 0, 1}, barcode(2), SortKey("d"), 10);
  CHECK(m.ideal_insertion_point(SortKey("c"), levels) == 1);

  ShelfMap bbb({{1, {{50, 5}}}});
  for (int s = 0; s < 3; ++s) bbb.place({1, 0, s}, barcode(10 + s), SortKey("b"), 10);
  CHECK(bbb.ideal_insertion_point(SortKey("b"), levels) == 0);
}

TEST_CASE("slot assignment examples") {
  ShelfMap m({{1, {{50, 8}}}});
  CHECK(m.assign_slot(sized(1, 20), SortKey("q")) == ShelfAddress{1, 0, 0});

  ShelfMap narrow({{1, {{40, 4}, {40, 4}}}});
  CHECK(code_of([&] { narrow.assign_slot(sized(2, 35), SortKey("a")); }) == Errc::NoEligibleLevel);

  ShelfMap tiny({{1, {{50, 1}}}});
  tiny.assign_slot(sized(3, 20), SortKey("a"));
  CHECK(code_of([&] { tiny.assign_slot(sized(4, 20), SortKey("b")); }) == Errc::ShelfFull);
}

TEST_CASE("release and occupancy report") {
  ShelfMap m({{1, {{50, 2}, {40, 3}}}});
  CHECK(m.occupancy_report()[0].used == 0);
  CHECK(m.occupancy_report()[1].used == 0);

  const auto before = m.occupancy();
  const auto addr = m.assign_slot(sized(1, 20), SortKey("k"));
  int used = 0;
  for (const auto& row : m.occupancy_report()) used += row.used;
  CHECK(used == 1);
  CHECK(m.release_slot(addr) == barcode(1));
  CHECK(m.occupancy() == before);
  CHECK(code_of([&] { m.release_slot(addr); }) == Errc::EmptySlot);
  CHECK(code_of([&] { m.release_slot({1, 5, 0}); }) == Errc::InvalidAddress);

  m.place({1, 0, 0}, barcode(5), SortKey("a"), 20);
  m.place({1, 0, 1}, barcode(6), SortKey("b"), 20);
  CHECK(m.occupancy_report()[0].fill_ratio == 1.0);

  CHECK(m.quarantine({1, 0, 1}) == barcode(6));
  CHECK_FALSE(m.is_free({1, 0, 1}));
  CHECK(m.occupancy_report()[0].out_of_service == 1);
  m.restore({1, 0, 1});
  CHECK(m.is_free({1, 0, 1}));
}

TEST_CASE("slot assignment equals the brute-force displacement argmin") {
  std::mt19937_64 rng(99);
  const std::vector<std::string> alphabet = {"a", "b", "c", "d", "e", "f"};
  auto random_key = [&] {
    std::string s;
    const int n = test::uniform(rng, 1, 3);
    for (int i = 0; i < n; ++i) s += alphabet[rng() % alphabet.size()];
    return SortKey(s);
  };

  int full_or_none = 0;
  for (int instance = 0; instance < 1000; ++instance) {
    std::vector<RackSpec> racks;
    const int rack_count = test::uniform(rng, 1, 3);
    for (int r = 0; r < rack_count; ++r) {
      RackSpec spec{r + 1, {}};
      int pitch = test::uniform(rng, 30, 60);
      const int levels = test::uniform(rng, 1, 3);
      for (int l = 0; l < levels; ++l) {
        spec.levels.push_back({pitch, test::uniform(rng, 1, 10)});
        pitch = std::max(11, pitch - test::uniform(rng, 0, 15));
      }
      racks.push_back(spec);
    }
    ShelfMap map(racks);

    std::uint64_t next = 1;
    const int fill_percent = test::uniform(rng, 0, 100);
    for (const auto& r : racks) {
      for (int l = 0; l < static_cast<int>(r.levels.size()); ++l) {
        for (int s = 0; s < r.levels[l].slot_count; ++s) {
          if (test::uniform(rng, 1, 100) > fill_percent) continue;
          map.place({r.id, l, s}, barcode(next++), random_key(), 1);
        }
      }
    }

    const int width = test::uniform(rng, 1, 50);
    const SortKey key = random_key();
    const auto eligible = map.eligible_levels(width);

    test::SlotOracle oracle;
    for (const auto& r : racks) {
      for (int l = 0; l < static_cast<int>(r.levels.size()); ++l) {
        if (r.levels[l].pitch_mm < width + map.clearance_mm()) continue;
        for (int s = 0; s < r.levels[l].slot_count; ++s) {
          const ShelfAddress a{r.id, l, s};
          const auto* o = map.occupant(a);
          oracle.slots.push_back(a);
          oracle.keys.push_back(o ? std::optional(o->key) : std::nullopt);
          oracle.free.push_back(o == nullptr);
        }
      }
    }
    CHECK(map.slots_of(eligible) == oracle.slots);

    const auto expected = oracle.choose(key);
    if (oracle.slots.empty()) {
      CHECK(code_of([&] { map.assign_slot(sized(next, width), key); }) == Errc::NoEligibleLevel);
      ++full_or_none;
    } else if (!expected) {
      CHECK(code_of([&] { map.assign_slot(sized(next, width), key); }) == Errc::ShelfFull);
      ++full_or_none;
    } else {
      CHECK(map.ideal_insertion_point(key, eligible) == oracle.boundary(key));
      CHECK(map.assign_slot(sized(next, width), key) == *expected);
    }
  }
  CHECK(full_or_none < 500);
}

TEST_CASE("sorted arrivals on one empty level keep arrival order") {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 50; ++round) {
    ShelfMap m({{1, {{50, 30}}}});
    std::vector<std::string> keys;
    const int n = test::uniform(rng, 1, 30);
    for (int i = 0; i < n; ++i) keys.push_back(std::string(1, static_cast<char>('a' + rng() % 26)));
    std::sort(keys.begin(), keys.end());
    for (int i = 0; i < n; ++i) m.assign_slot(sized(i + 1, 20), SortKey(keys[i]));
    for (int i = 0; i < n; ++i) CHECK(m.find(barcode(i + 1))->slot == i);
  }
}

TEST_CASE("width safety and bijection hold under random operations") {
  std::mt19937_64 rng(17);
  ShelfMap m(test::reference_racks());
  std::vector<Barcode> shelved;
  for (int op = 0; op < 3000; ++op) {
    if (shelved.empty() || test::uniform(rng, 0, 2) > 0) {
      const auto b = barcode(1000 + op);
      try {
        m.assign_slot(sized(1000 + op, test::uniform(rng, 1, 45)), SortKey(std::to_string(rng() % 100)));
        shelved.push_back(b);
      } catch (const Error& e) {
        CHECK((e.code() == Errc::ShelfFull || e.code() == Errc::NoEligibleLevel));
      }
    } else {
      const std::size_t i = rng() % shelved.size();
      m.release_slot(*m.find(shelved[i]));
      shelved.erase(shelved.begin() + static_cast<long>(i));
    }
  }
  std::set<Barcode> seen;
  for (const auto& [addr, occ] : m.occupancy()) {
    CHECK(occ.width_mm + m.clearance_mm() <= m.level_spec(addr.rack, addr.level).pitch_mm);
    CHECK(seen.insert(occ.barcode).second);
    CHECK(m.find(occ.barcode) == addr);
  }
  CHECK(seen.size() == shelved.size());
}
