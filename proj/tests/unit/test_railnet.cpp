#include <doctest.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "lms/error.hpp"
#include "lms/railnet/graph.hpp"
#include "lms/railnet/reservation.hpp"
#include "lms/railnet/routing.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace lms;
using namespace lms::railnet;
using test::Best;
using test::enumerate_simple_paths;
using test::random_layout;

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

}  // namespace

TEST_CASE("graph validation") {
  const auto ref = RailGraph::build(test::reference_rail(), {1, 2, 3});
  CHECK(ref.nodes().size() == 7);
  CHECK(ref.edges().size() == 6);
  CHECK(ref.rack_port(2) == "rack:2");
  CHECK(ref.intake() == "intake");
  CHECK(ref.kiosks() == std::vector<NodeId>{"kiosk1"});

  RailLayout split = test::reference_rail();
  split.edges.erase(split.edges.begin() + 2);  // T1 - T2
  CHECK(code_of([&] { RailGraph::build(split); }) == Errc::Disconnected);

  RailLayout clash = test::reference_rail();
  clash.edges[1].a.port = 0;  // T1 port 0 already hosts e1
  CHECK(code_of([&] { RailGraph::build(clash); }) == Errc::PortConflict);

  RailLayout dangling = test::reference_rail();
  dangling.edges[0].a.node = "nowhere";
  CHECK(code_of([&] { RailGraph::build(dangling); }) == Errc::DanglingEdge);

  CHECK(code_of([&] { RailGraph::build(test::reference_rail(), {1, 2, 3, 4}); }) ==
        Errc::MissingRackPort);
}

TEST_CASE("rotation steps match the closed form table") {
  // exit port relative to the direction faced after entering (entry + 2)
  const int table[4][4] = {{2, 1, 0, 1}, {1, 2, 1, 0}, {0, 1, 2, 1}, {1, 0, 1, 2}};
  for (int entry = 0; entry < 4; ++entry) {
    for (int exit = 0; exit < 4; ++exit) {
      CHECK(rotation_steps(entry, exit) == table[entry][exit]);
      CHECK(rotation_steps(entry, exit) == rotation_steps(exit, entry));
    }
  }
  CHECK(rotation_steps(0, 2) == 0);
  CHECK(rotation_steps(0, 1) == 1);
  CHECK(rotation_steps(0, 0) == 2);
}

TEST_CASE("rail speed and reference route") {
  const KinematicParams k;
  CHECK(k.rail_speed_mps == doctest::Approx(std::numbers::pi * 0.10 * 150.0 / 60.0));
  CHECK(k.rail_speed_mps == doctest::Approx(0.785398).epsilon(1e-6));

  const auto g = RailGraph::build(test::reference_rail(), {1, 2, 3});
  const Path p = shortest_route(g, "intake", "rack:1", k);
  CHECK(p.edges() == std::vector<EdgeId>{"e1", "e2"});
  CHECK(p.rotations(g) == std::vector<int>{1});
  CHECK(p.total_time_s == doctest::Approx(6.456).epsilon(1e-4));
  CHECK(p.total_time_s == 2.0 / k.rail_speed_mps + 2.0 + 1.5 / k.rail_speed_mps);
  CHECK(path_time_s(g, p, k) == p.total_time_s);

  const Path none = shortest_route(g, "T2", "T2", k);
  CHECK(none.empty());
  CHECK(none.total_time_s == 0.0);

  CHECK(code_of([&] { shortest_route(g, "intake", "rack:1", k, {"e2"}); }) == Errc::NoRoute);
  CHECK(code_of([&] { shortest_route(g, "intake", "mars", k); }) == Errc::UnknownNode);
}

TEST_CASE("routing equals exhaustive simple-path enumeration on random layouts") {
  std::mt19937_64 rng(1234);
  KinematicParams k;
  const auto started = std::chrono::steady_clock::now();
  int routed = 0;
  for (int instance = 0; instance < 100; ++instance) {
    const RailLayout layout = random_layout(rng);
    const auto g = RailGraph::build(layout);
    k.t_rot_s = 0.5 * test::uniform(rng, 1, 6);
    for (int q = 0; q < 5; ++q) {
      const auto& from = layout.nodes[rng() % layout.nodes.size()].id;
      const auto& to = layout.nodes[rng() % layout.nodes.size()].id;
      const Best expected = enumerate_simple_paths(layout, from, to, k, {});
      REQUIRE(std::isfinite(expected.time));
      const Path p = shortest_route(g, from, to, k);
      CHECK(p.total_time_s == expected.time);
      CHECK(p.edges() == expected.edges);
      CHECK(path_time_s(g, p, k) == p.total_time_s);
      ++routed;

      // blocking an edge never makes the best route faster
      if (layout.edges.empty()) continue;
      const std::set<EdgeId> blocked{layout.edges[rng() % layout.edges.size()].id};
      const Best constrained = enumerate_simple_paths(layout, from, to, k, blocked);
      if (std::isfinite(constrained.time)) {
        const Path pb = shortest_route(g, from, to, k, blocked);
        CHECK(pb.total_time_s == constrained.time);
        CHECK(pb.total_time_s >= p.total_time_s);
      } else {
        CHECK(code_of([&] { shortest_route(g, from, to, k, blocked); }) == Errc::NoRoute);
      }
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  CHECK(routed == 500);
  CHECK(seconds < 10.0);
}

TEST_CASE("reservation table") {
  ReservationTable t;
  CHECK(t.reserve(1, {"s1"}) == ReserveOutcome::Granted);

  ReservationTable ab;
  const auto empty = ab.holders();
  CHECK(ab.reserve(1, {"s2"}) == ReserveOutcome::Granted);
  CHECK(ab.reserve(2, {"s2", "s3"}) == ReserveOutcome::Queued);
  CHECK(ab.wait_for() == std::map<ArmId, std::set<ArmId>>{{2, {1}}});
  CHECK(ab.waiters("s2") == std::vector<ArmId>{2});
  CHECK_FALSE(ab.holder("s3"));  // all or nothing
  CHECK(ab.release(1, {"s2"}) == std::vector<ArmId>{2});
  CHECK(ab.holder("s2") == 2);
  CHECK(ab.holder("s3") == 2);
  CHECK(ab.release(2, {"s2", "s3"}).empty());
  CHECK(ab.holders() == empty);

  ReservationTable nh;
  nh.reserve(1, {"s1"});
  CHECK(code_of([&] { nh.release(2, {"s1"}); }) == Errc::NotHolder);
  CHECK(code_of([&] { nh.release(1, {"s1", "s9"}); }) == Errc::NotHolder);
  CHECK(nh.holder("s1") == 1);
}

TEST_CASE("a queued request is granted only when all its segments are free") {
  ReservationTable t;
  t.reserve(1, {"a"});
  t.reserve(2, {"b"});
  CHECK(t.reserve(3, {"a", "b"}) == ReserveOutcome::Queued);
  CHECK(t.release(1, {"a"}).empty());
  CHECK_FALSE(t.holder("a"));
  CHECK(t.release(2, {"b"}) == std::vector<ArmId>{3});
  CHECK(t.held_by(3) == std::vector<ResourceId>{"a", "b"});
}

TEST_CASE("queued requests are re-evaluated in arrival order") {
  ReservationTable t;
  t.reserve(1, {"x"});
  t.reserve(2, {"x", "y"});
  t.reserve(3, {"x"});
  CHECK(t.waiters("x") == std::vector<ArmId>{2, 3});
  CHECK(t.release(1, {"x"}) == std::vector<ArmId>{2});
  CHECK(t.waiters("x") == std::vector<ArmId>{3});
  CHECK(t.cancel(3));
  CHECK_FALSE(t.cancel(3));
  CHECK(t.waiters("x").empty());
}

TEST_CASE("deadlock detection") {
  ReservationTable two;
  two.reserve(1, {"a"});
  two.reserve(2, {"b"});
  two.reserve(1, {"a", "b"});
  CHECK_FALSE(two.detect_deadlock());  // A waits B only
  two.reserve(2, {"b", "a"});
  CHECK(two.detect_deadlock() == std::vector<ArmId>{1, 2});
}

TEST_CASE("three arms head-on around a triangle deadlock") {
  // Three turntables joined in a ring; each arm sits on one side and wants
  // to continue clockwise across the next side.
  RailLayout tri;
  tri.nodes = {{"A", NodeKind::Turntable, 4, {}}, {"B", NodeKind::Turntable, 4, {}},
               {"C", NodeKind::Turntable, 4, {}}};
  tri.edges = {{"ab", {"A", 0}, {"B", 2}, 1.0}, {"bc", {"B", 0}, {"C", 2}, 1.0},
               {"ca", {"C", 0}, {"A", 2}, 1.0}};
  const auto g = RailGraph::build(tri);
  const KinematicParams k;

  ReservationTable t;
  CHECK(t.reserve(1, {"ab"}) == ReserveOutcome::Granted);
  CHECK(t.reserve(2, {"bc"}) == ReserveOutcome::Granted);
  CHECK(t.reserve(3, {"ca"}) == ReserveOutcome::Granted);

  auto request = [&](ArmId arm, const ResourceId& held, const NodeId& from, const NodeId& to) {
    const Path p = shortest_route(g, from, to, k, {held});
    std::vector<ResourceId> res{held};
    for (const auto& e : p.edges()) res.push_back(e);
    return t.reserve(arm, res);
  };
  CHECK(request(1, "ab", "B", "C") == ReserveOutcome::Queued);
  CHECK_FALSE(t.detect_deadlock());
  CHECK(request(2, "bc", "C", "A") == ReserveOutcome::Queued);
  CHECK_FALSE(t.detect_deadlock());
  CHECK(request(3, "ca", "A", "B") == ReserveOutcome::Queued);
  CHECK(t.detect_deadlock() == std::vector<ArmId>{1, 2, 3});
}
