// Copyright 2026 The qherald Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <cstdint>

#include "qherald/errors.hpp"
#include "qherald/event_engine.hpp"
#include "qherald/phys/detector.hpp"
#include "qherald/phys/fiber.hpp"
#include "qherald/phys/link.hpp"
#include "qherald/phys/qubits.hpp"
#include "qherald/rng.hpp"

namespace qherald::phys {
namespace {

TEST_CASE("fiber propagation and arrival probability", "[phys]") {
  FiberParams f;
  f.length_m = 25000;
  REQUIRE(f.propagation_ns() == 125000);
  REQUIRE(f.arrival_probability() == 1.0);

  f.p_arrive = 0.8;
  REQUIRE(f.arrival_probability() == 0.8);

  FiberParams g;
  g.length_m = 25000;
  g.attenuation_db_per_km = 0.2;  // 5 dB over the run: 10^-0.5
  REQUIRE_THAT(g.arrival_probability(),
               Catch::Matchers::WithinAbs(std::pow(10.0, -0.5), 1e-12));
}

TEST_CASE("bernoulli draws are one engine step and honor edges", "[phys]") {
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    REQUIRE(rng.bernoulli(1.0));
  }
  for (int i = 0; i < 100; ++i) {
    REQUIRE_FALSE(rng.bernoulli(0.0));
  }
  // One trial consumes exactly one engine step: two generators in lockstep
  // stay in lockstep across mixed probabilities.
  Rng x(3), y(3);
  (void)x.bernoulli(0.3);
  (void)y.next_unit();
  REQUIRE(x.next_u64() == y.next_u64());
}

TEST_CASE("qubit slots follow the attempt lifecycle", "[phys]") {
  NodeMemory mem(2);
  REQUIRE(mem.size() == 2);
  mem.begin_attempt(0, 11);
  REQUIRE(mem.slot(0).state == SlotState::kAttempting);
  REQUIRE_THROWS_AS(mem.begin_attempt(0, 12), SlotBusy);

  // A failed verdict frees the slot.
  REQUIRE(mem.resolve(11, kOutcomeFail, 0) == 0);
  REQUIRE(mem.slot(0).state == SlotState::kFree);

  // A successful verdict pins it until released.
  mem.begin_attempt(0, 13);
  REQUIRE(mem.resolve(13, kOutcomeSuccess, 4) == 0);
  REQUIRE(mem.slot(0).state == SlotState::kEntangled);
  REQUIRE(mem.slot(0).pair_seq == 4);
  REQUIRE_THROWS_AS(mem.begin_attempt(0, 14), SlotBusy);
  REQUIRE(mem.entangled().size() == 1);
  mem.release(0);
  REQUIRE(mem.slot(0).state == SlotState::kFree);
  REQUIRE_THROWS_AS(mem.release(0), SimError);

  // Verdicts must match an attempt in flight.
  REQUIRE_THROWS_AS(mem.resolve(99, kOutcomeFail, 0), UnknownCycle);
}

TEST_CASE("two slots track independent attempts", "[phys]") {
  NodeMemory mem(2);
  mem.begin_attempt(0, 1);
  mem.begin_attempt(1, 2);
  REQUIRE(mem.resolve(2, kOutcomeSuccess, 1) == 1);
  REQUIRE(mem.resolve(1, kOutcomeFail, 0) == 0);
  REQUIRE(mem.slot(0).state == SlotState::kFree);
  REQUIRE(mem.slot(1).state == SlotState::kEntangled);
}

TEST_CASE("detector pairs exactly one photon per side", "[phys]") {
  DetectorParams params{1.0, 1000, 0};
  MidpointDetector det(0, params);
  Rng rng(1);

  SECTION("an empty bin fails") {
    auto v = det.close_bin(0, rng);
    REQUIRE_FALSE(v.paired);
    REQUIRE(v.outcome == kOutcomeFail);
    REQUIRE(det.closes() == 1);
  }

  SECTION("a lone photon fails") {
    det.photon_arrived({0, 0, 1, 0, 100});
    auto v = det.close_bin(0, rng);
    REQUIRE_FALSE(v.paired);
    REQUIRE(v.outcome == kOutcomeFail);
  }

  SECTION("two photons from one side fail") {
    det.photon_arrived({0, 0, 1, 0, 100});
    det.photon_arrived({0, 1, 1, 0, 200});
    auto v = det.close_bin(0, rng);
    REQUIRE_FALSE(v.paired);
  }

  SECTION("one per side pairs and succeeds at p=1") {
    det.photon_arrived({0, 3, 7, 2, 100});
    det.photon_arrived({1, 5, 7, 2, 900});
    auto v = det.close_bin(0, rng);
    REQUIRE(v.paired);
    REQUIRE(v.outcome == kOutcomeSuccess);
    REQUIRE(v.a.side == 0);
    REQUIRE(v.a.slot == 3);
    REQUIRE(v.b.side == 1);
    REQUIRE(v.b.slot == 5);
  }

  SECTION("a pair can still fail the swap") {
    DetectorParams never{0.0, 1000, 0};
    MidpointDetector d2(0, never);
    d2.photon_arrived({0, 0, 1, 0, 100});
    d2.photon_arrived({1, 0, 1, 0, 200});
    auto v = d2.close_bin(0, rng);
    REQUIRE(v.paired);
    REQUIRE(v.outcome == kOutcomeFail);
  }
}

TEST_CASE("closing a bin discards it and everything older", "[phys]") {
  DetectorParams params{1.0, 1000, 0};
  MidpointDetector det(0, params);
  Rng rng(1);
  det.photon_arrived({0, 0, 1, 0, 100});    // bin 0
  det.photon_arrived({0, 0, 2, 0, 1100});   // bin 1
  det.photon_arrived({0, 0, 3, 0, 2100});   // bin 2
  det.photon_arrived({1, 0, 3, 0, 2200});   // bin 2
  REQUIRE(det.open_bins() == 3);
  (void)det.close_bin(1, rng);
  REQUIRE(det.open_bins() == 1);
  auto v = det.close_bin(2, rng);
  REQUIRE(v.paired);
  REQUIRE(det.open_bins() == 0);
}

TEST_CASE("the entanglement ledger counts verdicts once per side", "[phys]") {
  EntanglementRegistry reg(true);
  reg.begin_provisional(0, 5, 1, 2, 1000);
  REQUIRE(reg.last_pair_seq() == 1);
  REQUIRE(reg.in_flight() == 1);
  reg.node_reply(0, 5, 0, kOutcomeSuccess);
  REQUIRE(reg.in_flight() == 1);
  reg.node_reply(0, 5, 1, kOutcomeSuccess);
  REQUIRE(reg.in_flight() == 0);
  REQUIRE(reg.accepted() == 1);
  REQUIRE(reg.discarded() == 0);

  reg.begin_provisional(0, 6, 1, 2, 2000);
  REQUIRE(reg.last_pair_seq() == 2);
  reg.node_reply(0, 6, 0, kOutcomeError);
  REQUIRE(reg.accepted() == 1);
  REQUIRE(reg.discarded() == 1);
  REQUIRE(reg.max_in_flight() == 1);
  REQUIRE(reg.retained().size() == 2);
}

TEST_CASE("link physics carries photons end to end", "[phys]") {
  EventEngine engine;
  Rng rng(42);
  FiberParams fa, fb;
  fa.length_m = 1000;
  fb.length_m = 1000;
  DetectorParams det{1.0, 1000, 0};
  LinkPhysics phys(engine, rng, fa, fb, 0, det, 1, 1, true);

  engine.schedule(100, [&] { phys.emit_photon(0, 0, 0, 7); });
  engine.schedule(100, [&] { phys.emit_photon(1, 0, 0, 7); });
  engine.drain();
  REQUIRE(engine.now() == 5100);
  REQUIRE(phys.emitted(0) == 1);
  REQUIRE(phys.arrived(0) == 1);
  REQUIRE(phys.lost(0) == 0);
  REQUIRE(phys.flights().size() == 2);
  REQUIRE(phys.flights()[0].arrival_at == 5100);

  const DetectorMsg msg = phys.close_bin(5);
  REQUIRE(msg.outcome == kOutcomeSuccess);
  REQUIRE(msg.det_id == 0);
  REQUIRE(msg.bin == 5);
  REQUIRE(phys.registry().in_flight() == 1);

  MpReplyMsg reply{kOutcomeSuccess, 0, 1};
  REQUIRE(phys.record_reply(0, reply) == 0);
  REQUIRE(phys.record_reply(1, reply) == 0);
  REQUIRE(phys.registry().accepted() == 1);
  REQUIRE(phys.memory(0).slot(0).state == SlotState::kEntangled);
  REQUIRE(phys.memory(1).slot(0).state == SlotState::kEntangled);
}

TEST_CASE("a dead arm loses every photon", "[phys]") {
  EventEngine engine;
  Rng rng(42);
  FiberParams fa, fb;
  fa.length_m = 1000;
  fa.p_arrive = 0.0;
  fb.length_m = 1000;
  DetectorParams det{1.0, 1000, 0};
  LinkPhysics phys(engine, rng, fa, fb, 0, det, 1, 1);

  engine.schedule(100, [&] { phys.emit_photon(0, 0, 0, 0); });
  engine.schedule(100, [&] { phys.emit_photon(1, 0, 0, 0); });
  engine.drain();
  REQUIRE(phys.lost(0) == 1);
  REQUIRE(phys.arrived(0) == 0);
  REQUIRE(phys.arrived(1) == 1);

  const DetectorMsg msg = phys.close_bin(5);
  REQUIRE(msg.outcome == kOutcomeFail);
  REQUIRE(phys.registry().in_flight() == 0);

  // Both nodes still resolve their attempts on the failure verdict.
  MpReplyMsg reply{kOutcomeFail, 0, 0};
  phys.record_reply(0, reply);
  phys.record_reply(1, reply);
  REQUIRE(phys.memory(0).slot(0).state == SlotState::kFree);
}

}  // namespace
}  // namespace qherald::phys
