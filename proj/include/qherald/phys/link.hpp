// Copyright 2026 The qherald Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QHERALD_PHYS_LINK_HPP_
#define QHERALD_PHYS_LINK_HPP_

#include <array>
#include <cstdint>
#include <vector>

#include "qherald/event_engine.hpp"
#include "qherald/phys/detector.hpp"
#include "qherald/phys/fiber.hpp"
#include "qherald/phys/qubits.hpp"
#include "qherald/rng.hpp"
#include "qherald/wire.hpp"

namespace qherald::phys {

// One emission attempt as physics saw it.
struct PhotonFlight {
  int side = 0;
  std::uint16_t slot = 0;
  std::uint32_t cycle = 0;
  std::uint16_t attempt_params = 0;
  SimTime emitted_at = 0;
  bool lost = false;
  SimTime arrival_at = 0;  // meaningful when not lost
  bool operator==(const PhotonFlight&) const = default;
};

// Physical truth for one heralded link: two nodes' qubit memories, two fiber
// arms, the midpoint detector, and the pair ledger. All randomness (photon
// survival, swap outcome) is drawn from the single run stream, strictly in
// event order.
class LinkPhysics {
 public:
  LinkPhysics(EventEngine& engine, Rng& rng, FiberParams fiber_a,
              FiberParams fiber_b, std::uint16_t det_id,
              DetectorParams det_params, std::uint16_t slots_a,
              std::uint16_t slots_b, bool retain_history = false)
      : engine_(engine),
        rng_(rng),
        fibers_{fiber_a, fiber_b},
        detector_(det_id, det_params),
        memories_{NodeMemory(slots_a), NodeMemory(slots_b)},
        registry_(retain_history),
        retain_(retain_history) {}

  NodeMemory& memory(int side) {
    return memories_[static_cast<std::size_t>(side)];
  }
  const FiberParams& fiber(int side) const {
    return fibers_[static_cast<std::size_t>(side)];
  }
  MidpointDetector& detector() { return detector_; }
  EntanglementRegistry& registry() { return registry_; }

  // Launches one photon now. The slot moves Free -> Attempting (SlotBusy
  // otherwise). Survival is drawn immediately; a surviving photon's arrival
  // at the detector is scheduled after the arm's propagation delay, a lost
  // one simply never arrives.
  void emit_photon(int side, std::uint16_t slot, std::uint32_t cycle,
                   std::uint16_t attempt_params) {
    memory(side).begin_attempt(slot, cycle);
    ++emitted_[static_cast<std::size_t>(side)];
    PhotonFlight flight;
    flight.side = side;
    flight.slot = slot;
    flight.cycle = cycle;
    flight.attempt_params = attempt_params;
    flight.emitted_at = engine_.now();
    flight.lost = !rng_.bernoulli(fiber(side).arrival_probability());
    if (flight.lost) {
      ++lost_[static_cast<std::size_t>(side)];
      note_flight(flight);
      return;
    }
    flight.arrival_at = engine_.now() + fiber(side).propagation_ns();
    note_flight(flight);
    engine_.schedule(flight.arrival_at, [this, flight] {
      ++arrived_[static_cast<std::size_t>(flight.side)];
      MidpointDetector::PhotonArrival arrival;
      arrival.side = flight.side;
      arrival.slot = flight.slot;
      arrival.cycle = flight.cycle;
      arrival.attempt_params = flight.attempt_params;
      arrival.at = flight.arrival_at;
      detector_.photon_arrived(arrival);
    });
  }

  // Closes a detection bin and returns the report to inject. A heralded
  // success opens a provisional ledger record binding the two slots.
  DetectorMsg close_bin(std::uint64_t bin) {
    const auto verdict = detector_.close_bin(bin, rng_);
    if (verdict.outcome == kOutcomeSuccess) {
      registry_.begin_provisional(detector_.det_id(), verdict.a.cycle,
                                  verdict.a.slot, verdict.b.slot,
                                  engine_.now());
    }
    DetectorMsg msg;
    msg.outcome = verdict.outcome;
    msg.det_id = detector_.det_id();
    msg.bin = static_cast<std::uint32_t>(bin);
    return msg;
  }

  // A node processed a verdict: update its memory and the ledger. Returns
  // the slot the verdict applied to. Throws UnknownCycle if the node has no
  // attempt in flight for the reply's cycle.
  std::uint16_t record_reply(int side, const MpReplyMsg& reply) {
    const std::uint16_t slot =
        memory(side).resolve(reply.cycle, reply.outcome, reply.pair_seq);
    registry_.node_reply(detector_.det_id(), reply.cycle, side,
                         reply.outcome);
    return slot;
  }

  std::uint64_t emitted(int side) const {
    return emitted_[static_cast<std::size_t>(side)];
  }
  std::uint64_t lost(int side) const {
    return lost_[static_cast<std::size_t>(side)];
  }
  std::uint64_t arrived(int side) const {
    return arrived_[static_cast<std::size_t>(side)];
  }
  const std::vector<PhotonFlight>& flights() const { return flights_; }

 private:
  void note_flight(const PhotonFlight& flight) {
    if (retain_) {
      flights_.push_back(flight);
    }
  }

  EventEngine& engine_;
  Rng& rng_;
  std::array<FiberParams, 2> fibers_;
  MidpointDetector detector_;
  std::array<NodeMemory, 2> memories_;
  EntanglementRegistry registry_;
  bool retain_;
  std::array<std::uint64_t, 2> emitted_{0, 0};
  std::array<std::uint64_t, 2> lost_{0, 0};
  std::array<std::uint64_t, 2> arrived_{0, 0};
  std::vector<PhotonFlight> flights_;
};

}  // namespace qherald::phys

#endif  // QHERALD_PHYS_LINK_HPP_
