// Copyright 2026 The qherald Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QHERALD_PHYS_QUBITS_HPP_
#define QHERALD_PHYS_QUBITS_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qherald/errors.hpp"
#include "qherald/event_engine.hpp"
#include "qherald/wire.hpp"

namespace qherald::phys {

enum class SlotState { kFree, kAttempting, kEntangled };

inline const char* slot_state_name(SlotState s) {
  switch (s) {
    case SlotState::kFree: return "free";
    case SlotState::kAttempting: return "attempting";
    case SlotState::kEntangled: return "entangled";
  }
  return "?";
}

struct QubitSlot {
  SlotState state = SlotState::kFree;
  std::uint32_t cycle = 0;     // attempting: which cycle
  std::uint32_t pair_seq = 0;  // entangled: which pair
};

// A node's qubit slots and what the node knows about them. Knowledge is
// driven purely by replies: a slot leaves Attempting only when a verdict
// for its cycle arrives.
class NodeMemory {
 public:
  explicit NodeMemory(std::uint16_t slot_count) : slots_(slot_count) {}

  std::size_t size() const { return slots_.size(); }
  const QubitSlot& slot(std::uint16_t index) const { return slots_.at(index); }

  // Free -> Attempting(cycle). Throws SlotBusy otherwise.
  void begin_attempt(std::uint16_t slot, std::uint32_t cycle) {
    QubitSlot& s = slots_.at(slot);
    if (s.state != SlotState::kFree) {
      throw SlotBusy(slot, slot_state_name(s.state));
    }
    s.state = SlotState::kAttempting;
    s.cycle = cycle;
  }

  // Applies a verdict for `cycle`: SUCCESS -> Entangled(pair_seq), FAIL or
  // ERROR -> Free. Returns the slot affected. Throws UnknownCycle if no slot
  // is attempting that cycle.
  std::uint16_t resolve(std::uint32_t cycle, std::uint8_t outcome,
                        std::uint32_t pair_seq) {
    for (std::uint16_t i = 0; i < slots_.size(); ++i) {
      QubitSlot& s = slots_[i];
      if (s.state == SlotState::kAttempting && s.cycle == cycle) {
        if (outcome == kOutcomeSuccess) {
          s.state = SlotState::kEntangled;
          s.pair_seq = pair_seq;
        } else {
          s = QubitSlot{};
        }
        return i;
      }
    }
    throw UnknownCycle(cycle);
  }

  // Entangled -> Free, once the pair has been consumed or abandoned.
  void release(std::uint16_t slot) {
    QubitSlot& s = slots_.at(slot);
    if (s.state != SlotState::kEntangled) {
      throw SimError("release of slot " + std::to_string(slot) +
                     " which is " + slot_state_name(s.state));
    }
    s = QubitSlot{};
  }

  std::vector<std::pair<std::uint16_t, std::uint32_t>> entangled() const {
    std::vector<std::pair<std::uint16_t, std::uint32_t>> out;
    for (std::uint16_t i = 0; i < slots_.size(); ++i) {
      if (slots_[i].state == SlotState::kEntangled) {
        out.emplace_back(i, slots_[i].pair_seq);
      }
    }
    return out;
  }

 private:
  std::vector<QubitSlot> slots_;
};

enum class RecordStatus { kProvisional, kAccepted, kDiscarded };

// Ground truth about one heralded pair: which slots it binds and how its
// lifecycle ended. pair_seq numbers records in creation order, gap free.
struct EntanglementRecord {
  std::uint32_t pair_seq = 0;
  std::uint32_t cycle = 0;
  std::uint16_t det_id = 0;
  std::uint16_t slot_a = 0;
  std::uint16_t slot_b = 0;
  SimTime created_at = 0;
  RecordStatus status = RecordStatus::kProvisional;
  bool seen_a = false;
  bool seen_b = false;
  bool operator==(const EntanglementRecord&) const = default;
};

// Ground-truth ledger of heralded pairs. A record is created provisionally
// when the detector heralds a success, Accepted once both nodes have
// processed a SUCCESS reply for it, and Discarded when a node processes an
// ERROR verdict for its cycle. Only in-flight records are held; finished
// ones collapse into counters unless retention is enabled.
class EntanglementRegistry {
 public:
  explicit EntanglementRegistry(bool retain_records = false)
      : retain_(retain_records) {}

  std::uint32_t begin_provisional(std::uint16_t det_id, std::uint32_t cycle,
                                  std::uint16_t slot_a, std::uint16_t slot_b,
                                  SimTime at) {
    EntanglementRecord rec;
    rec.pair_seq = ++last_seq_;
    rec.cycle = cycle;
    rec.det_id = det_id;
    rec.slot_a = slot_a;
    rec.slot_b = slot_b;
    rec.created_at = at;
    in_flight_.emplace(key(det_id, cycle), rec);
    if (in_flight_.size() > max_in_flight_) {
      max_in_flight_ = in_flight_.size();
    }
    return rec.pair_seq;
  }

  // Called when one node processes a reply for `cycle`. side: 0 for node a,
  // 1 for node b.
  void node_reply(std::uint16_t det_id, std::uint32_t cycle, int side,
                  std::uint8_t outcome) {
    auto it = in_flight_.find(key(det_id, cycle));
    if (it == in_flight_.end()) {
      return;  // FAIL verdicts have no record; late twin of a discard
    }
    EntanglementRecord& rec = it->second;
    if (outcome == kOutcomeSuccess) {
      (side == 0 ? rec.seen_a : rec.seen_b) = true;
      if (rec.seen_a && rec.seen_b) {
        rec.status = RecordStatus::kAccepted;
        ++accepted_;
        finish(it);
      }
      return;
    }
    rec.status = RecordStatus::kDiscarded;
    ++discarded_;
    finish(it);
  }

  std::uint64_t accepted() const { return accepted_; }
  std::uint64_t discarded() const { return discarded_; }
  std::uint32_t last_pair_seq() const { return last_seq_; }
  std::size_t in_flight() const { return in_flight_.size(); }
  std::size_t max_in_flight() const { return max_in_flight_; }
  const std::vector<EntanglementRecord>& retained() const { return records_; }

 private:
  static std::uint64_t key(std::uint16_t det_id, std::uint32_t cycle) {
    return static_cast<std::uint64_t>(det_id) << 32 | cycle;
  }

  void finish(std::map<std::uint64_t, EntanglementRecord>::iterator it) {
    if (retain_) {
      records_.push_back(it->second);
    }
    in_flight_.erase(it);
  }

  bool retain_;
  std::uint32_t last_seq_ = 0;
  std::uint64_t accepted_ = 0;
  std::uint64_t discarded_ = 0;
  std::map<std::uint64_t, EntanglementRecord> in_flight_;
  std::size_t max_in_flight_ = 0;
  std::vector<EntanglementRecord> records_;
};

}  // namespace qherald::phys

#endif  // QHERALD_PHYS_QUBITS_HPP_
