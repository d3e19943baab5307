// Copyright 2026 The qherald Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QHERALD_HARNESS_SIMULATION_HPP_
#define QHERALD_HARNESS_SIMULATION_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qherald/config/control.hpp"
#include "qherald/config/scenario.hpp"
#include "qherald/config/timing.hpp"
#include "qherald/errors.hpp"
#include "qherald/event_engine.hpp"
#include "qherald/harness/metrics.hpp"
#include "qherald/mhp/programs.hpp"
#include "qherald/phys/link.hpp"
#include "qherald/pipeline/device.hpp"
#include "qherald/rng.hpp"
#include "qherald/wire.hpp"

namespace qherald::harness {

// One verdict as a node agent saw it.
struct ReplyLog {
  int side = 0;
  std::uint32_t cycle = 0;
  std::uint8_t outcome = 0;
  std::uint32_t pair_seq = 0;
  std::uint16_t slot = 0;
  SimTime at_ns = 0;
  bool operator==(const ReplyLog&) const = default;
};

// One detector report as injected into the midpoint device.
struct DetectorLog {
  std::uint64_t bin = 0;
  std::uint8_t outcome = 0;
  SimTime at_ns = 0;
  bool operator==(const DetectorLog&) const = default;
};

// Wires three pipeline devices, the link physics, and the per-node agents
// onto one event engine and runs a scenario to quiescence.
//
// The wiring models each device as a store-and-forward element with a fixed
// processing delay: a packet handed to the device at time t is executed with
// arrival time t, and every emitted copy leaves the device at t plus the
// device's delay, then crosses its link (the node-agent link is in-chassis
// and takes no extra time; the node-midpoint links take the arm's fiber
// propagation). Photon emission shares the node delay, so the photon and its
// announcement leave together and land on the midpoint in the same instant.
class Simulation {
 public:
  explicit Simulation(const config::Scenario& scenario,
                      bool retain_history = false)
      : scenario_(scenario),
        plan_(config::derive_timing(scenario)),
        rng_(scenario.seed),
        phys_(engine_, rng_, scenario.midpoint.fiber_a,
              scenario.midpoint.fiber_b, scenario.midpoint.det_id,
              scenario.midpoint.detector, scenario.node_a.slots,
              scenario.node_b.slots, retain_history),
        retain_(retain_history) {
    const mhp::PortPairing pair_a{scenario.node_a.qport, scenario.node_a.cport};
    const mhp::PortPairing pair_b{scenario.node_b.qport, scenario.node_b.cport};
    node_dev_[0].load_program(mhp::build_node_program({&pair_a, 1}));
    node_dev_[1].load_program(mhp::build_node_program({&pair_b, 1}));
    mid_dev_.load_program(mhp::build_midpoint_program());

    config::configure_node(node_dev_[0], scenario.node_a);
    config::configure_node(node_dev_[1], scenario.node_b);
    config::configure_midpoint(mid_dev_, scenario.midpoint);

    for (int side = 0; side < 2; ++side) {
      node_dev_[static_cast<std::size_t>(side)].bind_extern(
          mhp::kEmitPhotonExtern, [this, side](auto args) {
            // args: qport, slot, cycle, params. Emission happens one node
            // processing delay after the timer that triggered it.
            const auto slot = static_cast<std::uint16_t>(args[1]);
            const auto cycle = static_cast<std::uint32_t>(args[2]);
            const auto params = static_cast<std::uint16_t>(args[3]);
            engine_.schedule(engine_.now() + node_cfg(side).processing_delay_ns,
                             [this, side, slot, cycle, params] {
                               phys_.emit_photon(side, slot, cycle, params);
                             });
          });
    }

    engine_.schedule(plan_.side_a.timer_time(0), [this] { on_timer(0, 0); });
    engine_.schedule(plan_.side_b.timer_time(0), [this] { on_timer(1, 0); });
    engine_.schedule(plan_.bin_close_time(0), [this] { on_bin_close(0); });
  }

  // Runs to quiescence and returns the aggregated report.
  MetricsReport run() {
    engine_.drain();
    if (timers_delivered_[0] != timers_delivered_[1]) {
      throw SimError("nodes disagree on the number of cycles run");
    }
    return build_report();
  }

  // Injects arbitrary work (control plane changes, probes) at a time.
  EventId schedule(SimTime at, std::function<void()> fn) {
    return engine_.schedule(at, std::move(fn));
  }

  EventEngine& engine() { return engine_; }
  pipeline::PipelineDevice& node_device(int side) {
    return node_dev_[static_cast<std::size_t>(side)];
  }
  pipeline::PipelineDevice& midpoint_device() { return mid_dev_; }
  phys::LinkPhysics& physics() { return phys_; }
  const config::TimingPlan& plan() const { return plan_; }
  const std::vector<ReplyLog>& reply_log() const { return reply_log_; }
  const std::vector<DetectorLog>& detector_log() const { return det_log_; }
  std::uint64_t timers_delivered(int side) const {
    return timers_delivered_[static_cast<std::size_t>(side)];
  }

 private:
  struct AgentStats {
    std::uint64_t replies = 0;
    std::uint64_t successes = 0;
    std::uint64_t failures = 0;
    std::uint64_t errors = 0;
    LatencyStats latency;
  };

  const config::NodeConfig& node_cfg(int side) const {
    return side == 0 ? scenario_.node_a : scenario_.node_b;
  }
  const config::SideTiming& side_plan(int side) const {
    return side == 0 ? plan_.side_a : plan_.side_b;
  }
  std::uint16_t midpoint_port(int side) const {
    return side == 0 ? scenario_.midpoint.port_a : scenario_.midpoint.port_b;
  }

  void on_timer(int side, std::uint32_t cycle) {
    const std::uint64_t target = scenario_.policy.stop_after_successes;
    if (target > 0 &&
        agents_[static_cast<std::size_t>(side)].successes >= target) {
      return;  // Target met; the chain ends here.
    }
    ++timers_delivered_[static_cast<std::size_t>(side)];
    deliver_to_node(side, encode(TimerMsg{cycle}), pipeline::kCpuPort);
    if (cycle + 1 < scenario_.policy.max_cycles) {
      engine_.schedule(side_plan(side).timer_time(cycle + 1),
                       [this, side, cycle] { on_timer(side, cycle + 1); });
    }
  }

  void on_bin_close(std::uint32_t cycle) {
    // A bin is only closed for cycles both nodes actually started; once a
    // node stops, nothing downstream of its last timer exists.
    if (timers_delivered_[0] > cycle && timers_delivered_[1] > cycle) {
      const DetectorMsg msg = phys_.close_bin(plan_.bin_index(cycle));
      if (msg.outcome == kOutcomeSuccess) {
        ++heralds_;
      }
      if (retain_) {
        det_log_.push_back({plan_.bin_index(cycle), msg.outcome,
                            engine_.now()});
      }
      deliver_to_midpoint(encode(msg), pipeline::kCpuPort);
      if (cycle + 1 < scenario_.policy.max_cycles) {
        engine_.schedule(plan_.bin_close_time(cycle + 1),
                         [this, cycle] { on_bin_close(cycle + 1); });
      }
    }
  }

  void deliver_to_node(int side, Bytes bytes, std::uint16_t ingress) {
    auto& dev = node_dev_[static_cast<std::size_t>(side)];
    const auto out = dev.execute({std::move(bytes), ingress, engine_.now()});
    const std::uint64_t delay = node_cfg(side).processing_delay_ns;
    for (const auto& [port, payload] : out.copies) {
      if (port == pipeline::kCpuPort) {
        engine_.schedule(engine_.now() + delay,
                         [this, side, payload] { on_agent_reply(side, payload); });
      } else if (port == node_cfg(side).cport) {
        const std::uint16_t mp = midpoint_port(side);
        const SimTime at = engine_.now() + delay +
                           phys_.fiber(side).propagation_ns();
        engine_.schedule(at, [this, payload, mp] {
          deliver_to_midpoint(payload, mp);
        });
      } else {
        throw SimError("node emitted a copy on an unrouted port");
      }
    }
  }

  void deliver_to_midpoint(Bytes bytes, std::uint16_t ingress) {
    const auto out = mid_dev_.execute({std::move(bytes), ingress, engine_.now()});
    const std::uint64_t delay = scenario_.midpoint.processing_delay_ns;
    for (const auto& [port, payload] : out.copies) {
      int side;
      if (port == scenario_.midpoint.port_a) {
        side = 0;
      } else if (port == scenario_.midpoint.port_b) {
        side = 1;
      } else {
        throw SimError("midpoint emitted a copy on an unrouted port");
      }
      const SimTime at =
          engine_.now() + delay + phys_.fiber(side).propagation_ns();
      const std::uint16_t ing = node_cfg(side).cport;
      engine_.schedule(at, [this, side, payload, ing] {
        deliver_to_node(side, payload, ing);
      });
    }
  }

  void on_agent_reply(int side, const Bytes& bytes) {
    const WireMessage msg = decode(bytes);
    const auto* reply = std::get_if<MpReplyMsg>(&msg);
    if (reply == nullptr) {
      throw SimError("agent received a non-verdict message");
    }
    const std::uint16_t slot = phys_.record_reply(side, *reply);
    AgentStats& st = agents_[static_cast<std::size_t>(side)];
    ++st.replies;
    st.latency.add(engine_.now() - side_plan(side).timer_time(reply->cycle));
    if (reply->outcome == kOutcomeSuccess) {
      ++st.successes;
      // Pairs are handed off to the consumer as they are produced; the one
      // that satisfies a stop target is held for delivery.
      const std::uint64_t target = scenario_.policy.stop_after_successes;
      if (!(target > 0 && st.successes >= target)) {
        phys_.memory(side).release(slot);
      }
    } else if (reply->outcome == kOutcomeError) {
      ++st.errors;
    } else {
      ++st.failures;
    }
    track_agreement(reply->cycle, reply->outcome, reply->pair_seq);
    if (retain_) {
      reply_log_.push_back({side, reply->cycle, reply->outcome,
                            reply->pair_seq, slot, engine_.now()});
    }
  }

  // Both agents must hear the same story for every cycle.
  void track_agreement(std::uint32_t cycle, std::uint8_t outcome,
                       std::uint32_t pair_seq) {
    auto it = pending_cmp_.find(cycle);
    if (it == pending_cmp_.end()) {
      pending_cmp_.emplace(cycle, std::make_pair(outcome, pair_seq));
      return;
    }
    ++replies_compared_;
    if (it->second != std::make_pair(outcome, pair_seq)) {
      replies_consistent_ = false;
    }
    pending_cmp_.erase(it);
  }

  MetricsReport build_report() {
    MetricsReport r;
    r.scenario_digest = to_hex(config::scenario_digest(scenario_));
    r.seed = scenario_.seed;
    const std::uint64_t target = scenario_.policy.stop_after_successes;
    r.stop_reason = (target > 0 && agents_[0].successes >= target)
                        ? "success_target"
                        : "max_cycles";
    r.cycles_run = timers_delivered_[0];
    r.sim_end_ns = engine_.now();
    r.events_dispatched = engine_.total_dispatched();
    r.max_pending_events = engine_.max_pending();
    for (int side = 0; side < 2; ++side) {
      SideMetrics& m = side == 0 ? r.node_a : r.node_b;
      const AgentStats& st = agents_[static_cast<std::size_t>(side)];
      m.attempts = phys_.emitted(side);
      m.photons_lost = phys_.lost(side);
      m.photons_arrived = phys_.arrived(side);
      m.replies = st.replies;
      m.successes = st.successes;
      m.failures = st.failures;
      m.errors = st.errors;
      m.entangled_slots = phys_.memory(side).entangled().size();
      m.latency = st.latency;
    }
    r.detector.bins_closed = phys_.detector().closes();
    r.detector.heralds = heralds_;
    r.pair_seq_final =
        mid_dev_.register_read(mhp::kPairSeqRegister, scenario_.midpoint.det_id);
    r.pairs_accepted = phys_.registry().accepted();
    r.pairs_discarded = phys_.registry().discarded();
    r.max_pairs_in_flight = phys_.registry().max_in_flight();
    r.replies_consistent = replies_consistent_ && pending_cmp_.empty();
    r.replies_compared = replies_compared_;
    r.traps_node_a = node_dev_[0].trap_count();
    r.traps_node_b = node_dev_[1].trap_count();
    r.traps_midpoint = mid_dev_.trap_count();
    return r;
  }

  config::Scenario scenario_;
  config::TimingPlan plan_;
  EventEngine engine_;
  Rng rng_;
  std::array<pipeline::PipelineDevice, 2> node_dev_;
  pipeline::PipelineDevice mid_dev_;
  phys::LinkPhysics phys_;
  bool retain_;
  std::array<std::uint64_t, 2> timers_delivered_{0, 0};
  std::array<AgentStats, 2> agents_;
  std::uint64_t heralds_ = 0;
  std::map<std::uint32_t, std::pair<std::uint8_t, std::uint32_t>> pending_cmp_;
  bool replies_consistent_ = true;
  std::uint64_t replies_compared_ = 0;
  std::vector<ReplyLog> reply_log_;
  std::vector<DetectorLog> det_log_;
};

inline MetricsReport run_scenario(const config::Scenario& scenario) {
  Simulation sim(scenario);
  return sim.run();
}

}  // namespace qherald::harness

#endif  // QHERALD_HARNESS_SIMULATION_HPP_
