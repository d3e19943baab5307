// Copyright 2026 The qherald Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QHERALD_CONFIG_TIMING_HPP_
#define QHERALD_CONFIG_TIMING_HPP_

#include <cstdint>

#include "qherald/config/scenario.hpp"
#include "qherald/mhp/programs.hpp"

namespace qherald::config {

// Closed-form schedule for one arm of the link. All times in ns. The
// operational simulation must land every event exactly on these values;
// tests hold it to that.
struct SideTiming {
  std::uint64_t phase_ns = 0;
  std::uint64_t period_ns = 0;
  std::uint64_t node_proc_ns = 0;
  std::uint64_t propagation_ns = 0;

  std::uint64_t timer_time(std::uint64_t cycle) const {
    return phase_ns + cycle * period_ns;
  }
  // Photon and announcement leave the node together, one processing delay
  // after the timer.
  std::uint64_t emission_time(std::uint64_t cycle) const {
    return timer_time(cycle) + node_proc_ns;
  }
  std::uint64_t midpoint_arrival(std::uint64_t cycle) const {
    return emission_time(cycle) + propagation_ns;
  }
};

struct TimingPlan {
  SideTiming side_a;
  SideTiming side_b;
  std::uint64_t bin_width_ns = 0;
  std::uint64_t report_latency_ns = 0;
  std::uint64_t midpoint_proc_ns = 0;

  std::uint64_t bin_index(std::uint64_t cycle) const {
    return mhp::bin_of(side_a.midpoint_arrival(cycle), bin_width_ns);
  }
  // The detector reports a bin only after it has fully elapsed.
  std::uint64_t bin_close_time(std::uint64_t cycle) const {
    return (bin_index(cycle) + 1) * bin_width_ns + report_latency_ns;
  }
  std::uint64_t reply_at_device(std::uint64_t cycle,
                                const SideTiming& side) const {
    return bin_close_time(cycle) + midpoint_proc_ns + side.propagation_ns;
  }
  std::uint64_t reply_at_agent(std::uint64_t cycle,
                               const SideTiming& side) const {
    return reply_at_device(cycle, side) + side.node_proc_ns;
  }
};

inline TimingPlan derive_timing(const Scenario& s) {
  TimingPlan plan;
  plan.side_a = {s.node_a.phase_ns, s.node_a.period_ns,
                 s.node_a.processing_delay_ns,
                 s.midpoint.fiber_a.propagation_ns()};
  plan.side_b = {s.node_b.phase_ns, s.node_b.period_ns,
                 s.node_b.processing_delay_ns,
                 s.midpoint.fiber_b.propagation_ns()};
  plan.bin_width_ns = s.midpoint.detector.bin_width_ns;
  plan.report_latency_ns = s.midpoint.detector.report_latency_ns;
  plan.midpoint_proc_ns = s.midpoint.processing_delay_ns;
  return plan;
}

}  // namespace qherald::config

#endif  // QHERALD_CONFIG_TIMING_HPP_
