// Copyright 2026 The qherald Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QHERALD_CONFIG_CONTROL_HPP_
#define QHERALD_CONFIG_CONTROL_HPP_

#include <cstdint>

#include "qherald/config/scenario.hpp"
#include "qherald/mhp/programs.hpp"
#include "qherald/pipeline/device.hpp"

namespace qherald::config {

// The single multicast group used for replies on a two-node link.
inline constexpr std::uint16_t kReplyGroup = 1;

// Installs a node's emission schedule. The default action fires the
// standing attempt (if any) on every cycle; explicit per-cycle entries
// override it.
inline void configure_node(pipeline::PipelineDevice& dev,
                           const NodeConfig& node) {
  if (node.attempt) {
    dev.set_default_action(
        mhp::kGenTable,
        {mhp::kGenAction,
         {node.qport, node.cport, node.attempt->slot, node.attempt->params}});
  }
  for (const auto& e : node.attempts) {
    dev.install_entry(mhp::kGenTable, {e.cycle},
                      {mhp::kGenAction,
                       {node.qport, node.cport, e.attempt.slot,
                        e.attempt.params}});
  }
}

// Installs the midpoint's port topology: each node port maps to its peer,
// the detector maps to both ports, replies multicast to both, and the
// detection bin width is published to the data plane.
inline void configure_midpoint(pipeline::PipelineDevice& dev,
                               const MidpointConfig& mid) {
  dev.create_mcast_group(kReplyGroup, {mid.port_a, mid.port_b});
  dev.install_entry(
      mhp::kMpTable, {mid.port_a},
      {mhp::kSetPeerAction, {mid.port_b, kReplyGroup, mid.det_id}});
  dev.install_entry(
      mhp::kMpTable, {mid.port_b},
      {mhp::kSetPeerAction, {mid.port_a, kReplyGroup, mid.det_id}});
  dev.install_entry(
      mhp::kDetTable, {mid.det_id},
      {mhp::kSetPairAction, {mid.port_a, mid.port_b, kReplyGroup}});
  dev.register_write(mhp::kBinWidthRegister, 0, mid.detector.bin_width_ns);
}

}  // namespace qherald::config

#endif  // QHERALD_CONFIG_CONTROL_HPP_
