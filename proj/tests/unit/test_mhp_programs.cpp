// Copyright 2026 The qherald Authors
// SPDX-License-Identifier: Apache-2.0

#include "qherald/mhp/programs.hpp"

#include <algorithm>
#include <array>
#include <catch2/catch_amalgamated.hpp>
#include <cstdint>
#include <vector>

#include "qherald/config/control.hpp"
#include "qherald/pipeline/device.hpp"
#include "qherald/pipeline/validate.hpp"
#include "qherald/wire.hpp"

namespace qherald::mhp {
namespace {

using pipeline::Disposition;
using pipeline::PipelineDevice;

TEST_CASE("canonical programs validate clean", "[mhp]") {
  const PortPairing pairing{1, 1};
  REQUIRE(pipeline::validate_program(build_node_program({&pairing, 1}))
              .empty());
  REQUIRE(pipeline::validate_program(build_midpoint_program()).empty());
}

// -- Node ------------------------------------------------------------------

struct NodeHarness {
  PipelineDevice dev;
  std::vector<std::vector<std::uint64_t>> emissions;

  explicit NodeHarness(PortPairing pairing = {3, 1}) {
    dev.load_program(build_node_program({&pairing, 1}));
    dev.bind_extern(kEmitPhotonExtern,
                    [this](std::span<const std::uint64_t> args) {
                      emissions.emplace_back(args.begin(), args.end());
                    });
  }

  Disposition timer(std::uint32_t cycle, std::uint16_t port = 0) {
    return dev.execute({encode(TimerMsg{cycle}), port, 0});
  }
};

TEST_CASE("a timer hit emits one photon and one announcement", "[mhp]") {
  NodeHarness h;
  h.dev.install_entry(kGenTable, {7}, {kGenAction, {3, 1, 2, 0x1234}});

  const auto out = h.timer(7);

  // Exactly one emission, with the table's parameters and the timer's cycle.
  REQUIRE(h.emissions.size() == 1);
  REQUIRE(h.emissions[0] == std::vector<std::uint64_t>{3, 2, 7, 0x1234});

  // Exactly one announcement, on the paired classical port.
  REQUIRE(out.copies.size() == 1);
  REQUIRE(out.copies[0].first == 1);
  const auto msg = decode(out.copies[0].second);
  const auto* gen = std::get_if<GenMsg>(&msg);
  REQUIRE(gen != nullptr);
  REQUIRE(gen->cycle == 7);
  REQUIRE(gen->qubit_slot == 2);
  REQUIRE(gen->attempt_params == 0x1234);
  REQUIRE_FALSE(out.trap.has_value());
}

TEST_CASE("a timer miss does nothing by default", "[mhp]") {
  NodeHarness h;
  h.dev.install_entry(kGenTable, {7}, {kGenAction, {3, 1, 0, 1}});
  const auto out = h.timer(8);
  REQUIRE(h.emissions.empty());
  REQUIRE(out.copies.empty());
  REQUIRE(out.dropped);
}

TEST_CASE("the default action can arm every cycle", "[mhp]") {
  NodeHarness h;
  h.dev.set_default_action(kGenTable, {kGenAction, {3, 1, 0, 9}});
  for (std::uint32_t c : {0u, 5u, 100u}) {
    const auto out = h.timer(c);
    REQUIRE(out.copies.size() == 1);
  }
  REQUIRE(h.emissions.size() == 3);
  REQUIRE(h.emissions[2] == std::vector<std::uint64_t>{3, 0, 100, 9});
}

TEST_CASE("timers are only honored from the host port", "[mhp]") {
  NodeHarness h;
  h.dev.set_default_action(kGenTable, {kGenAction, {3, 1, 0, 9}});
  const auto out = h.timer(1, /*port=*/1);
  REQUIRE(h.emissions.empty());
  REQUIRE(out.dropped);
}

TEST_CASE("verdict replies pass up to the host unchanged", "[mhp]") {
  NodeHarness h;
  const Bytes reply = encode(MpReplyMsg{kOutcomeSuccess, 41, 6});
  const auto out = h.dev.execute({reply, 1, 0});
  REQUIRE(out.copies.size() == 1);
  REQUIRE(out.copies[0].first == pipeline::kCpuPort);
  REQUIRE(out.copies[0].second == reply);

  // The same reply on an unpaired port is dropped.
  const auto stray = h.dev.execute({reply, 2, 0});
  REQUIRE(stray.dropped);
  REQUIRE(stray.copies.empty());
}

TEST_CASE("foreign traffic on the classical port is dropped", "[mhp]") {
  NodeHarness h;
  const auto out = h.dev.execute({encode(GenMsg{1, 0, 0}), 1, 0});
  REQUIRE(out.dropped);
  REQUIRE(out.copies.empty());
  REQUIRE_FALSE(out.trap.has_value());
}

TEST_CASE("multiple pairings forward replies from each", "[mhp]") {
  const std::array<PortPairing, 2> pairs{{{3, 1}, {4, 2}}};
  PipelineDevice dev;
  dev.load_program(build_node_program(pairs));
  const Bytes reply = encode(MpReplyMsg{kOutcomeFail, 1, 0});
  for (std::uint16_t port : {1, 2}) {
    const auto out = dev.execute({reply, port, 0});
    REQUIRE(out.copies.size() == 1);
    REQUIRE(out.copies[0].first == pipeline::kCpuPort);
  }
}

// -- Midpoint ---------------------------------------------------------------

struct MidHarness {
  PipelineDevice dev;

  MidHarness() {
    dev.load_program(build_midpoint_program());
    config::MidpointConfig mc;
    mc.port_a = 1;
    mc.port_b = 2;
    mc.det_id = 0;
    mc.detector.bin_width_ns = 1000;
    config::configure_midpoint(dev, mc);
  }

  Disposition inject(const WireMessage& m, std::uint16_t port, SimTime at) {
    return dev.execute({encode(m), port, at});
  }
};

struct Arrival {
  WireMessage msg;
  std::uint16_t port;
};

// Injects the three arrivals in the given order at increasing times inside
// one bin and returns the dispositions.
std::vector<Disposition> play(MidHarness& h, std::vector<Arrival> order,
                              SimTime base = 0) {
  std::vector<Disposition> out;
  SimTime t = base + 100;
  for (const auto& a : order) {
    out.push_back(h.inject(a.msg, a.port, t));
    t += 100;
  }
  return out;
}

MpReplyMsg sole_reply(const std::vector<Disposition>& outs) {
  // Exactly one injection may produce output: two copies of one reply.
  REQUIRE(outs.size() == 3);
  for (std::size_t i = 0; i + 1 < outs.size(); ++i) {
    REQUIRE(outs[i].copies.empty());
  }
  const auto& last = outs.back();
  REQUIRE(last.copies.size() == 2);
  REQUIRE(last.copies[0].first == 1);
  REQUIRE(last.copies[1].first == 2);
  REQUIRE(last.copies[0].second == last.copies[1].second);
  const auto msg = decode(last.copies[0].second);
  const auto* reply = std::get_if<MpReplyMsg>(&msg);
  REQUIRE(reply != nullptr);
  return *reply;
}

TEST_CASE("all six arrival orders complete with one multicast reply",
          "[mhp]") {
  const Arrival gen_a{GenMsg{5, 0, 7}, 1};
  const Arrival gen_b{GenMsg{5, 0, 7}, 2};
  const Arrival det{DetectorMsg{kOutcomeSuccess, 0, 0}, 0};

  std::array<int, 3> idx{0, 1, 2};
  const std::array<Arrival, 3> items{gen_a, gen_b, det};
  int orders = 0;
  do {
    MidHarness h;
    auto outs = play(h, {items[static_cast<std::size_t>(idx[0])],
                         items[static_cast<std::size_t>(idx[1])],
                         items[static_cast<std::size_t>(idx[2])]});
    const MpReplyMsg reply = sole_reply(outs);
    REQUIRE(reply.outcome == kOutcomeSuccess);
    REQUIRE(reply.cycle == 5);
    REQUIRE(reply.pair_seq == 1);
    REQUIRE(h.dev.register_read(kPairSeqRegister, 0) == 1);
    REQUIRE(h.dev.trap_count() == 0);
    ++orders;
  } while (std::next_permutation(idx.begin(), idx.end()));
  REQUIRE(orders == 6);
}

TEST_CASE("mismatched attempts yield an error verdict in every order",
          "[mhp]") {
  const Arrival det{DetectorMsg{kOutcomeSuccess, 0, 0}, 0};

  SECTION("attempt parameters differ") {
    const Arrival gen_a{GenMsg{5, 0, 7}, 1};
    const Arrival gen_b{GenMsg{5, 0, 8}, 2};
    std::array<int, 3> idx{0, 1, 2};
    const std::array<Arrival, 3> items{gen_a, gen_b, det};
    do {
      MidHarness h;
      auto outs = play(h, {items[static_cast<std::size_t>(idx[0])],
                           items[static_cast<std::size_t>(idx[1])],
                           items[static_cast<std::size_t>(idx[2])]});
      const MpReplyMsg reply = sole_reply(outs);
      REQUIRE(reply.outcome == kOutcomeError);
      REQUIRE(reply.pair_seq == 0);
      // No pair is numbered for an inconsistent attempt.
      REQUIRE(h.dev.register_read(kPairSeqRegister, 0) == 0);
    } while (std::next_permutation(idx.begin(), idx.end()));
  }

  SECTION("cycle numbers differ") {
    const Arrival gen_a{GenMsg{5, 0, 7}, 1};
    const Arrival gen_b{GenMsg{6, 0, 7}, 2};
    MidHarness h;
    auto outs = play(h, {gen_a, gen_b, det});
    const MpReplyMsg reply = sole_reply(outs);
    REQUIRE(reply.outcome == kOutcomeError);
  }
}

TEST_CASE("a detector fail propagates without numbering a pair", "[mhp]") {
  MidHarness h;
  auto outs = play(h, {Arrival{GenMsg{9, 1, 2}, 1},
                       Arrival{GenMsg{9, 1, 2}, 2},
                       Arrival{DetectorMsg{kOutcomeFail, 0, 0}, 0}});
  const MpReplyMsg reply = sole_reply(outs);
  REQUIRE(reply.outcome == kOutcomeFail);
  REQUIRE(reply.cycle == 9);
  REQUIRE(reply.pair_seq == 0);
  REQUIRE(h.dev.register_read(kPairSeqRegister, 0) == 0);
}

TEST_CASE("messages from different bins never pair", "[mhp]") {
  MidHarness h;
  // GEN(A) lands in bin 0; GEN(B) and the report are bin 1. All three flags
  // are set, but the bin comparison holds the verdict back.
  auto o1 = h.inject(GenMsg{0, 0, 0}, 1, 100);
  auto o2 = h.inject(GenMsg{1, 0, 0}, 2, 1100);
  auto o3 = h.inject(DetectorMsg{kOutcomeSuccess, 0, 1}, 0, 1200);
  REQUIRE(o1.copies.empty());
  REQUIRE(o2.copies.empty());
  REQUIRE(o3.copies.empty());

  // A fresh GEN(A) inside bin 1 completes it.
  auto o4 = h.inject(GenMsg{1, 0, 0}, 1, 1300);
  REQUIRE(o4.copies.size() == 2);
  const auto msg = decode(o4.copies[0].second);
  REQUIRE(std::get<MpReplyMsg>(msg).outcome == kOutcomeSuccess);
}

TEST_CASE("pair numbering advances across successes", "[mhp]") {
  MidHarness h;
  auto first = play(h, {Arrival{GenMsg{1, 0, 0}, 1},
                        Arrival{GenMsg{1, 0, 0}, 2},
                        Arrival{DetectorMsg{kOutcomeSuccess, 0, 0}, 0}});
  REQUIRE(sole_reply(first).pair_seq == 1);
  auto second = play(h, {Arrival{GenMsg{2, 0, 0}, 1},
                         Arrival{GenMsg{2, 0, 0}, 2},
                         Arrival{DetectorMsg{kOutcomeSuccess, 0, 1}, 0}},
                     /*base=*/1000);
  REQUIRE(sole_reply(second).pair_seq == 2);
  REQUIRE(h.dev.register_read(kPairSeqRegister, 0) == 2);
}

TEST_CASE("traffic for unconfigured ports or detectors is ignored", "[mhp]") {
  MidHarness h;
  const auto g = h.inject(GenMsg{1, 0, 0}, 9, 100);
  REQUIRE(g.dropped);
  REQUIRE(h.dev.register_read("gen_valid", 9) == 0);

  const auto d = h.inject(DetectorMsg{kOutcomeSuccess, 3, 0}, 0, 100);
  REQUIRE(d.dropped);
  REQUIRE(h.dev.register_read("det_valid", 3) == 0);
  REQUIRE(h.dev.trap_count() == 0);
}

TEST_CASE("an unconfigured bin width fails loudly", "[mhp]") {
  PipelineDevice dev;
  dev.load_program(build_midpoint_program());
  config::MidpointConfig mc;
  mc.detector.bin_width_ns = 1000;
  config::configure_midpoint(dev, mc);
  // Zero the published width: completing an attempt now divides by zero.
  dev.register_write(kBinWidthRegister, 0, 0);
  auto o1 = dev.execute({encode(GenMsg{1, 0, 0}), 1, 100});
  auto o2 = dev.execute({encode(GenMsg{1, 0, 0}), 2, 200});
  auto o3 =
      dev.execute({encode(DetectorMsg{kOutcomeSuccess, 0, 0}), 0, 300});
  REQUIRE(o1.copies.empty());
  REQUIRE(o2.copies.empty());
  REQUIRE(o3.trap.has_value());
  REQUIRE(o3.trap->reason == "division by zero");
}

}  // namespace
}  // namespace qherald::mhp
