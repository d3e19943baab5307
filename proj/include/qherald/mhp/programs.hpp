// Copyright 2026 The qherald Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QHERALD_MHP_PROGRAMS_HPP_
#define QHERALD_MHP_PROGRAMS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qherald/pipeline/ir.hpp"

namespace qherald::mhp {

using pipeline::AddHeader;
using pipeline::ApplyTable;
using pipeline::CallExtern;
using pipeline::cval;
using pipeline::Drop;
using pipeline::Expr;
using pipeline::ExprOp;
using pipeline::FieldRef;
using pipeline::Forward;
using pipeline::fref;
using pipeline::IfElse;
using pipeline::Instruction;
using pipeline::kMetaScope;
using pipeline::mref;
using pipeline::Multicast;
using pipeline::op2;
using pipeline::PipelineProgram;
using pipeline::pref;
using pipeline::RegRead;
using pipeline::RegWrite;
using pipeline::RemoveHeader;
using pipeline::SetField;

// Register arrays at the midpoint are indexed by ingress port and by
// detector id; these bounds size them and cap the valid config space.
inline constexpr std::uint16_t kMaxPorts = 16;
inline constexpr std::uint16_t kMaxDetectors = 8;

inline constexpr const char* kGenTable = "gen_tbl";
inline constexpr const char* kMpTable = "mp_tbl";
inline constexpr const char* kDetTable = "det_tbl";
inline constexpr const char* kGenAction = "gen";
inline constexpr const char* kNoOpAction = "no_op";
inline constexpr const char* kSetPeerAction = "set_peer";
inline constexpr const char* kSetPairAction = "set_pair";
inline constexpr const char* kEmitPhotonExtern = "emit_photon";
inline constexpr const char* kBinWidthRegister = "cfg_bin_width";
inline constexpr const char* kPairSeqRegister = "pair_seq";

// Detection bin index for an arrival timestamp. Bins tile the timeline from
// zero: bin k covers [k*width, (k+1)*width).
inline std::uint64_t bin_of(std::uint64_t time_ns, std::uint64_t width_ns) {
  return time_ns / width_ns;
}

// A node's quantum emission interface and the classical port announcements
// for it travel on.
struct PortPairing {
  std::uint16_t qport = 0;
  std::uint16_t cport = 0;
  bool operator==(const PortPairing&) const = default;
};

namespace builder_detail {

inline Instruction iset(const char* header, const char* field, Expr value) {
  return Instruction{SetField{FieldRef{header, field}, std::move(value)}};
}

inline Instruction imeta(const char* field, Expr value) {
  return iset(kMetaScope, field, std::move(value));
}

inline Instruction iread(const char* reg, Expr index, const char* meta_field) {
  return Instruction{
      RegRead{reg, std::move(index), FieldRef{kMetaScope, meta_field}}};
}

inline Instruction iwrite(const char* reg, Expr index, Expr value) {
  return Instruction{RegWrite{reg, std::move(index), std::move(value)}};
}

inline Instruction iif(Expr cond, std::vector<Instruction> then_block,
                       std::vector<Instruction> else_block = {}) {
  return Instruction{
      IfElse{std::move(cond), std::move(then_block), std::move(else_block)}};
}

inline Expr eq(Expr a, Expr b) {
  return op2(ExprOp::kEq, std::move(a), std::move(b));
}
inline Expr ne(Expr a, Expr b) {
  return op2(ExprOp::kNe, std::move(a), std::move(b));
}
inline Expr land(Expr a, Expr b) {
  return op2(ExprOp::kLogAnd, std::move(a), std::move(b));
}
inline Expr lor(Expr a, Expr b) {
  return op2(ExprOp::kLogOr, std::move(a), std::move(b));
}

}  // namespace builder_detail

// ---------------------------------------------------------------------------
// Node pipeline
//
// Timer ticks arrive on the CPU port as TIMER packets. A hit in gen_tbl
// (keyed on the cycle number; the default action decides unmatched cycles)
// runs gen: fire the emit_photon extern, rewrite the packet into a GEN
// announcement, and forward it out the paired classical port. Replies coming
// back on a paired classical port are passed up to the CPU port unchanged;
// everything else is dropped.
// ---------------------------------------------------------------------------

inline PipelineProgram build_node_program(
    std::span<const PortPairing> pairings) {
  using namespace builder_detail;
  PipelineProgram p;
  p.name = "mhp_node";

  p.headers = {
      {"msg", {{"msg_type", 8}}},
      {"timer", {{"cycle", 32}}},
      {"gen", {{"qubit_slot", 16}, {"attempt_params", 16}}},
  };

  p.parser.start = "start";
  p.parser.states = {
      {"start",
       {"msg"},
       pipeline::SelectSpec{FieldRef{"msg", "msg_type"},
                            {{0x01, "parse_timer"}},
                            pipeline::kAcceptState}},
      {"parse_timer", {"timer"}, std::nullopt},
  };

  // gen(qport, cport, slot, params): emit a photon from `slot` on `qport`
  // and announce the attempt out `cport`. The cycle rides in from the timer.
  pipeline::ActionSpec gen;
  gen.name = kGenAction;
  gen.params = {{"qport", 16}, {"cport", 16}, {"slot", 16}, {"params", 16}};
  gen.body = {
      Instruction{CallExtern{kEmitPhotonExtern,
                             {pref("qport"), pref("slot"),
                              fref("timer", "cycle"), pref("params")}}},
      iset("msg", "msg_type", cval(0x02, 8)),
      Instruction{AddHeader{"gen"}},
      iset("gen", "qubit_slot", pref("slot")),
      iset("gen", "attempt_params", pref("params")),
      Instruction{Forward{pref("cport")}},
  };
  pipeline::ActionSpec no_op;
  no_op.name = kNoOpAction;
  p.actions = {std::move(gen), std::move(no_op)};

  pipeline::TableSpec gen_tbl;
  gen_tbl.name = kGenTable;
  gen_tbl.key = {FieldRef{"timer", "cycle"}};
  gen_tbl.actions = {kGenAction, kNoOpAction};
  gen_tbl.default_action = {kNoOpAction, {}};
  p.tables = {std::move(gen_tbl)};

  p.externs = {kEmitPhotonExtern};

  // Replies are recognized by type and by arriving on a paired classical
  // port; pairings are baked in as a chain of checks.
  std::vector<Instruction> reply_path = {Instruction{Drop{}}};
  for (auto it = pairings.rbegin(); it != pairings.rend(); ++it) {
    reply_path = {iif(land(eq(fref("msg", "msg_type"), cval(0x03, 8)),
                           eq(mref("ingress_port"), cval(it->cport, 16))),
                      {Instruction{Forward{cval(pipeline::kCpuPort, 16)}}},
                      std::move(reply_path))};
  }

  p.apply = {iif(
      land(eq(fref("msg", "msg_type"), cval(0x01, 8)),
           eq(mref("ingress_port"), cval(pipeline::kCpuPort, 16))),
      {Instruction{ApplyTable{kGenTable}}}, std::move(reply_path))};
  return p;
}

// ---------------------------------------------------------------------------
// Midpoint pipeline
//
// Correlates three messages per attempt: one GEN from each node and one
// DETECTOR report from the measurement hardware, in any arrival order. GEN
// content and arrival time are saved into per-port registers; the DETECTOR
// verdict into per-detector registers. Whenever all three are present for
// the same detection bin, the verdict is decided (ERROR if the two nodes'
// cycle or attempt parameters disagree, otherwise the detector outcome,
// with pair_seq incremented on SUCCESS), the saved flags are cleared, and
// one reply is multicast to the configured group.
//
// mp_tbl maps an ingress port to its peer port, multicast group, and
// detector id; det_tbl maps a detector id to its pair of ports and group.
// The detection bin width lives in the cfg_bin_width register so the same
// program serves any timing configuration.
// ---------------------------------------------------------------------------

inline PipelineProgram build_midpoint_program() {
  using namespace builder_detail;
  PipelineProgram p;
  p.name = "mhp_midpoint";

  // Declaration order fixes the deparse layout: a reply leaves as msg
  // followed by reply, so the carrier header (gen or det) is removed before
  // multicast.
  p.headers = {
      {"msg", {{"msg_type", 8}}},
      {"reply", {{"outcome", 8}, {"cycle", 32}, {"pair_seq", 32}}},
      {"gen", {{"cycle", 32}, {"qubit_slot", 16}, {"attempt_params", 16}}},
      {"det", {{"outcome", 8}, {"det_id", 16}, {"bin", 32}}},
  };

  p.meta = {
      {"port_p", 16}, {"port_q", 16}, {"grp", 16},   {"det", 16},
      {"cfg_ok", 1},  {"gv_p", 1},    {"gv_q", 1},   {"dv", 1},
      {"bw", 64},     {"t_p", 64},    {"t_q", 64},   {"bin_p", 64},
      {"bin_q", 64},  {"bin_d", 64},  {"cyc_p", 32}, {"cyc_q", 32},
      {"par_p", 16},  {"par_q", 16},  {"out_d", 8},  {"ps", 32},
  };

  p.parser.start = "start";
  p.parser.states = {
      {"start",
       {"msg"},
       pipeline::SelectSpec{FieldRef{"msg", "msg_type"},
                            {{0x02, "parse_gen"}, {0x04, "parse_det"}},
                            pipeline::kAcceptState}},
      {"parse_gen", {"gen"}, std::nullopt},
      {"parse_det", {"det"}, std::nullopt},
  };

  pipeline::ActionSpec set_peer;
  set_peer.name = kSetPeerAction;
  set_peer.params = {{"peer_port", 16}, {"grp", 16}, {"det", 16}};
  set_peer.body = {
      imeta("port_p", mref("ingress_port")),
      imeta("port_q", pref("peer_port")),
      imeta("grp", pref("grp")),
      imeta("det", pref("det")),
      imeta("cfg_ok", cval(1, 1)),
  };

  pipeline::ActionSpec set_pair;
  set_pair.name = kSetPairAction;
  set_pair.params = {{"port_a", 16}, {"port_b", 16}, {"grp", 16}};
  set_pair.body = {
      imeta("port_p", pref("port_a")),
      imeta("port_q", pref("port_b")),
      imeta("grp", pref("grp")),
      imeta("det", fref("det", "det_id")),
      imeta("cfg_ok", cval(1, 1)),
  };

  pipeline::ActionSpec no_op;
  no_op.name = kNoOpAction;
  p.actions = {std::move(set_peer), std::move(set_pair), std::move(no_op)};

  pipeline::TableSpec mp_tbl;
  mp_tbl.name = kMpTable;
  mp_tbl.key = {FieldRef{kMetaScope, "ingress_port"}};
  mp_tbl.actions = {kSetPeerAction, kNoOpAction};
  mp_tbl.default_action = {kNoOpAction, {}};

  pipeline::TableSpec det_tbl;
  det_tbl.name = kDetTable;
  det_tbl.key = {FieldRef{"det", "det_id"}};
  det_tbl.actions = {kSetPairAction, kNoOpAction};
  det_tbl.default_action = {kNoOpAction, {}};
  p.tables = {std::move(mp_tbl), std::move(det_tbl)};

  p.registers = {
      {"gen_cycle", 32, kMaxPorts},  {"gen_slot", 16, kMaxPorts},
      {"gen_params", 16, kMaxPorts}, {"gen_time", 64, kMaxPorts},
      {"gen_valid", 1, kMaxPorts},   {"det_outcome", 8, kMaxDetectors},
      {"det_bin", 32, kMaxDetectors}, {"det_valid", 1, kMaxDetectors},
      {kPairSeqRegister, 32, kMaxDetectors},
      {kBinWidthRegister, 64, 1},
  };

  // Verdict block, run after any of the three messages lands. Fires at most
  // once per attempt because the valid flags are cleared on completion.
  std::vector<Instruction> complete = {
      iread("gen_valid", mref("port_p"), "gv_p"),
      iread("gen_valid", mref("port_q"), "gv_q"),
      iread("det_valid", mref("det"), "dv"),
      iif(
          land(land(eq(mref("gv_p"), cval(1, 1)), eq(mref("gv_q"), cval(1, 1))),
               eq(mref("dv"), cval(1, 1))),
          {
              iread(kBinWidthRegister, cval(0), "bw"),
              iread("gen_time", mref("port_p"), "t_p"),
              iread("gen_time", mref("port_q"), "t_q"),
              imeta("bin_p", op2(ExprOp::kDiv, mref("t_p"), mref("bw"))),
              imeta("bin_q", op2(ExprOp::kDiv, mref("t_q"), mref("bw"))),
              iread("det_bin", mref("det"), "bin_d"),
              iif(
                  land(eq(mref("bin_p"), mref("bin_q")),
                       eq(mref("bin_p"), mref("bin_d"))),
                  {
                      iread("gen_cycle", mref("port_p"), "cyc_p"),
                      iread("gen_cycle", mref("port_q"), "cyc_q"),
                      iread("gen_params", mref("port_p"), "par_p"),
                      iread("gen_params", mref("port_q"), "par_q"),
                      iread("det_outcome", mref("det"), "out_d"),
                      iset("msg", "msg_type", cval(0x03, 8)),
                      Instruction{AddHeader{"reply"}},
                      iset("reply", "cycle", mref("cyc_p")),
                      iif(lor(ne(mref("cyc_p"), mref("cyc_q")),
                              ne(mref("par_p"), mref("par_q"))),
                          {
                              iset("reply", "outcome", cval(0x02, 8)),
                              iset("reply", "pair_seq", cval(0, 32)),
                          },
                          {
                              iif(eq(mref("out_d"), cval(1, 8)),
                                  {
                                      iread(kPairSeqRegister, mref("det"),
                                            "ps"),
                                      imeta("ps", op2(ExprOp::kAdd, mref("ps"),
                                                      cval(1))),
                                      iwrite(kPairSeqRegister, mref("det"),
                                             mref("ps")),
                                      iset("reply", "outcome", cval(0x01, 8)),
                                      iset("reply", "pair_seq", mref("ps")),
                                  },
                                  {
                                      iset("reply", "outcome", cval(0x00, 8)),
                                      iset("reply", "pair_seq", cval(0, 32)),
                                  }),
                          }),
                      iwrite("gen_valid", mref("port_p"), cval(0, 1)),
                      iwrite("gen_valid", mref("port_q"), cval(0, 1)),
                      iwrite("det_valid", mref("det"), cval(0, 1)),
                      Instruction{RemoveHeader{"gen"}},
                      Instruction{RemoveHeader{"det"}},
                      Instruction{Multicast{mref("grp")}},
                  }),
          }),
  };

  std::vector<Instruction> gen_path = {
      Instruction{ApplyTable{kMpTable}},
      iif(eq(mref("cfg_ok"), cval(1, 1)),
          [&] {
            std::vector<Instruction> block = {
                iwrite("gen_cycle", mref("ingress_port"),
                       fref("gen", "cycle")),
                iwrite("gen_slot", mref("ingress_port"),
                       fref("gen", "qubit_slot")),
                iwrite("gen_params", mref("ingress_port"),
                       fref("gen", "attempt_params")),
                iwrite("gen_time", mref("ingress_port"),
                       mref("arrival_time_ns")),
                iwrite("gen_valid", mref("ingress_port"), cval(1, 1)),
            };
            block.insert(block.end(), complete.begin(), complete.end());
            return block;
          }(),
          {Instruction{Drop{}}}),
  };

  std::vector<Instruction> det_path = {
      Instruction{ApplyTable{kDetTable}},
      iif(eq(mref("cfg_ok"), cval(1, 1)),
          [&] {
            std::vector<Instruction> block = {
                iwrite("det_outcome", fref("det", "det_id"),
                       fref("det", "outcome")),
                iwrite("det_bin", fref("det", "det_id"), fref("det", "bin")),
                iwrite("det_valid", fref("det", "det_id"), cval(1, 1)),
            };
            block.insert(block.end(), complete.begin(), complete.end());
            return block;
          }(),
          {Instruction{Drop{}}}),
  };

  p.apply = {
      iif(eq(fref("msg", "msg_type"), cval(0x02, 8)), std::move(gen_path),
          {iif(eq(fref("msg", "msg_type"), cval(0x04, 8)),
               std::move(det_path), {Instruction{Drop{}}})}),
  };
  return p;
}

}  // namespace qherald::mhp

#endif  // QHERALD_MHP_PROGRAMS_HPP_
