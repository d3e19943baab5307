// Copyright 2026 The qherald Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QHERALD_PIPELINE_IR_HPP_
#define QHERALD_PIPELINE_IR_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace qherald::pipeline {

// Egress sentinel: no unicast port chosen.
inline constexpr std::uint16_t kNoPort = 0xFFFF;
// Port 0 is the host/CPU port by convention on every device.
inline constexpr std::uint16_t kCpuPort = 0;

// Reference to a field, either `header.field` or `meta.field`. The reserved
// header name "meta" addresses packet metadata.
struct FieldRef {
  std::string header;
  std::string field;
  bool operator==(const FieldRef&) const = default;
};

inline constexpr const char* kMetaScope = "meta";

// ---------------------------------------------------------------------------
// Expressions
//
// Values are unsigned bit strings of declared width (1..64). Arithmetic
// wraps: each operator's result is truncated to the width of its node, which
// is the wider of its operand widths. Comparisons and logical operators
// yield a 1-bit value. Shifts keep the left operand's width; shifting by the
// width or more yields zero. Division or modulo by zero is a runtime trap.
// ---------------------------------------------------------------------------

enum class ExprOp {
  kConst,
  kField,
  kParam,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kMod,
  kBitAnd,
  kBitOr,
  kBitXor,
  kShl,
  kShr,
  kEq,
  kNe,
  kLt,
  kLe,
  kGt,
  kGe,
  kLogAnd,
  kLogOr,
  kLogNot,
  kBitNot,
};

struct Expr {
  ExprOp op = ExprOp::kConst;
  std::uint64_t value = 0;   // kConst only
  std::uint32_t bits = 0;    // kConst only; 0 means minimal width
  FieldRef field;            // kField only
  std::string param;         // kParam only
  std::vector<Expr> args;    // operator operands
  bool operator==(const Expr&) const = default;
};

inline Expr cval(std::uint64_t value, std::uint32_t bits = 0) {
  Expr e;
  e.op = ExprOp::kConst;
  e.value = value;
  e.bits = bits;
  return e;
}

inline Expr fref(std::string header, std::string field) {
  Expr e;
  e.op = ExprOp::kField;
  e.field = FieldRef{std::move(header), std::move(field)};
  return e;
}

inline Expr mref(std::string field) { return fref(kMetaScope, std::move(field)); }

inline Expr pref(std::string name) {
  Expr e;
  e.op = ExprOp::kParam;
  e.param = std::move(name);
  return e;
}

inline Expr op1(ExprOp op, Expr a) {
  Expr e;
  e.op = op;
  e.args.push_back(std::move(a));
  return e;
}

inline Expr op2(ExprOp op, Expr a, Expr b) {
  Expr e;
  e.op = op;
  e.args.push_back(std::move(a));
  e.args.push_back(std::move(b));
  return e;
}

// ---------------------------------------------------------------------------
// Instructions
// ---------------------------------------------------------------------------

struct Instruction;

// Runs the named table's matched (or default) action. Only legal in the
// apply block, not inside action bodies.
struct ApplyTable {
  std::string table;
  bool operator==(const ApplyTable&) const = default;
};

struct IfElse {
  Expr cond;
  std::vector<Instruction> then_block;
  std::vector<Instruction> else_block;
  bool operator==(const IfElse&) const = default;
};

struct SetField {
  FieldRef dest;
  Expr value;
  bool operator==(const SetField&) const = default;
};

// Reads register[index] into a metadata field.
struct RegRead {
  std::string reg;
  Expr index;
  FieldRef dest;
  bool operator==(const RegRead&) const = default;
};

struct RegWrite {
  std::string reg;
  Expr index;
  Expr value;
  bool operator==(const RegWrite&) const = default;
};

// Marks a header valid with zeroed fields; no-op if already valid.
struct AddHeader {
  std::string header;
  bool operator==(const AddHeader&) const = default;
};

// Marks a header invalid; no-op if already invalid.
struct RemoveHeader {
  std::string header;
  bool operator==(const RemoveHeader&) const = default;
};

// Invokes a host-registered callback synchronously with evaluated arguments.
struct CallExtern {
  std::string name;
  std::vector<Expr> args;
  bool operator==(const CallExtern&) const = default;
};

struct Forward {
  Expr port;
  bool operator==(const Forward&) const = default;
};

struct Multicast {
  Expr group;
  bool operator==(const Multicast&) const = default;
};

struct Drop {
  bool operator==(const Drop&) const = default;
};

using InstrNode = std::variant<ApplyTable, IfElse, SetField, RegRead, RegWrite,
                               AddHeader, RemoveHeader, CallExtern, Forward,
                               Multicast, Drop>;

struct Instruction {
  InstrNode node;
  bool operator==(const Instruction&) const = default;
};

// ---------------------------------------------------------------------------
// Program structure
// ---------------------------------------------------------------------------

struct FieldSpec {
  std::string name;
  std::uint32_t bits = 0;
  bool operator==(const FieldSpec&) const = default;
};

// Metadata fields every program gets without declaring them. ingress_port
// and arrival_time_ns are set by the device on entry; egress_spec and
// mcast_grp hold the pending disposition (Forward and Multicast write them).
inline const std::vector<FieldSpec>& standard_meta() {
  static const std::vector<FieldSpec> fields = {
      {"ingress_port", 16},
      {"arrival_time_ns", 64},
      {"egress_spec", 16},
      {"mcast_grp", 16},
  };
  return fields;
}

struct HeaderSpec {
  std::string name;
  std::vector<FieldSpec> fields;
  bool operator==(const HeaderSpec&) const = default;

  std::uint32_t total_bits() const {
    std::uint32_t sum = 0;
    for (const auto& f : fields) sum += f.bits;
    return sum;
  }
};

struct SelectCase {
  std::uint64_t value = 0;
  std::string next;
  bool operator==(const SelectCase&) const = default;
};

// Terminal state name: finishes parsing and hands off to the apply block.
inline constexpr const char* kAcceptState = "accept";

struct SelectSpec {
  FieldRef on;
  std::vector<SelectCase> cases;
  std::string default_next = kAcceptState;
  bool operator==(const SelectSpec&) const = default;
};

struct ParserState {
  std::string name;
  std::vector<std::string> extracts;
  std::optional<SelectSpec> select;  // absent: accept
  bool operator==(const ParserState&) const = default;
};

struct ParserSpec {
  std::string start;
  std::vector<ParserState> states;
  bool operator==(const ParserSpec&) const = default;
};

struct ActionSpec {
  std::string name;
  std::vector<FieldSpec> params;
  std::vector<Instruction> body;
  bool operator==(const ActionSpec&) const = default;
};

struct ActionCall {
  std::string action;
  std::vector<std::uint64_t> params;
  bool operator==(const ActionCall&) const = default;
};

struct TableSpec {
  std::string name;
  std::vector<FieldRef> key;
  std::vector<std::string> actions;
  ActionCall default_action;
  bool operator==(const TableSpec&) const = default;
};

struct RegisterSpec {
  std::string name;
  std::uint32_t bits = 0;
  std::uint32_t count = 0;
  bool operator==(const RegisterSpec&) const = default;
};

struct PipelineProgram {
  std::string name;
  std::vector<HeaderSpec> headers;
  std::vector<FieldSpec> meta;
  ParserSpec parser;
  std::vector<ActionSpec> actions;
  std::vector<TableSpec> tables;
  std::vector<RegisterSpec> registers;
  std::vector<std::string> externs;
  std::vector<Instruction> apply;
  bool operator==(const PipelineProgram&) const = default;
};

}  // namespace qherald::pipeline

#endif  // QHERALD_PIPELINE_IR_HPP_
