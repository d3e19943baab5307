// Copyright 2026 The qherald Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QHERALD_PIPELINE_DEVICE_HPP_
#define QHERALD_PIPELINE_DEVICE_HPP_

#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qherald/bytes.hpp"
#include "qherald/errors.hpp"
#include "qherald/event_engine.hpp"
#include "qherald/pipeline/ir.hpp"
#include "qherald/pipeline/validate.hpp"

namespace qherald::pipeline {

// A packet entering a device. Metadata beyond these two fields starts zeroed.
struct Packet {
  Bytes bytes;
  std::uint16_t ingress_port = 0;
  SimTime arrival_time_ns = 0;
};

struct TrapInfo {
  std::string reason;
  bool operator==(const TrapInfo&) const = default;
};

// Result of one pipeline execution. Exactly one of three shapes: trapped
// (dropped, trap set), dropped cleanly, or one or more egress copies.
struct Disposition {
  std::vector<std::pair<std::uint16_t, Bytes>> copies;
  bool dropped = false;
  std::optional<TrapInfo> trap;
};

// Host callback invoked synchronously by the CallExtern instruction with the
// evaluated argument values.
using ExternFn = std::function<void(std::span<const std::uint64_t>)>;

// Standard metadata fields, addressable from programs as meta.<name>.
inline constexpr const char* kMetaIngressPort = "ingress_port";
inline constexpr const char* kMetaArrivalTime = "arrival_time_ns";
inline constexpr const char* kMetaEgressSpec = "egress_spec";
inline constexpr const char* kMetaMcastGrp = "mcast_grp";

namespace detail {

inline std::uint64_t mask_to(std::uint64_t value, std::uint32_t bits) {
  if (bits >= 64) return value;
  return value & ((std::uint64_t{1} << bits) - 1);
}

inline std::uint32_t minimal_bits(std::uint64_t value) {
  const int w = std::bit_width(value);
  return w == 0 ? 1u : static_cast<std::uint32_t>(w);
}

// Reads `bits` bits starting at `bit_offset`, MSB first.
inline std::uint64_t extract_bits(std::span<const std::uint8_t> data,
                                  std::size_t bit_offset, std::uint32_t bits) {
  std::uint64_t value = 0;
  for (std::uint32_t i = 0; i < bits; ++i) {
    const std::size_t pos = bit_offset + i;
    const std::uint8_t byte = data[pos / 8];
    const std::uint8_t bit = (byte >> (7 - pos % 8)) & 1;
    value = value << 1 | bit;
  }
  return value;
}

// Accumulates MSB-first bit fields into a byte string.
class BitWriter {
 public:
  void append(std::uint64_t value, std::uint32_t bits) {
    for (std::uint32_t i = 0; i < bits; ++i) {
      const std::uint8_t bit =
          static_cast<std::uint8_t>(value >> (bits - 1 - i) & 1);
      if (bit_pos_ % 8 == 0) out_.push_back(0);
      out_.back() = static_cast<std::uint8_t>(out_.back() |
                                              (bit << (7 - bit_pos_ % 8)));
      ++bit_pos_;
    }
  }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
  std::size_t bit_pos_ = 0;
};

}  // namespace detail

// A programmable match-action device: parser, exact-match tables, register
// arrays, externs, and multicast groups, driven by a loaded PipelineProgram.
//
// Execution is pure given (program, table entries, register contents,
// packet): no randomness, no clock access beyond the packet's own arrival
// timestamp. Runtime faults (short packet, out-of-range register index,
// division by zero, unbound extern, unknown multicast group) trap: the
// packet is dropped, the trap counter increments, and state changes made
// before the fault persist.
//
// Field semantics: reading a field of an invalid header yields zero; writing
// one is a trap, since that is almost always a missing AddHeader.
class PipelineDevice {
 public:
  explicit PipelineDevice(std::string name = "device")
      : name_(std::move(name)) {}

  const std::string& name() const { return name_; }

  // Installs `program` after validation. Throws ProgramError listing every
  // violation. On success all tables are empty with their declared defaults
  // and all registers are zero; multicast groups and extern bindings are
  // device-level state and survive a reload.
  void load_program(PipelineProgram program) {
    auto issues = validate_program(program);
    if (!issues.empty()) {
      throw ProgramError(std::move(issues));
    }
    program_ = std::move(program);
    build_indices();
  }

  bool has_program() const { return program_.has_value(); }
  const PipelineProgram& program() const {
    require_program();
    return *program_;
  }

  // --- Control plane -------------------------------------------------------

  void install_entry(const std::string& table,
                     const std::vector<std::uint64_t>& key,
                     const ActionCall& call) {
    TableState& ts = table_state(table);
    check_key_shape(table, ts, key);
    check_action_call(table, ts, call);
    if (!ts.entries.emplace(key, call).second) {
      throw TableError(TableError::Kind::kDuplicateKey,
                       "duplicate key in table " + table);
    }
  }

  void remove_entry(const std::string& table,
                    const std::vector<std::uint64_t>& key) {
    TableState& ts = table_state(table);
    if (ts.entries.erase(key) == 0) {
      throw TableError(TableError::Kind::kMissingEntry,
                       "no such entry in table " + table);
    }
  }

  // Replaces the table's default action. Unlike install_entry this is not
  // set-once; re-pointing the default is how runtime reconfiguration works.
  void set_default_action(const std::string& table, const ActionCall& call) {
    TableState& ts = table_state(table);
    check_action_call(table, ts, call);
    ts.default_call = call;
  }

  std::size_t entry_count(const std::string& table) const {
    return const_cast<PipelineDevice*>(this)->table_state(table).entries.size();
  }

  // Group ids are nonzero (zero means "no multicast" in metadata).
  void create_mcast_group(std::uint16_t group,
                          std::vector<std::uint16_t> ports) {
    if (group == 0) {
      throw GroupError("group id 0 is reserved");
    }
    if (ports.empty()) {
      throw GroupError("group " + std::to_string(group) + " has no ports");
    }
    if (!groups_.emplace(group, std::move(ports)).second) {
      throw GroupError("group " + std::to_string(group) + " already exists");
    }
  }

  void bind_extern(const std::string& name, ExternFn fn) {
    externs_[name] = std::move(fn);
  }

  std::uint64_t register_read(const std::string& reg,
                              std::uint64_t index) const {
    const auto [spec, cells] = find_register(reg);
    if (index >= cells->size()) {
      throw RegisterError("index " + std::to_string(index) +
                          " out of range for " + reg);
    }
    return (*cells)[index];
  }

  void register_write(const std::string& reg, std::uint64_t index,
                      std::uint64_t value) {
    const auto [spec, cells] = find_register(reg);
    if (index >= cells->size()) {
      throw RegisterError("index " + std::to_string(index) +
                          " out of range for " + reg);
    }
    if (value > detail::mask_to(~std::uint64_t{0}, spec->bits)) {
      throw RegisterError("value " + std::to_string(value) +
                          " does not fit " + std::to_string(spec->bits) +
                          " bits in " + reg);
    }
    const_cast<std::vector<std::uint64_t>&>(*cells)[index] = value;
  }

  std::uint64_t trap_count() const { return trap_count_; }
  const std::string& last_trap_reason() const { return last_trap_; }

  // --- Data plane -----------------------------------------------------------

  Disposition execute(const Packet& packet) {
    require_program();
    ExecCtx ctx;
    ctx.headers.resize(program_->headers.size());
    for (std::size_t i = 0; i < program_->headers.size(); ++i) {
      ctx.headers[i].fields.assign(program_->headers[i].fields.size(), 0);
    }
    ctx.meta.assign(program_->meta.size(), 0);
    ctx.ingress_port = packet.ingress_port;
    ctx.arrival_time = packet.arrival_time_ns;
    ctx.packet = &packet;
    try {
      parse(ctx);
      exec_block(ctx, program_->apply);
      return finish(ctx);
    } catch (const TrapSignal& trap) {
      ++trap_count_;
      last_trap_ = trap.reason;
      Disposition d;
      d.dropped = true;
      d.trap = TrapInfo{trap.reason};
      return d;
    }
  }

 private:
  struct TrapSignal {
    std::string reason;
  };

  struct TableState {
    const TableSpec* spec = nullptr;
    std::vector<std::uint32_t> key_bits;
    std::map<std::vector<std::uint64_t>, ActionCall> entries;
    ActionCall default_call;
  };

  struct FieldLoc {
    enum class Kind {
      kHeader,
      kUserMeta,
      kIngressPort,
      kArrivalTime,
      kEgressSpec,
      kMcastGrp,
    };
    Kind kind = Kind::kHeader;
    std::size_t header = 0;
    std::size_t field = 0;
    std::size_t meta = 0;
    std::uint32_t bits = 0;
  };

  struct HeaderState {
    bool valid = false;
    std::vector<std::uint64_t> fields;
  };

  struct ExecCtx {
    std::vector<HeaderState> headers;
    std::vector<std::uint64_t> meta;
    std::uint16_t ingress_port = 0;
    SimTime arrival_time = 0;
    std::uint16_t egress = kNoPort;
    std::uint16_t mcast = 0;
    bool drop = false;
    std::size_t payload_offset = 0;  // bytes consumed by the parser
    const Packet* packet = nullptr;
    const ActionSpec* frame = nullptr;  // current action declaration
    const std::vector<std::uint64_t>* frame_params = nullptr;
  };

  struct Val {
    std::uint64_t v = 0;
    std::uint32_t w = 0;
  };

  void require_program() const {
    if (!program_) {
      throw SimError("device " + name_ + " has no program loaded");
    }
  }

  void build_indices() {
    header_index_.clear();
    field_locs_.clear();
    action_index_.clear();
    state_index_.clear();
    tables_.clear();
    register_index_.clear();
    register_cells_.clear();

    for (std::size_t h = 0; h < program_->headers.size(); ++h) {
      const auto& hdr = program_->headers[h];
      header_index_[hdr.name] = h;
      for (std::size_t f = 0; f < hdr.fields.size(); ++f) {
        FieldLoc loc;
        loc.kind = FieldLoc::Kind::kHeader;
        loc.header = h;
        loc.field = f;
        loc.bits = hdr.fields[f].bits;
        field_locs_[hdr.name + "." + hdr.fields[f].name] = loc;
      }
    }
    for (std::size_t m = 0; m < program_->meta.size(); ++m) {
      FieldLoc loc;
      loc.kind = FieldLoc::Kind::kUserMeta;
      loc.meta = m;
      loc.bits = program_->meta[m].bits;
      field_locs_[std::string(kMetaScope) + "." + program_->meta[m].name] =
          loc;
    }
    const auto std_meta = [&](const char* name, FieldLoc::Kind kind,
                              std::uint32_t bits) {
      FieldLoc loc;
      loc.kind = kind;
      loc.bits = bits;
      field_locs_[std::string(kMetaScope) + "." + name] = loc;
    };
    std_meta(kMetaIngressPort, FieldLoc::Kind::kIngressPort, 16);
    std_meta(kMetaArrivalTime, FieldLoc::Kind::kArrivalTime, 64);
    std_meta(kMetaEgressSpec, FieldLoc::Kind::kEgressSpec, 16);
    std_meta(kMetaMcastGrp, FieldLoc::Kind::kMcastGrp, 16);

    for (const auto& a : program_->actions) {
      action_index_[a.name] = &a;
    }
    for (const auto& s : program_->parser.states) {
      state_index_[s.name] = &s;
    }
    for (const auto& t : program_->tables) {
      TableState ts;
      ts.spec = &t;
      for (const auto& k : t.key) {
        ts.key_bits.push_back(loc_of(k).bits);
      }
      ts.default_call = t.default_action;
      tables_.emplace(t.name, std::move(ts));
    }
    for (const auto& r : program_->registers) {
      register_index_[r.name] = &r;
      register_cells_[r.name].assign(r.count, 0);
    }
  }

  const FieldLoc& loc_of(const FieldRef& ref) const {
    return field_locs_.at(ref.header + "." + ref.field);
  }

  TableState& table_state(const std::string& table) {
    require_program();
    auto it = tables_.find(table);
    if (it == tables_.end()) {
      throw TableError(TableError::Kind::kUnknownTable,
                       "unknown table " + table);
    }
    return it->second;
  }

  void check_key_shape(const std::string& table, const TableState& ts,
                       const std::vector<std::uint64_t>& key) const {
    if (key.size() != ts.key_bits.size()) {
      throw TableError(TableError::Kind::kKeyShape,
                       "table " + table + " key has " +
                           std::to_string(ts.key_bits.size()) +
                           " fields, got " + std::to_string(key.size()));
    }
    for (std::size_t i = 0; i < key.size(); ++i) {
      if (key[i] > detail::mask_to(~std::uint64_t{0}, ts.key_bits[i])) {
        throw TableError(TableError::Kind::kKeyShape,
                         "key value " + std::to_string(key[i]) +
                             " does not fit " +
                             std::to_string(ts.key_bits[i]) + " bits");
      }
    }
  }

  void check_action_call(const std::string& table, const TableState& ts,
                         const ActionCall& call) const {
    bool permitted = false;
    for (const auto& a : ts.spec->actions) {
      if (a == call.action) permitted = true;
    }
    if (!permitted) {
      throw TableError(TableError::Kind::kUnknownAction,
                       "action " + call.action + " not permitted by table " +
                           table);
    }
    const ActionSpec* decl = action_index_.at(call.action);
    if (call.params.size() != decl->params.size()) {
      throw TableError(TableError::Kind::kParamShape,
                       "action " + call.action + " takes " +
                           std::to_string(decl->params.size()) +
                           " parameters, got " +
                           std::to_string(call.params.size()));
    }
    for (std::size_t i = 0; i < call.params.size(); ++i) {
      if (call.params[i] >
          detail::mask_to(~std::uint64_t{0}, decl->params[i].bits)) {
        throw TableError(TableError::Kind::kParamShape,
                         "parameter " + decl->params[i].name + " value " +
                             std::to_string(call.params[i]) +
                             " does not fit " +
                             std::to_string(decl->params[i].bits) + " bits");
      }
    }
  }

  std::pair<const RegisterSpec*, const std::vector<std::uint64_t>*>
  find_register(const std::string& reg) const {
    require_program();
    auto it = register_index_.find(reg);
    if (it == register_index_.end()) {
      throw RegisterError("unknown register " + reg);
    }
    return {it->second, &register_cells_.at(reg)};
  }

  // --- Parser ---------------------------------------------------------------

  void parse(ExecCtx& ctx) {
    std::size_t bit_offset = 0;
    const std::span<const std::uint8_t> data(ctx.packet->bytes);
    std::string state_name = program_->parser.start;
    while (state_name != kAcceptState) {
      const ParserState* state = state_index_.at(state_name);
      for (const auto& hdr_name : state->extracts) {
        const std::size_t h = header_index_.at(hdr_name);
        const HeaderSpec& spec = program_->headers[h];
        if (bit_offset + spec.total_bits() > data.size() * 8) {
          throw TrapSignal{"packet too short for header " + hdr_name};
        }
        HeaderState& hs = ctx.headers[h];
        hs.valid = true;
        for (std::size_t f = 0; f < spec.fields.size(); ++f) {
          hs.fields[f] =
              detail::extract_bits(data, bit_offset, spec.fields[f].bits);
          bit_offset += spec.fields[f].bits;
        }
      }
      if (!state->select) break;
      const Val on = read_field(ctx, loc_of(state->select->on));
      state_name = state->select->default_next;
      for (const auto& c : state->select->cases) {
        if (c.value == on.v) {
          state_name = c.next;
          break;
        }
      }
    }
    ctx.payload_offset = bit_offset / 8;  // headers are byte aligned
  }

  // --- Expression evaluation ------------------------------------------------

  Val read_field(const ExecCtx& ctx, const FieldLoc& loc) const {
    switch (loc.kind) {
      case FieldLoc::Kind::kHeader: {
        const HeaderState& hs = ctx.headers[loc.header];
        return {hs.valid ? hs.fields[loc.field] : 0, loc.bits};
      }
      case FieldLoc::Kind::kUserMeta:
        return {ctx.meta[loc.meta], loc.bits};
      case FieldLoc::Kind::kIngressPort:
        return {ctx.ingress_port, 16};
      case FieldLoc::Kind::kArrivalTime:
        return {ctx.arrival_time, 64};
      case FieldLoc::Kind::kEgressSpec:
        return {ctx.egress, 16};
      case FieldLoc::Kind::kMcastGrp:
        return {ctx.mcast, 16};
    }
    return {};
  }

  void write_field(ExecCtx& ctx, const FieldRef& ref, std::uint64_t value) {
    const FieldLoc& loc = loc_of(ref);
    const std::uint64_t masked = detail::mask_to(value, loc.bits);
    switch (loc.kind) {
      case FieldLoc::Kind::kHeader: {
        HeaderState& hs = ctx.headers[loc.header];
        if (!hs.valid) {
          throw TrapSignal{"write to field of invalid header " + ref.header};
        }
        hs.fields[loc.field] = masked;
        return;
      }
      case FieldLoc::Kind::kUserMeta:
        ctx.meta[loc.meta] = masked;
        return;
      case FieldLoc::Kind::kIngressPort:
        ctx.ingress_port = static_cast<std::uint16_t>(masked);
        return;
      case FieldLoc::Kind::kArrivalTime:
        ctx.arrival_time = masked;
        return;
      case FieldLoc::Kind::kEgressSpec:
        ctx.egress = static_cast<std::uint16_t>(masked);
        return;
      case FieldLoc::Kind::kMcastGrp:
        ctx.mcast = static_cast<std::uint16_t>(masked);
        return;
    }
  }

  Val eval(const ExecCtx& ctx, const Expr& e) const {
    switch (e.op) {
      case ExprOp::kConst:
        return {e.value, e.bits ? e.bits : detail::minimal_bits(e.value)};
      case ExprOp::kField:
        return read_field(ctx, loc_of(e.field));
      case ExprOp::kParam: {
        for (std::size_t i = 0; i < ctx.frame->params.size(); ++i) {
          if (ctx.frame->params[i].name == e.param) {
            return {(*ctx.frame_params)[i], ctx.frame->params[i].bits};
          }
        }
        throw TrapSignal{"unknown action parameter " + e.param};
      }
      case ExprOp::kLogNot: {
        const Val a = eval(ctx, e.args[0]);
        return {a.v == 0 ? std::uint64_t{1} : 0, 1};
      }
      case ExprOp::kBitNot: {
        const Val a = eval(ctx, e.args[0]);
        return {detail::mask_to(~a.v, a.w), a.w};
      }
      default:
        break;
    }
    const Val l = eval(ctx, e.args[0]);
    const Val r = eval(ctx, e.args[1]);
    const std::uint32_t w = l.w > r.w ? l.w : r.w;
    switch (e.op) {
      case ExprOp::kAdd:
        return {detail::mask_to(l.v + r.v, w), w};
      case ExprOp::kSub:
        return {detail::mask_to(l.v - r.v, w), w};
      case ExprOp::kMul:
        return {detail::mask_to(l.v * r.v, w), w};
      case ExprOp::kDiv:
        if (r.v == 0) throw TrapSignal{"division by zero"};
        return {l.v / r.v, w};
      case ExprOp::kMod:
        if (r.v == 0) throw TrapSignal{"modulo by zero"};
        return {l.v % r.v, w};
      case ExprOp::kBitAnd:
        return {l.v & r.v, w};
      case ExprOp::kBitOr:
        return {l.v | r.v, w};
      case ExprOp::kBitXor:
        return {l.v ^ r.v, w};
      case ExprOp::kShl:
        return {r.v >= 64 ? 0 : detail::mask_to(l.v << r.v, l.w), l.w};
      case ExprOp::kShr:
        return {r.v >= 64 ? 0 : l.v >> r.v, l.w};
      case ExprOp::kEq:
        return {l.v == r.v ? std::uint64_t{1} : 0, 1};
      case ExprOp::kNe:
        return {l.v != r.v ? std::uint64_t{1} : 0, 1};
      case ExprOp::kLt:
        return {l.v < r.v ? std::uint64_t{1} : 0, 1};
      case ExprOp::kLe:
        return {l.v <= r.v ? std::uint64_t{1} : 0, 1};
      case ExprOp::kGt:
        return {l.v > r.v ? std::uint64_t{1} : 0, 1};
      case ExprOp::kGe:
        return {l.v >= r.v ? std::uint64_t{1} : 0, 1};
      case ExprOp::kLogAnd:
        return {l.v != 0 && r.v != 0 ? std::uint64_t{1} : 0, 1};
      case ExprOp::kLogOr:
        return {l.v != 0 || r.v != 0 ? std::uint64_t{1} : 0, 1};
      default:
        throw TrapSignal{"unhandled operator"};
    }
  }

  // --- Instruction execution -------------------------------------------------

  void exec_block(ExecCtx& ctx, const std::vector<Instruction>& block) {
    for (const auto& instr : block) {
      exec_instr(ctx, instr);
    }
  }

  void exec_instr(ExecCtx& ctx, const Instruction& instr) {
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, ApplyTable>) {
            apply_table(ctx, tables_.at(node.table));
          } else if constexpr (std::is_same_v<T, IfElse>) {
            if (eval(ctx, node.cond).v != 0) {
              exec_block(ctx, node.then_block);
            } else {
              exec_block(ctx, node.else_block);
            }
          } else if constexpr (std::is_same_v<T, SetField>) {
            write_field(ctx, node.dest, eval(ctx, node.value).v);
          } else if constexpr (std::is_same_v<T, RegRead>) {
            const auto& spec = *register_index_.at(node.reg);
            auto& cells = register_cells_.at(node.reg);
            const std::uint64_t idx = eval(ctx, node.index).v;
            if (idx >= cells.size()) {
              throw TrapSignal{"register " + node.reg + " index " +
                               std::to_string(idx) + " out of range (" +
                               std::to_string(cells.size()) + " cells)"};
            }
            (void)spec;
            write_field(ctx, node.dest, cells[idx]);
          } else if constexpr (std::is_same_v<T, RegWrite>) {
            const auto& spec = *register_index_.at(node.reg);
            auto& cells = register_cells_.at(node.reg);
            const std::uint64_t idx = eval(ctx, node.index).v;
            if (idx >= cells.size()) {
              throw TrapSignal{"register " + node.reg + " index " +
                               std::to_string(idx) + " out of range (" +
                               std::to_string(cells.size()) + " cells)"};
            }
            cells[idx] = detail::mask_to(eval(ctx, node.value).v, spec.bits);
          } else if constexpr (std::is_same_v<T, AddHeader>) {
            HeaderState& hs = ctx.headers[header_index_.at(node.header)];
            if (!hs.valid) {
              hs.valid = true;
              hs.fields.assign(hs.fields.size(), 0);
            }
          } else if constexpr (std::is_same_v<T, RemoveHeader>) {
            ctx.headers[header_index_.at(node.header)].valid = false;
          } else if constexpr (std::is_same_v<T, CallExtern>) {
            auto it = externs_.find(node.name);
            if (it == externs_.end() || !it->second) {
              throw TrapSignal{"extern " + node.name + " not bound"};
            }
            std::vector<std::uint64_t> args;
            args.reserve(node.args.size());
            for (const auto& a : node.args) {
              args.push_back(eval(ctx, a).v);
            }
            it->second(std::span<const std::uint64_t>(args));
          } else if constexpr (std::is_same_v<T, Forward>) {
            ctx.egress =
                static_cast<std::uint16_t>(eval(ctx, node.port).v & 0xFFFF);
          } else if constexpr (std::is_same_v<T, Multicast>) {
            ctx.mcast =
                static_cast<std::uint16_t>(eval(ctx, node.group).v & 0xFFFF);
          } else {
            static_assert(std::is_same_v<T, Drop>);
            ctx.drop = true;
          }
        },
        instr.node);
  }

  void apply_table(ExecCtx& ctx, const TableState& ts) {
    std::vector<std::uint64_t> key;
    key.reserve(ts.spec->key.size());
    for (const auto& k : ts.spec->key) {
      key.push_back(read_field(ctx, loc_of(k)).v);
    }
    auto it = ts.entries.find(key);
    const ActionCall& call =
        it != ts.entries.end() ? it->second : ts.default_call;
    const ActionSpec* decl = action_index_.at(call.action);
    const ActionSpec* saved_frame = ctx.frame;
    const std::vector<std::uint64_t>* saved_params = ctx.frame_params;
    ctx.frame = decl;
    ctx.frame_params = &call.params;
    exec_block(ctx, decl->body);
    ctx.frame = saved_frame;
    ctx.frame_params = saved_params;
  }

  // --- Deparser and disposition ----------------------------------------------

  Bytes deparse(const ExecCtx& ctx) const {
    detail::BitWriter writer;
    for (std::size_t h = 0; h < program_->headers.size(); ++h) {
      const HeaderState& hs = ctx.headers[h];
      if (!hs.valid) continue;
      const HeaderSpec& spec = program_->headers[h];
      for (std::size_t f = 0; f < spec.fields.size(); ++f) {
        writer.append(hs.fields[f], spec.fields[f].bits);
      }
    }
    Bytes out = writer.take();
    out.insert(out.end(), ctx.packet->bytes.begin() +
                              static_cast<std::ptrdiff_t>(ctx.payload_offset),
               ctx.packet->bytes.end());
    return out;
  }

  Disposition finish(ExecCtx& ctx) {
    Disposition d;
    if (ctx.drop) {
      d.dropped = true;
      return d;
    }
    if (ctx.mcast != 0) {
      auto it = groups_.find(ctx.mcast);
      if (it == groups_.end()) {
        throw TrapSignal{"unknown multicast group " +
                         std::to_string(ctx.mcast)};
      }
      const Bytes out = deparse(ctx);
      for (std::uint16_t port : it->second) {
        d.copies.emplace_back(port, out);
      }
      return d;
    }
    if (ctx.egress != kNoPort) {
      d.copies.emplace_back(ctx.egress, deparse(ctx));
      return d;
    }
    d.dropped = true;
    return d;
  }

  std::string name_;
  std::optional<PipelineProgram> program_;
  std::map<std::string, std::size_t> header_index_;
  std::map<std::string, FieldLoc> field_locs_;
  std::map<std::string, const ActionSpec*> action_index_;
  std::map<std::string, const ParserState*> state_index_;
  std::map<std::string, TableState> tables_;
  std::map<std::string, const RegisterSpec*> register_index_;
  std::map<std::string, std::vector<std::uint64_t>> register_cells_;
  std::map<std::uint16_t, std::vector<std::uint16_t>> groups_;
  std::map<std::string, ExternFn> externs_;
  std::uint64_t trap_count_ = 0;
  std::string last_trap_;
};

}  // namespace qherald::pipeline

#endif  // QHERALD_PIPELINE_DEVICE_HPP_
