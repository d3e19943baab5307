// Copyright 2026 The qherald Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QHERALD_PIPELINE_VALIDATE_HPP_
#define QHERALD_PIPELINE_VALIDATE_HPP_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qherald/errors.hpp"
#include "qherald/pipeline/ir.hpp"

namespace qherald::pipeline {

namespace detail {

// Largest value representable in `bits`, saturating at 64.
inline std::uint64_t max_for_bits(std::uint32_t bits) {
  if (bits >= 64) return ~std::uint64_t{0};
  return (std::uint64_t{1} << bits) - 1;
}

class Validator {
 public:
  explicit Validator(const PipelineProgram& program) : prog_(program) {}

  std::vector<ProgramIssue> run() {
    index_declarations();
    check_headers();
    check_meta();
    check_registers();
    check_parser();
    check_actions();
    check_tables();
    check_externs();
    for (std::size_t i = 0; i < prog_.apply.size(); ++i) {
      check_instruction(prog_.apply[i], "apply[" + std::to_string(i) + "]",
                        nullptr);
    }
    return std::move(issues_);
  }

 private:
  void add(const std::string& location, const std::string& message) {
    issues_.push_back(ProgramIssue{location, message});
  }

  void index_declarations() {
    for (const auto& f : standard_meta()) {
      meta_.emplace(f.name, &f);
    }
    for (const auto& h : prog_.headers) {
      if (h.name == kMetaScope) {
        add("header " + h.name, "header name 'meta' is reserved");
      }
      if (!headers_.emplace(h.name, &h).second) {
        add("header " + h.name, "duplicate header name");
      }
    }
    for (const auto& f : prog_.meta) {
      if (!meta_.emplace(f.name, &f).second) {
        add("meta " + f.name,
            "duplicate or standard metadata field name");
      }
    }
    for (const auto& a : prog_.actions) {
      if (!actions_.emplace(a.name, &a).second) {
        add("action " + a.name, "duplicate action name");
      }
    }
    for (const auto& t : prog_.tables) {
      if (!tables_.emplace(t.name, &t).second) {
        add("table " + t.name, "duplicate table name");
      }
    }
    for (const auto& r : prog_.registers) {
      if (!registers_.emplace(r.name, &r).second) {
        add("register " + r.name, "duplicate register name");
      }
    }
    for (const auto& e : prog_.externs) {
      if (!externs_.insert(e).second) {
        add("extern " + e, "duplicate extern name");
      }
    }
    for (const auto& s : prog_.parser.states) {
      if (s.name == kAcceptState) {
        add("parser state " + s.name, "state name 'accept' is reserved");
      }
      if (!states_.emplace(s.name, &s).second) {
        add("parser state " + s.name, "duplicate state name");
      }
    }
  }

  void check_width(std::uint32_t bits, const std::string& location) {
    if (bits < 1 || bits > 64) {
      add(location, "width " + std::to_string(bits) +
                        " out of range, must be 1..64 bits");
    }
  }

  void check_headers() {
    for (const auto& h : prog_.headers) {
      std::set<std::string> names;
      for (const auto& f : h.fields) {
        if (!names.insert(f.name).second) {
          add("header " + h.name + "." + f.name, "duplicate field name");
        }
        check_width(f.bits, "header " + h.name + "." + f.name);
      }
      if (h.fields.empty()) {
        add("header " + h.name, "header has no fields");
      } else if (h.total_bits() % 8 != 0) {
        add("header " + h.name, "total width " +
                                    std::to_string(h.total_bits()) +
                                    " bits is not byte aligned");
      }
    }
  }

  void check_meta() {
    for (const auto& f : prog_.meta) {
      check_width(f.bits, "meta " + f.name);
    }
  }

  void check_registers() {
    for (const auto& r : prog_.registers) {
      check_width(r.bits, "register " + r.name);
      if (r.count < 1) {
        add("register " + r.name, "register needs at least one cell");
      }
    }
  }

  // Returns the declared width of a field reference, or 0 and an issue if it
  // does not resolve.
  std::uint32_t resolve_field(const FieldRef& ref, const std::string& loc) {
    if (ref.header == kMetaScope) {
      auto it = meta_.find(ref.field);
      if (it == meta_.end()) {
        add(loc, "unknown metadata field meta." + ref.field);
        return 0;
      }
      return it->second->bits;
    }
    auto hit = headers_.find(ref.header);
    if (hit == headers_.end()) {
      add(loc, "unknown header " + ref.header);
      return 0;
    }
    for (const auto& f : hit->second->fields) {
      if (f.name == ref.field) return f.bits;
    }
    add(loc, "unknown field " + ref.header + "." + ref.field);
    return 0;
  }

  void check_parser() {
    const auto& parser = prog_.parser;
    if (parser.start != kAcceptState && !states_.count(parser.start)) {
      add("parser", "unknown start state " + parser.start);
    }
    for (const auto& s : parser.states) {
      const std::string loc = "parser state " + s.name;
      for (const auto& hdr : s.extracts) {
        if (!headers_.count(hdr)) {
          add(loc, "extracts unknown header " + hdr);
        }
      }
      if (!s.select) continue;
      const std::uint32_t width = resolve_field(s.select->on, loc);
      std::set<std::uint64_t> seen;
      for (const auto& c : s.select->cases) {
        if (width > 0 && c.value > max_for_bits(width)) {
          add(loc, "select case value " + std::to_string(c.value) +
                       " does not fit " + std::to_string(width) + " bits");
        }
        if (!seen.insert(c.value).second) {
          add(loc, "duplicate select case value " + std::to_string(c.value));
        }
        if (c.next != kAcceptState && !states_.count(c.next)) {
          add(loc, "select targets unknown state " + c.next);
        }
      }
      if (s.select->default_next != kAcceptState &&
          !states_.count(s.select->default_next)) {
        add(loc, "select default targets unknown state " +
                     s.select->default_next);
      }
    }
    check_parser_terminates();
  }

  // The select graph must be acyclic so parsing always reaches accept.
  void check_parser_terminates() {
    std::map<std::string, int> color;  // 0 unvisited, 1 in stack, 2 done
    bool cyclic = false;
    auto dfs = [&](auto&& self, const std::string& name) -> void {
      if (cyclic || name == kAcceptState) return;
      auto it = states_.find(name);
      if (it == states_.end()) return;
      int& c = color[name];
      if (c == 1) {
        cyclic = true;
        add("parser", "select cycle through state " + name);
        return;
      }
      if (c == 2) return;
      c = 1;
      if (it->second->select) {
        for (const auto& cs : it->second->select->cases) {
          self(self, cs.next);
        }
        self(self, it->second->select->default_next);
      }
      c = 2;
    };
    dfs(dfs, prog_.parser.start);
  }

  void check_actions() {
    for (const auto& a : prog_.actions) {
      std::set<std::string> names;
      for (const auto& p : a.params) {
        if (!names.insert(p.name).second) {
          add("action " + a.name, "duplicate parameter " + p.name);
        }
        check_width(p.bits, "action " + a.name + " param " + p.name);
      }
      for (std::size_t i = 0; i < a.body.size(); ++i) {
        check_instruction(a.body[i],
                          "action " + a.name + " body[" + std::to_string(i) +
                              "]",
                          &a);
      }
    }
  }

  void check_action_call(const ActionCall& call, const TableSpec& table,
                         const std::string& loc) {
    bool permitted = false;
    for (const auto& name : table.actions) {
      if (name == call.action) permitted = true;
    }
    if (!permitted) {
      add(loc, "action " + call.action + " not permitted by table " +
                   table.name);
      return;
    }
    auto it = actions_.find(call.action);
    if (it == actions_.end()) return;  // reported via table action list
    const auto& decl = it->second->params;
    if (call.params.size() != decl.size()) {
      add(loc, "action " + call.action + " takes " +
                   std::to_string(decl.size()) + " parameters, got " +
                   std::to_string(call.params.size()));
      return;
    }
    for (std::size_t i = 0; i < decl.size(); ++i) {
      if (call.params[i] > max_for_bits(decl[i].bits)) {
        add(loc, "parameter " + decl[i].name + " value " +
                     std::to_string(call.params[i]) + " does not fit " +
                     std::to_string(decl[i].bits) + " bits");
      }
    }
  }

  void check_tables() {
    for (const auto& t : prog_.tables) {
      const std::string loc = "table " + t.name;
      if (t.key.empty()) {
        add(loc, "table has no key fields");
      }
      for (const auto& k : t.key) {
        resolve_field(k, loc);
      }
      if (t.actions.empty()) {
        add(loc, "table permits no actions");
      }
      std::set<std::string> names;
      for (const auto& name : t.actions) {
        if (!actions_.count(name)) {
          add(loc, "unknown action " + name);
        }
        if (!names.insert(name).second) {
          add(loc, "duplicate action " + name + " in action list");
        }
      }
      check_action_call(t.default_action, t, loc + " default action");
    }
  }

  void check_externs() {
    for (const auto& e : prog_.externs) {
      if (e.empty()) add("extern", "empty extern name");
    }
  }

  // Returns the width of an expression for constant-fit checks; 0 if it
  // could not be determined (errors already recorded).
  std::uint32_t check_expr(const Expr& e, const std::string& loc,
                           const ActionSpec* scope) {
    switch (e.op) {
      case ExprOp::kConst: {
        if (e.bits > 64) {
          add(loc, "constant width " + std::to_string(e.bits) + " exceeds 64");
          return 64;
        }
        if (e.bits > 0 && e.value > max_for_bits(e.bits)) {
          add(loc, "constant " + std::to_string(e.value) + " does not fit " +
                       std::to_string(e.bits) + " bits");
        }
        if (e.bits > 0) return e.bits;
        std::uint32_t w = 1;
        while (w < 64 && e.value > max_for_bits(w)) ++w;
        return w;
      }
      case ExprOp::kField:
        return resolve_field(e.field, loc);
      case ExprOp::kParam: {
        if (scope == nullptr) {
          add(loc, "parameter " + e.param + " referenced outside an action");
          return 0;
        }
        for (const auto& p : scope->params) {
          if (p.name == e.param) return p.bits;
        }
        add(loc, "unknown parameter " + e.param);
        return 0;
      }
      case ExprOp::kLogNot: {
        if (e.args.size() != 1) {
          add(loc, "logical not takes one operand");
          return 1;
        }
        check_expr(e.args[0], loc, scope);
        return 1;
      }
      case ExprOp::kBitNot: {
        if (e.args.size() != 1) {
          add(loc, "bitwise not takes one operand");
          return 0;
        }
        return check_expr(e.args[0], loc, scope);
      }
      default: {
        if (e.args.size() != 2) {
          add(loc, "binary operator takes two operands");
          return 0;
        }
        const std::uint32_t lw = check_expr(e.args[0], loc, scope);
        const std::uint32_t rw = check_expr(e.args[1], loc, scope);
        switch (e.op) {
          case ExprOp::kEq:
          case ExprOp::kNe:
          case ExprOp::kLt:
          case ExprOp::kLe:
          case ExprOp::kGt:
          case ExprOp::kGe:
          case ExprOp::kLogAnd:
          case ExprOp::kLogOr:
            return 1;
          case ExprOp::kShl:
          case ExprOp::kShr:
            return lw;
          default:
            return lw > rw ? lw : rw;
        }
      }
    }
  }

  void check_instruction(const Instruction& instr, const std::string& loc,
                         const ActionSpec* scope) {
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, ApplyTable>) {
            if (scope != nullptr) {
              add(loc, "table apply is not allowed inside an action body");
            }
            if (!tables_.count(node.table)) {
              add(loc, "unknown table " + node.table);
            }
          } else if constexpr (std::is_same_v<T, IfElse>) {
            check_expr(node.cond, loc + " cond", scope);
            for (std::size_t i = 0; i < node.then_block.size(); ++i) {
              check_instruction(node.then_block[i],
                                loc + ".then[" + std::to_string(i) + "]",
                                scope);
            }
            for (std::size_t i = 0; i < node.else_block.size(); ++i) {
              check_instruction(node.else_block[i],
                                loc + ".else[" + std::to_string(i) + "]",
                                scope);
            }
          } else if constexpr (std::is_same_v<T, SetField>) {
            const std::uint32_t dest_w = resolve_field(node.dest, loc);
            check_expr(node.value, loc, scope);
            if (dest_w > 0 && node.value.op == ExprOp::kConst &&
                node.value.value > max_for_bits(dest_w)) {
              add(loc, "constant " + std::to_string(node.value.value) +
                           " does not fit destination " + node.dest.header +
                           "." + node.dest.field + " (" +
                           std::to_string(dest_w) + " bits)");
            }
          } else if constexpr (std::is_same_v<T, RegRead>) {
            auto it = registers_.find(node.reg);
            if (it == registers_.end()) {
              add(loc, "unknown register " + node.reg);
            }
            check_expr(node.index, loc + " index", scope);
            if (node.dest.header != kMetaScope) {
              add(loc, "register read destination must be a metadata field");
            }
            const std::uint32_t dest_w = resolve_field(node.dest, loc);
            if (it != registers_.end() && dest_w > 0 &&
                it->second->bits > dest_w) {
              add(loc, "register " + node.reg + " cells are " +
                           std::to_string(it->second->bits) +
                           " bits, wider than destination (" +
                           std::to_string(dest_w) + " bits)");
            }
          } else if constexpr (std::is_same_v<T, RegWrite>) {
            auto it = registers_.find(node.reg);
            if (it == registers_.end()) {
              add(loc, "unknown register " + node.reg);
            }
            check_expr(node.index, loc + " index", scope);
            check_expr(node.value, loc + " value", scope);
            if (it != registers_.end() && node.value.op == ExprOp::kConst &&
                node.value.value > max_for_bits(it->second->bits)) {
              add(loc, "constant " + std::to_string(node.value.value) +
                           " does not fit register " + node.reg + " (" +
                           std::to_string(it->second->bits) + " bits)");
            }
          } else if constexpr (std::is_same_v<T, AddHeader> ||
                               std::is_same_v<T, RemoveHeader>) {
            if (!headers_.count(node.header)) {
              add(loc, "unknown header " + node.header);
            }
          } else if constexpr (std::is_same_v<T, CallExtern>) {
            if (!externs_.count(node.name)) {
              add(loc, "undeclared extern " + node.name);
            }
            for (const auto& a : node.args) {
              check_expr(a, loc + " arg", scope);
            }
          } else if constexpr (std::is_same_v<T, Forward>) {
            check_expr(node.port, loc, scope);
          } else if constexpr (std::is_same_v<T, Multicast>) {
            check_expr(node.group, loc, scope);
          } else {
            static_assert(std::is_same_v<T, Drop>);
          }
        },
        instr.node);
  }

  const PipelineProgram& prog_;
  std::vector<ProgramIssue> issues_;
  std::map<std::string, const HeaderSpec*> headers_;
  std::map<std::string, const FieldSpec*> meta_;
  std::map<std::string, const ActionSpec*> actions_;
  std::map<std::string, const TableSpec*> tables_;
  std::map<std::string, const RegisterSpec*> registers_;
  std::map<std::string, const ParserState*> states_;
  std::set<std::string> externs_;
};

}  // namespace detail

// Checks a program against every static rule: unique names, resolvable
// references, terminating parser, byte-aligned headers, width consistency,
// well-formed default actions, and no table applies inside action bodies.
// Returns all issues found; an empty vector means the program is loadable.
inline std::vector<ProgramIssue> validate_program(
    const PipelineProgram& program) {
  return detail::Validator(program).run();
}

}  // namespace qherald::pipeline

#endif  // QHERALD_PIPELINE_VALIDATE_HPP_
