// Copyright 2026 The qherald Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QHERALD_PIPELINE_DOCUMENT_HPP_
#define QHERALD_PIPELINE_DOCUMENT_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qherald/errors.hpp"
#include "qherald/pipeline/ir.hpp"

namespace qherald::pipeline {

// Programs have a JSON document form so they can live in files and be
// diffed against the built-in builders. The schema is strict: unknown keys
// are rejected, which catches typos early.
//
// Expression encoding:
//   5                      constant of minimal width
//   {"const": 5, "bits": 8} constant of explicit width
//   "hdr.field"            field reference ("meta.x" for metadata)
//   "name"                 action parameter reference (no dot)
//   {"add": [a, b]}        operators; see op_name below
//
// Instruction encoding: {"op": "...", ...} objects, one per instruction.

namespace doc_detail {

using Json = nlohmann::ordered_json;

inline void expect_keys(const Json& j, const std::vector<std::string>& known,
                        const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const auto& k : known) {
      if (key == k) ok = true;
    }
    if (!ok) {
      throw ParseError("unknown key '" + key + "' in " + where);
    }
  }
}

inline const Json& need(const Json& j, const std::string& key,
                        const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw ParseError("missing key '" + key + "' in " + where);
  }
  return *it;
}

inline const char* op_name(ExprOp op) {
  switch (op) {
    case ExprOp::kAdd: return "add";
    case ExprOp::kSub: return "sub";
    case ExprOp::kMul: return "mul";
    case ExprOp::kDiv: return "div";
    case ExprOp::kMod: return "mod";
    case ExprOp::kBitAnd: return "band";
    case ExprOp::kBitOr: return "bor";
    case ExprOp::kBitXor: return "bxor";
    case ExprOp::kShl: return "shl";
    case ExprOp::kShr: return "shr";
    case ExprOp::kEq: return "eq";
    case ExprOp::kNe: return "ne";
    case ExprOp::kLt: return "lt";
    case ExprOp::kLe: return "le";
    case ExprOp::kGt: return "gt";
    case ExprOp::kGe: return "ge";
    case ExprOp::kLogAnd: return "and";
    case ExprOp::kLogOr: return "or";
    case ExprOp::kLogNot: return "not";
    case ExprOp::kBitNot: return "bnot";
    default: return nullptr;
  }
}

inline bool op_from_name(const std::string& name, ExprOp& out) {
  static const std::vector<std::pair<std::string, ExprOp>> table = {
      {"add", ExprOp::kAdd},    {"sub", ExprOp::kSub},
      {"mul", ExprOp::kMul},    {"div", ExprOp::kDiv},
      {"mod", ExprOp::kMod},    {"band", ExprOp::kBitAnd},
      {"bor", ExprOp::kBitOr},  {"bxor", ExprOp::kBitXor},
      {"shl", ExprOp::kShl},    {"shr", ExprOp::kShr},
      {"eq", ExprOp::kEq},      {"ne", ExprOp::kNe},
      {"lt", ExprOp::kLt},      {"le", ExprOp::kLe},
      {"gt", ExprOp::kGt},      {"ge", ExprOp::kGe},
      {"and", ExprOp::kLogAnd}, {"or", ExprOp::kLogOr},
      {"not", ExprOp::kLogNot}, {"bnot", ExprOp::kBitNot},
  };
  for (const auto& [n, op] : table) {
    if (n == name) {
      out = op;
      return true;
    }
  }
  return false;
}

inline FieldRef field_ref_from_string(const std::string& text,
                                      const std::string& where) {
  const auto dot = text.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == text.size()) {
    throw ParseError("expected 'header.field' reference in " + where +
                     ", got '" + text + "'");
  }
  return FieldRef{text.substr(0, dot), text.substr(dot + 1)};
}

inline std::string field_ref_to_string(const FieldRef& ref) {
  return ref.header + "." + ref.field;
}

inline Json expr_to_json(const Expr& e) {
  switch (e.op) {
    case ExprOp::kConst:
      if (e.bits == 0) return e.value;
      return Json{{"const", e.value}, {"bits", e.bits}};
    case ExprOp::kField:
      return field_ref_to_string(e.field);
    case ExprOp::kParam:
      return e.param;
    default: {
      Json args = Json::array();
      for (const auto& a : e.args) args.push_back(expr_to_json(a));
      return Json{{op_name(e.op), std::move(args)}};
    }
  }
}

inline Expr expr_from_json(const Json& j, const std::string& where) {
  if (j.is_number_unsigned()) {
    return cval(j.get<std::uint64_t>());
  }
  if (j.is_number()) {
    throw ParseError("expression constants must be unsigned in " + where);
  }
  if (j.is_string()) {
    const std::string text = j.get<std::string>();
    if (text.find('.') != std::string::npos) {
      const FieldRef ref = field_ref_from_string(text, where);
      return fref(ref.header, ref.field);
    }
    return pref(text);
  }
  if (!j.is_object() || j.size() == 0) {
    throw ParseError("malformed expression in " + where);
  }
  if (j.contains("const")) {
    expect_keys(j, {"const", "bits"}, where);
    Expr e = cval(need(j, "const", where).get<std::uint64_t>());
    if (j.contains("bits")) e.bits = j.at("bits").get<std::uint32_t>();
    return e;
  }
  if (j.size() != 1) {
    throw ParseError("expression must have exactly one operator key in " +
                     where);
  }
  const auto& item = j.items().begin();
  ExprOp op;
  if (!op_from_name(item.key(), op)) {
    throw ParseError("unknown operator '" + item.key() + "' in " + where);
  }
  const Json& args = item.value();
  if (!args.is_array()) {
    throw ParseError("operator operands must be an array in " + where);
  }
  const std::size_t want =
      (op == ExprOp::kLogNot || op == ExprOp::kBitNot) ? 1 : 2;
  if (args.size() != want) {
    throw ParseError("operator '" + item.key() + "' takes " +
                     std::to_string(want) + " operands in " + where);
  }
  Expr e;
  e.op = op;
  for (const auto& a : args) {
    e.args.push_back(expr_from_json(a, where));
  }
  return e;
}

inline Json instr_to_json(const Instruction& instr);

inline Json block_to_json(const std::vector<Instruction>& block) {
  Json out = Json::array();
  for (const auto& i : block) out.push_back(instr_to_json(i));
  return out;
}

inline Json instr_to_json(const Instruction& instr) {
  return std::visit(
      [](const auto& node) -> Json {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, ApplyTable>) {
          return Json{{"op", "apply"}, {"table", node.table}};
        } else if constexpr (std::is_same_v<T, IfElse>) {
          Json j{{"op", "if"}, {"cond", expr_to_json(node.cond)}};
          j["then"] = block_to_json(node.then_block);
          if (!node.else_block.empty()) {
            j["else"] = block_to_json(node.else_block);
          }
          return j;
        } else if constexpr (std::is_same_v<T, SetField>) {
          return Json{{"op", "set"},
                      {"dest", field_ref_to_string(node.dest)},
                      {"value", expr_to_json(node.value)}};
        } else if constexpr (std::is_same_v<T, RegRead>) {
          return Json{{"op", "reg_read"},
                      {"register", node.reg},
                      {"index", expr_to_json(node.index)},
                      {"dest", field_ref_to_string(node.dest)}};
        } else if constexpr (std::is_same_v<T, RegWrite>) {
          return Json{{"op", "reg_write"},
                      {"register", node.reg},
                      {"index", expr_to_json(node.index)},
                      {"value", expr_to_json(node.value)}};
        } else if constexpr (std::is_same_v<T, AddHeader>) {
          return Json{{"op", "add_header"}, {"header", node.header}};
        } else if constexpr (std::is_same_v<T, RemoveHeader>) {
          return Json{{"op", "remove_header"}, {"header", node.header}};
        } else if constexpr (std::is_same_v<T, CallExtern>) {
          Json args = Json::array();
          for (const auto& a : node.args) args.push_back(expr_to_json(a));
          return Json{{"op", "extern"},
                      {"name", node.name},
                      {"args", std::move(args)}};
        } else if constexpr (std::is_same_v<T, Forward>) {
          return Json{{"op", "forward"}, {"port", expr_to_json(node.port)}};
        } else if constexpr (std::is_same_v<T, Multicast>) {
          return Json{{"op", "multicast"},
                      {"group", expr_to_json(node.group)}};
        } else {
          static_assert(std::is_same_v<T, Drop>);
          return Json{{"op", "drop"}};
        }
      },
      instr.node);
}

inline Instruction instr_from_json(const Json& j, const std::string& where);

inline std::vector<Instruction> block_from_json(const Json& j,
                                                const std::string& where) {
  if (!j.is_array()) {
    throw ParseError("expected an instruction array in " + where);
  }
  std::vector<Instruction> out;
  std::size_t i = 0;
  for (const auto& item : j) {
    out.push_back(instr_from_json(item, where + "[" + std::to_string(i) +
                                            "]"));
    ++i;
  }
  return out;
}

inline Instruction instr_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) {
    throw ParseError("instruction must be an object in " + where);
  }
  const std::string op = need(j, "op", where).get<std::string>();
  if (op == "apply") {
    expect_keys(j, {"op", "table"}, where);
    return Instruction{ApplyTable{need(j, "table", where).get<std::string>()}};
  }
  if (op == "if") {
    expect_keys(j, {"op", "cond", "then", "else"}, where);
    IfElse node;
    node.cond = expr_from_json(need(j, "cond", where), where + ".cond");
    node.then_block = block_from_json(need(j, "then", where), where + ".then");
    if (j.contains("else")) {
      node.else_block = block_from_json(j.at("else"), where + ".else");
    }
    return Instruction{std::move(node)};
  }
  if (op == "set") {
    expect_keys(j, {"op", "dest", "value"}, where);
    SetField node;
    node.dest = field_ref_from_string(
        need(j, "dest", where).get<std::string>(), where);
    node.value = expr_from_json(need(j, "value", where), where + ".value");
    return Instruction{std::move(node)};
  }
  if (op == "reg_read") {
    expect_keys(j, {"op", "register", "index", "dest"}, where);
    RegRead node;
    node.reg = need(j, "register", where).get<std::string>();
    node.index = expr_from_json(need(j, "index", where), where + ".index");
    node.dest = field_ref_from_string(
        need(j, "dest", where).get<std::string>(), where);
    return Instruction{std::move(node)};
  }
  if (op == "reg_write") {
    expect_keys(j, {"op", "register", "index", "value"}, where);
    RegWrite node;
    node.reg = need(j, "register", where).get<std::string>();
    node.index = expr_from_json(need(j, "index", where), where + ".index");
    node.value = expr_from_json(need(j, "value", where), where + ".value");
    return Instruction{std::move(node)};
  }
  if (op == "add_header") {
    expect_keys(j, {"op", "header"}, where);
    return Instruction{
        AddHeader{need(j, "header", where).get<std::string>()}};
  }
  if (op == "remove_header") {
    expect_keys(j, {"op", "header"}, where);
    return Instruction{
        RemoveHeader{need(j, "header", where).get<std::string>()}};
  }
  if (op == "extern") {
    expect_keys(j, {"op", "name", "args"}, where);
    CallExtern node;
    node.name = need(j, "name", where).get<std::string>();
    for (const auto& a : need(j, "args", where)) {
      node.args.push_back(expr_from_json(a, where + ".args"));
    }
    return Instruction{std::move(node)};
  }
  if (op == "forward") {
    expect_keys(j, {"op", "port"}, where);
    return Instruction{
        Forward{expr_from_json(need(j, "port", where), where + ".port")}};
  }
  if (op == "multicast") {
    expect_keys(j, {"op", "group"}, where);
    return Instruction{
        Multicast{expr_from_json(need(j, "group", where), where + ".group")}};
  }
  if (op == "drop") {
    expect_keys(j, {"op"}, where);
    return Instruction{Drop{}};
  }
  throw ParseError("unknown instruction op '" + op + "' in " + where);
}

inline Json fields_to_json(const std::vector<FieldSpec>& fields) {
  Json out = Json::array();
  for (const auto& f : fields) {
    out.push_back(Json{{"name", f.name}, {"bits", f.bits}});
  }
  return out;
}

inline std::vector<FieldSpec> fields_from_json(const Json& j,
                                               const std::string& where) {
  std::vector<FieldSpec> out;
  for (const auto& f : j) {
    expect_keys(f, {"name", "bits"}, where);
    out.push_back(FieldSpec{need(f, "name", where).get<std::string>(),
                            need(f, "bits", where).get<std::uint32_t>()});
  }
  return out;
}

}  // namespace doc_detail

inline nlohmann::ordered_json program_to_json(const PipelineProgram& p) {
  using doc_detail::Json;
  Json j;
  j["name"] = p.name;
  j["headers"] = Json::array();
  for (const auto& h : p.headers) {
    j["headers"].push_back(Json{{"name", h.name},
                                {"fields", doc_detail::fields_to_json(
                                               h.fields)}});
  }
  if (!p.meta.empty()) {
    j["meta"] = doc_detail::fields_to_json(p.meta);
  }
  Json states = Json::array();
  for (const auto& s : p.parser.states) {
    Json js{{"name", s.name}};
    Json ex = Json::array();
    for (const auto& e : s.extracts) ex.push_back(e);
    js["extract"] = std::move(ex);
    if (s.select) {
      Json cases = Json::array();
      for (const auto& c : s.select->cases) {
        cases.push_back(Json{{"value", c.value}, {"next", c.next}});
      }
      js["select"] = Json{
          {"on", doc_detail::field_ref_to_string(s.select->on)},
          {"cases", std::move(cases)},
          {"default", s.select->default_next}};
    }
    states.push_back(std::move(js));
  }
  j["parser"] = Json{{"start", p.parser.start}, {"states", std::move(states)}};
  j["actions"] = Json::array();
  for (const auto& a : p.actions) {
    j["actions"].push_back(
        Json{{"name", a.name},
             {"params", doc_detail::fields_to_json(a.params)},
             {"body", doc_detail::block_to_json(a.body)}});
  }
  j["tables"] = Json::array();
  for (const auto& t : p.tables) {
    Json key = Json::array();
    for (const auto& k : t.key) {
      key.push_back(doc_detail::field_ref_to_string(k));
    }
    j["tables"].push_back(
        Json{{"name", t.name},
             {"key", std::move(key)},
             {"actions", t.actions},
             {"default_action", Json{{"action", t.default_action.action},
                                     {"params", t.default_action.params}}}});
  }
  j["registers"] = Json::array();
  for (const auto& r : p.registers) {
    j["registers"].push_back(
        Json{{"name", r.name}, {"bits", r.bits}, {"count", r.count}});
  }
  j["externs"] = p.externs;
  j["apply"] = doc_detail::block_to_json(p.apply);
  return j;
}

inline PipelineProgram program_from_json(const nlohmann::ordered_json& j) {
  using doc_detail::Json;
  using doc_detail::need;
  if (!j.is_object()) {
    throw ParseError("program document must be a JSON object");
  }
  doc_detail::expect_keys(j,
                          {"name", "headers", "meta", "parser", "actions",
                           "tables", "registers", "externs", "apply"},
                          "program");
  PipelineProgram p;
  p.name = need(j, "name", "program").get<std::string>();
  for (const auto& h : need(j, "headers", "program")) {
    doc_detail::expect_keys(h, {"name", "fields"}, "header");
    HeaderSpec spec;
    spec.name = need(h, "name", "header").get<std::string>();
    spec.fields = doc_detail::fields_from_json(need(h, "fields", "header"),
                                               "header " + spec.name);
    p.headers.push_back(std::move(spec));
  }
  if (j.contains("meta")) {
    p.meta = doc_detail::fields_from_json(j.at("meta"), "meta");
  }
  const Json& parser = need(j, "parser", "program");
  doc_detail::expect_keys(parser, {"start", "states"}, "parser");
  p.parser.start = need(parser, "start", "parser").get<std::string>();
  for (const auto& s : need(parser, "states", "parser")) {
    doc_detail::expect_keys(s, {"name", "extract", "select"}, "parser state");
    ParserState state;
    state.name = need(s, "name", "parser state").get<std::string>();
    if (s.contains("extract")) {
      for (const auto& e : s.at("extract")) {
        state.extracts.push_back(e.get<std::string>());
      }
    }
    if (s.contains("select")) {
      const Json& sel = s.at("select");
      doc_detail::expect_keys(sel, {"on", "cases", "default"}, "select");
      SelectSpec select;
      select.on = doc_detail::field_ref_from_string(
          need(sel, "on", "select").get<std::string>(), "select");
      for (const auto& c : need(sel, "cases", "select")) {
        doc_detail::expect_keys(c, {"value", "next"}, "select case");
        select.cases.push_back(
            SelectCase{need(c, "value", "select case").get<std::uint64_t>(),
                       need(c, "next", "select case").get<std::string>()});
      }
      select.default_next =
          need(sel, "default", "select").get<std::string>();
      state.select = std::move(select);
    }
    p.parser.states.push_back(std::move(state));
  }
  for (const auto& a : need(j, "actions", "program")) {
    doc_detail::expect_keys(a, {"name", "params", "body"}, "action");
    ActionSpec spec;
    spec.name = need(a, "name", "action").get<std::string>();
    spec.params = doc_detail::fields_from_json(need(a, "params", "action"),
                                               "action " + spec.name);
    spec.body = doc_detail::block_from_json(need(a, "body", "action"),
                                            "action " + spec.name);
    p.actions.push_back(std::move(spec));
  }
  for (const auto& t : need(j, "tables", "program")) {
    doc_detail::expect_keys(t, {"name", "key", "actions", "default_action"},
                            "table");
    TableSpec spec;
    spec.name = need(t, "name", "table").get<std::string>();
    for (const auto& k : need(t, "key", "table")) {
      spec.key.push_back(doc_detail::field_ref_from_string(
          k.get<std::string>(), "table " + spec.name));
    }
    for (const auto& a : need(t, "actions", "table")) {
      spec.actions.push_back(a.get<std::string>());
    }
    const Json& da = need(t, "default_action", "table");
    doc_detail::expect_keys(da, {"action", "params"}, "default_action");
    spec.default_action.action =
        need(da, "action", "default_action").get<std::string>();
    for (const auto& v : need(da, "params", "default_action")) {
      spec.default_action.params.push_back(v.get<std::uint64_t>());
    }
    p.tables.push_back(std::move(spec));
  }
  for (const auto& r : need(j, "registers", "program")) {
    doc_detail::expect_keys(r, {"name", "bits", "count"}, "register");
    p.registers.push_back(
        RegisterSpec{need(r, "name", "register").get<std::string>(),
                     need(r, "bits", "register").get<std::uint32_t>(),
                     need(r, "count", "register").get<std::uint32_t>()});
  }
  for (const auto& e : need(j, "externs", "program")) {
    p.externs.push_back(e.get<std::string>());
  }
  p.apply = doc_detail::block_from_json(need(j, "apply", "program"), "apply");
  return p;
}

// Parses a JSON program document. Text-level and schema-level failures both
// surface as ParseError.
inline PipelineProgram parse_program_document(std::string_view text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what());
  }
  try {
    return program_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what());
  }
}

inline std::string serialize_program_document(const PipelineProgram& p) {
  return program_to_json(p).dump(2) + "\n";
}

}  // namespace qherald::pipeline

#endif  // QHERALD_PIPELINE_DOCUMENT_HPP_
