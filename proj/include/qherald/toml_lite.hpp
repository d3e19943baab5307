// Copyright 2026 The qherald Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QHERALD_TOML_LITE_HPP_
#define QHERALD_TOML_LITE_HPP_

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qherald/errors.hpp"

namespace qherald {

// Minimal TOML reader covering the subset scenario files use, mapped onto a
// JSON value tree:
//   - comments (#) and blank lines
//   - [table.path] headers and [[table.path]] array-of-tables headers
//   - key = value with bare keys
//   - values: "strings" (with \" \\ \n \t escapes), integers (with optional
//     sign and _ separators), floats, booleans, and single-line arrays of
//     those scalars
// Dotted keys, inline tables, multi-line values, and datetimes are not
// supported.

namespace toml_detail {

inline bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line = 1;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  void skip_ws() {
    while (!done() && (peek() == ' ' || peek() == '\t')) ++pos;
  }
};

inline void fail(const Cursor& c, const std::string& what) {
  throw ParseError(what, c.line);
}

inline std::string parse_bare_key(Cursor& c) {
  std::string key;
  while (!c.done() && is_bare_key_char(c.peek())) {
    key.push_back(c.peek());
    ++c.pos;
  }
  if (key.empty()) {
    fail(c, "expected a key");
  }
  return key;
}

inline std::vector<std::string> parse_key_path(Cursor& c) {
  std::vector<std::string> path;
  path.push_back(parse_bare_key(c));
  while (!c.done() && c.peek() == '.') {
    ++c.pos;
    path.push_back(parse_bare_key(c));
  }
  return path;
}

inline std::string parse_string(Cursor& c) {
  ++c.pos;  // opening quote
  std::string out;
  while (true) {
    if (c.done() || c.peek() == '\n') {
      fail(c, "unterminated string");
    }
    char ch = c.peek();
    ++c.pos;
    if (ch == '"') {
      return out;
    }
    if (ch == '\\') {
      if (c.done()) fail(c, "unterminated escape");
      char esc = c.peek();
      ++c.pos;
      switch (esc) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        default: fail(c, std::string("unsupported escape \\") + esc);
      }
      continue;
    }
    out.push_back(ch);
  }
}

inline nlohmann::ordered_json parse_number(Cursor& c) {
  std::string raw;
  bool is_float = false;
  if (!c.done() && (c.peek() == '+' || c.peek() == '-')) {
    raw.push_back(c.peek());
    ++c.pos;
  }
  while (!c.done()) {
    char ch = c.peek();
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      raw.push_back(ch);
    } else if (ch == '_') {
      // separator, must sit between digits on both sides
      const bool digit_before =
          !raw.empty() && std::isdigit(static_cast<unsigned char>(raw.back()));
      const bool digit_after =
          c.pos + 1 < c.text.size() &&
          std::isdigit(static_cast<unsigned char>(c.text[c.pos + 1]));
      if (!digit_before || !digit_after) {
        fail(c, "misplaced _ in number");
      }
    } else if (ch == '.' || ch == 'e' || ch == 'E' || ch == '+' ||
               ch == '-') {
      if ((ch == '+' || ch == '-') &&
          !(raw.back() == 'e' || raw.back() == 'E')) {
        break;
      }
      is_float = true;
      raw.push_back(ch);
    } else {
      break;
    }
    ++c.pos;
  }
  if (raw.empty() || raw == "+" || raw == "-") {
    fail(c, "malformed number");
  }
  try {
    if (is_float) {
      return std::stod(raw);
    }
    if (raw[0] == '-') {
      return static_cast<std::int64_t>(std::stoll(raw));
    }
    return static_cast<std::uint64_t>(std::stoull(raw));
  } catch (const std::exception&) {
    fail(c, "number out of range: " + raw);
  }
  return nullptr;
}

inline nlohmann::ordered_json parse_value(Cursor& c);

inline nlohmann::ordered_json parse_array(Cursor& c) {
  ++c.pos;  // '['
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  c.skip_ws();
  if (!c.done() && c.peek() == ']') {
    ++c.pos;
    return arr;
  }
  while (true) {
    c.skip_ws();
    arr.push_back(parse_value(c));
    c.skip_ws();
    if (c.done() || c.peek() == '\n') {
      fail(c, "unterminated array");
    }
    if (c.peek() == ',') {
      ++c.pos;
      continue;
    }
    if (c.peek() == ']') {
      ++c.pos;
      return arr;
    }
    fail(c, "expected , or ] in array");
  }
}

inline nlohmann::ordered_json parse_value(Cursor& c) {
  if (c.done()) fail(c, "expected a value");
  const char ch = c.peek();
  if (ch == '"') return parse_string(c);
  if (ch == '[') return parse_array(c);
  if (c.text.compare(c.pos, 4, "true") == 0) {
    c.pos += 4;
    return true;
  }
  if (c.text.compare(c.pos, 5, "false") == 0) {
    c.pos += 5;
    return false;
  }
  if (ch == '+' || ch == '-' || std::isdigit(static_cast<unsigned char>(ch))) {
    return parse_number(c);
  }
  fail(c, std::string("unsupported value starting with '") + ch + "'");
  return nullptr;
}

// Walks `path` from the root, creating objects as needed. The final segment
// is returned by pointer for the caller to define.
inline nlohmann::ordered_json* descend(nlohmann::ordered_json& root,
                                       const std::vector<std::string>& path,
                                       const Cursor& c) {
  nlohmann::ordered_json* node = &root;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    nlohmann::ordered_json& next = (*node)[path[i]];
    if (next.is_null()) {
      next = nlohmann::ordered_json::object();
    }
    if (next.is_array()) {
      if (next.empty()) fail(c, "empty table array " + path[i]);
      node = &next.back();
      continue;
    }
    if (!next.is_object()) {
      fail(c, "key " + path[i] + " is not a table");
    }
    node = &next;
  }
  return &(*node)[path.back()];
}

}  // namespace toml_detail

inline nlohmann::ordered_json parse_toml_lite(std::string_view text) {
  using toml_detail::Cursor;
  using toml_detail::fail;
  nlohmann::ordered_json root = nlohmann::ordered_json::object();
  nlohmann::ordered_json* current = &root;
  Cursor c{text};
  while (!c.done()) {
    c.skip_ws();
    if (c.done()) break;
    const char ch = c.peek();
    if (ch == '\n') {
      ++c.pos;
      ++c.line;
      continue;
    }
    if (ch == '#') {
      while (!c.done() && c.peek() != '\n') ++c.pos;
      continue;
    }
    if (ch == '[') {
      const bool is_array = c.pos + 1 < c.text.size() && c.text[c.pos + 1] == '[';
      c.pos += is_array ? 2 : 1;
      const auto path = toml_detail::parse_key_path(c);
      if (is_array) {
        if (c.done() || c.text.compare(c.pos, 2, "]]") != 0) {
          fail(c, "expected ]] after table array header");
        }
        c.pos += 2;
      } else {
        if (c.done() || c.peek() != ']') {
          fail(c, "expected ] after table header");
        }
        ++c.pos;
      }
      nlohmann::ordered_json* slot = toml_detail::descend(root, path, c);
      if (is_array) {
        if (slot->is_null()) {
          *slot = nlohmann::ordered_json::array();
        }
        if (!slot->is_array()) {
          fail(c, "table array clashes with existing key");
        }
        slot->push_back(nlohmann::ordered_json::object());
        current = &slot->back();
      } else {
        if (!slot->is_null()) {
          fail(c, "duplicate table header");
        }
        *slot = nlohmann::ordered_json::object();
        current = slot;
      }
    } else {
      const std::string key = toml_detail::parse_bare_key(c);
      c.skip_ws();
      if (c.done() || c.peek() != '=') {
        fail(c, "expected = after key " + key);
      }
      ++c.pos;
      c.skip_ws();
      if (current->contains(key)) {
        fail(c, "duplicate key " + key);
      }
      (*current)[key] = toml_detail::parse_value(c);
    }
    // Only whitespace and a comment may follow on the line.
    c.skip_ws();
    if (!c.done() && c.peek() == '#') {
      while (!c.done() && c.peek() != '\n') ++c.pos;
    }
    if (!c.done()) {
      if (c.peek() != '\n') {
        fail(c, "unexpected trailing content");
      }
      ++c.pos;
      ++c.line;
    }
  }
  return root;
}

}  // namespace qherald

#endif  // QHERALD_TOML_LITE_HPP_
