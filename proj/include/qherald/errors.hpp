// Copyright 2026 The qherald Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QHERALD_ERRORS_HPP_
#define QHERALD_ERRORS_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qherald {

// Root of all qherald exceptions. Anything thrown by the library derives
// from this so callers can catch simulator faults separately from the
// standard library's own exceptions.
class SimError : public std::runtime_error {
 public:
  explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

// schedule() was called with a timestamp earlier than the current clock.
class SchedulingInPast : public SimError {
 public:
  SchedulingInPast(std::uint64_t at, std::uint64_t now)
      : SimError("cannot schedule at " + std::to_string(at) +
                 "ns: clock is already at " + std::to_string(now) + "ns"),
        at_ns(at),
        now_ns(now) {}
  std::uint64_t at_ns;
  std::uint64_t now_ns;
};

// An emission was requested on a qubit slot that is not Free.
class SlotBusy : public SimError {
 public:
  SlotBusy(std::uint16_t slot, const std::string& state)
      : SimError("qubit slot " + std::to_string(slot) + " is " + state +
                 ", not free"),
        slot(slot) {}
  std::uint16_t slot;
};

// A reply referenced a cycle for which no slot is attempting.
class UnknownCycle : public SimError {
 public:
  explicit UnknownCycle(std::uint32_t cycle)
      : SimError("no attempt in flight for cycle " + std::to_string(cycle)),
        cycle(cycle) {}
  std::uint32_t cycle;
};

// A byte string could not be decoded as a protocol message.
class DecodeError : public SimError {
 public:
  enum class Kind { kTruncated, kUnknownType, kBadValue };
  DecodeError(Kind kind, const std::string& what)
      : SimError("decode error: " + what), kind(kind) {}
  Kind kind;
};

// One validation failure inside a pipeline program, with enough location
// context to find the offending construct.
struct ProgramIssue {
  std::string location;
  std::string message;
};

// A pipeline program failed validation. Carries every issue found, not just
// the first one.
class ProgramError : public SimError {
 public:
  explicit ProgramError(std::vector<ProgramIssue> found)
      : SimError(join(found)), issues(std::move(found)) {}
  std::vector<ProgramIssue> issues;

 private:
  static std::string join(const std::vector<ProgramIssue>& found) {
    std::string out = "program rejected:";
    for (const auto& issue : found) {
      out += "\n  [" + issue.location + "] " + issue.message;
    }
    return out;
  }
};

// A control-plane table operation was rejected.
class TableError : public SimError {
 public:
  enum class Kind {
    kUnknownTable,
    kUnknownAction,
    kDuplicateKey,
    kMissingEntry,
    kKeyShape,
    kParamShape,
  };
  TableError(Kind kind, const std::string& what)
      : SimError("table error: " + what), kind(kind) {}
  Kind kind;
};

// A multicast group operation was rejected.
class GroupError : public SimError {
 public:
  explicit GroupError(const std::string& what)
      : SimError("multicast group error: " + what) {}
};

// A control-plane register access was out of range or named an unknown
// register.
class RegisterError : public SimError {
 public:
  explicit RegisterError(const std::string& what)
      : SimError("register error: " + what) {}
};

// A document (program or scenario) could not be parsed at the text level.
class ParseError : public SimError {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : SimError(line ? "parse error at line " + std::to_string(line) + ": " +
                            what
                      : "parse error: " + what),
        line(line) {}
  std::size_t line;
};

// A scenario is structurally well formed but violates a semantic rule.
// `field` names the offending value, `rule` names the violated constraint.
class ConfigError : public SimError {
 public:
  ConfigError(const std::string& field, const std::string& rule)
      : SimError("config error: " + field + ": " + rule),
        field(field),
        rule(rule) {}
  std::string field;
  std::string rule;
};

}  // namespace qherald

#endif  // QHERALD_ERRORS_HPP_
