// Copyright 2026 The qherald Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QHERALD_CONFIG_SCENARIO_HPP_
#define QHERALD_CONFIG_SCENARIO_HPP_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qherald/bytes.hpp"
#include "qherald/errors.hpp"
#include "qherald/mhp/programs.hpp"
#include "qherald/phys/detector.hpp"
#include "qherald/phys/fiber.hpp"
#include "qherald/toml_lite.hpp"

namespace qherald::config {

// One emission attempt configuration: which slot to use and the attempt
// parameter value announced alongside it.
struct GenAttempt {
  std::uint16_t slot = 0;
  std::uint16_t params = 0;
  bool operator==(const GenAttempt&) const = default;
};

struct GenEntry {
  std::uint32_t cycle = 0;
  GenAttempt attempt;
  bool operator==(const GenEntry&) const = default;
};

struct NodeConfig {
  std::uint16_t qport = 1;
  std::uint16_t cport = 1;
  std::uint16_t slots = 1;
  std::uint64_t phase_ns = 0;
  std::uint64_t period_ns = 0;
  std::uint64_t processing_delay_ns = 100;
  // Default attempt fired every cycle, and/or per-cycle overrides.
  std::optional<GenAttempt> attempt;
  std::vector<GenEntry> attempts;
  bool operator==(const NodeConfig&) const = default;
};

struct MidpointConfig {
  std::uint16_t port_a = 1;
  std::uint16_t port_b = 2;
  std::uint16_t det_id = 0;
  std::uint64_t processing_delay_ns = 100;
  phys::FiberParams fiber_a;
  phys::FiberParams fiber_b;
  phys::DetectorParams detector;
  bool operator==(const MidpointConfig&) const = default;
};

struct RunPolicy {
  std::uint64_t max_cycles = 0;
  std::uint64_t stop_after_successes = 0;  // 0: run all cycles
  bool operator==(const RunPolicy&) const = default;
};

struct Scenario {
  std::uint64_t seed = 1;
  RunPolicy policy;
  NodeConfig node_a;
  NodeConfig node_b;
  MidpointConfig midpoint;
  bool operator==(const Scenario&) const = default;
};

namespace scenario_detail {

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

template <typename T>
T get_or(const Json& j, const std::string& key, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError("bad value for '" + key + "'");
  }
}

template <typename T>
T get_req(const Json& j, const std::string& key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw ParseError("missing key '" + key + "' in " + where);
  }
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError("bad value for '" + key + "' in " + where);
  }
}

inline GenAttempt attempt_from_json(const Json& j, const std::string& where) {
  expect_keys(j, {"slot", "params"}, where);
  GenAttempt a;
  a.slot = get_or<std::uint16_t>(j, "slot", 0);
  a.params = get_or<std::uint16_t>(j, "params", 0);
  return a;
}

inline NodeConfig node_from_json(const Json& j, const std::string& where) {
  expect_keys(j,
              {"qport", "cport", "slots", "phase_ns", "period_ns",
               "processing_delay_ns", "attempt", "attempts"},
              where);
  NodeConfig n;
  n.qport = get_or<std::uint16_t>(j, "qport", 1);
  n.cport = get_or<std::uint16_t>(j, "cport", 1);
  n.slots = get_or<std::uint16_t>(j, "slots", 1);
  n.phase_ns = get_or<std::uint64_t>(j, "phase_ns", 0);
  n.period_ns = get_req<std::uint64_t>(j, "period_ns", where);
  n.processing_delay_ns = get_or<std::uint64_t>(j, "processing_delay_ns", 100);
  if (j.contains("attempt")) {
    n.attempt = attempt_from_json(j.at("attempt"), where + ".attempt");
  }
  if (j.contains("attempts")) {
    for (const auto& e : j.at("attempts")) {
      expect_keys(e, {"cycle", "slot", "params"}, where + ".attempts");
      GenEntry entry;
      entry.cycle = get_req<std::uint32_t>(e, "cycle", where + ".attempts");
      entry.attempt.slot = get_or<std::uint16_t>(e, "slot", 0);
      entry.attempt.params = get_or<std::uint16_t>(e, "params", 0);
      n.attempts.push_back(entry);
    }
  }
  return n;
}

inline phys::FiberParams fiber_from_json(const Json& j,
                                         const std::string& where) {
  expect_keys(j,
              {"length_m", "latency_ns_per_m", "p_arrive",
               "attenuation_db_per_km"},
              where);
  phys::FiberParams f;
  f.length_m = get_req<std::uint64_t>(j, "length_m", where);
  f.latency_ns_per_m = get_or<std::uint64_t>(j, "latency_ns_per_m", 5);
  if (j.contains("p_arrive")) {
    f.p_arrive = j.at("p_arrive").get<double>();
  }
  if (j.contains("attenuation_db_per_km")) {
    f.attenuation_db_per_km = j.at("attenuation_db_per_km").get<double>();
  }
  return f;
}

inline Json attempt_to_json(const GenAttempt& a) {
  return Json{{"slot", a.slot}, {"params", a.params}};
}

inline Json node_to_json(const NodeConfig& n) {
  Json j{{"qport", n.qport},
         {"cport", n.cport},
         {"slots", n.slots},
         {"phase_ns", n.phase_ns},
         {"period_ns", n.period_ns},
         {"processing_delay_ns", n.processing_delay_ns}};
  if (n.attempt) {
    j["attempt"] = attempt_to_json(*n.attempt);
  }
  if (!n.attempts.empty()) {
    Json arr = Json::array();
    for (const auto& e : n.attempts) {
      arr.push_back(Json{{"cycle", e.cycle},
                         {"slot", e.attempt.slot},
                         {"params", e.attempt.params}});
    }
    j["attempts"] = std::move(arr);
  }
  return j;
}

inline Json fiber_to_json(const phys::FiberParams& f) {
  Json j{{"length_m", f.length_m}, {"latency_ns_per_m", f.latency_ns_per_m}};
  if (f.p_arrive) j["p_arrive"] = *f.p_arrive;
  if (f.attenuation_db_per_km) {
    j["attenuation_db_per_km"] = *f.attenuation_db_per_km;
  }
  return j;
}

}  // namespace scenario_detail

inline Scenario scenario_from_json(const nlohmann::ordered_json& j) {
  using scenario_detail::expect_keys;
  using scenario_detail::get_or;
  using scenario_detail::get_req;
  if (!j.is_object()) {
    throw ParseError("scenario document must be an object");
  }
  expect_keys(j, {"seed", "policy", "node_a", "node_b", "midpoint"},
              "scenario");
  Scenario s;
  s.seed = get_or<std::uint64_t>(j, "seed", 1);
  const auto& policy = j.contains("policy") ? j.at("policy")
                                            : nlohmann::ordered_json::object();
  expect_keys(policy, {"max_cycles", "stop_after_successes"}, "policy");
  s.policy.max_cycles = get_or<std::uint64_t>(policy, "max_cycles", 0);
  s.policy.stop_after_successes =
      get_or<std::uint64_t>(policy, "stop_after_successes", 0);
  if (!j.contains("node_a") || !j.contains("node_b") ||
      !j.contains("midpoint")) {
    throw ParseError("scenario needs node_a, node_b, and midpoint sections");
  }
  s.node_a = scenario_detail::node_from_json(j.at("node_a"), "node_a");
  s.node_b = scenario_detail::node_from_json(j.at("node_b"), "node_b");
  const auto& mid = j.at("midpoint");
  expect_keys(mid,
              {"port_a", "port_b", "det_id", "processing_delay_ns", "fiber_a",
               "fiber_b", "detector"},
              "midpoint");
  s.midpoint.port_a = get_or<std::uint16_t>(mid, "port_a", 1);
  s.midpoint.port_b = get_or<std::uint16_t>(mid, "port_b", 2);
  s.midpoint.det_id = get_or<std::uint16_t>(mid, "det_id", 0);
  s.midpoint.processing_delay_ns =
      get_or<std::uint64_t>(mid, "processing_delay_ns", 100);
  if (!mid.contains("fiber_a") || !mid.contains("fiber_b") ||
      !mid.contains("detector")) {
    throw ParseError("midpoint needs fiber_a, fiber_b, and detector");
  }
  s.midpoint.fiber_a =
      scenario_detail::fiber_from_json(mid.at("fiber_a"), "midpoint.fiber_a");
  s.midpoint.fiber_b =
      scenario_detail::fiber_from_json(mid.at("fiber_b"), "midpoint.fiber_b");
  const auto& det = mid.at("detector");
  expect_keys(det, {"p_bsm", "bin_width_ns", "report_latency_ns"},
              "midpoint.detector");
  s.midpoint.detector.p_bsm = get_or<double>(det, "p_bsm", 1.0);
  s.midpoint.detector.bin_width_ns =
      get_req<std::uint64_t>(det, "bin_width_ns", "midpoint.detector");
  s.midpoint.detector.report_latency_ns =
      get_or<std::uint64_t>(det, "report_latency_ns", 0);
  return s;
}

// Normalized document form: defaults made explicit, key order fixed.
inline nlohmann::ordered_json scenario_to_json(const Scenario& s) {
  using scenario_detail::Json;
  Json policy{{"max_cycles", s.policy.max_cycles}};
  if (s.policy.stop_after_successes != 0) {
    policy["stop_after_successes"] = s.policy.stop_after_successes;
  }
  Json j{{"seed", s.seed}, {"policy", std::move(policy)}};
  j["node_a"] = scenario_detail::node_to_json(s.node_a);
  j["node_b"] = scenario_detail::node_to_json(s.node_b);
  j["midpoint"] =
      Json{{"port_a", s.midpoint.port_a},
           {"port_b", s.midpoint.port_b},
           {"det_id", s.midpoint.det_id},
           {"processing_delay_ns", s.midpoint.processing_delay_ns},
           {"fiber_a", scenario_detail::fiber_to_json(s.midpoint.fiber_a)},
           {"fiber_b", scenario_detail::fiber_to_json(s.midpoint.fiber_b)},
           {"detector",
            Json{{"p_bsm", s.midpoint.detector.p_bsm},
                 {"bin_width_ns", s.midpoint.detector.bin_width_ns},
                 {"report_latency_ns", s.midpoint.detector.report_latency_ns}}}};
  return j;
}

// Digest over the normalized form with sorted keys, so equivalent TOML and
// JSON files agree.
inline std::uint64_t scenario_digest(const Scenario& s) {
  const nlohmann::json canonical = scenario_to_json(s);
  return fnv1a64(canonical.dump());
}

namespace scenario_detail {

inline void check_probability(const std::optional<double>& p,
                              const std::string& field) {
  if (p && (*p < 0.0 || *p > 1.0 || !(*p == *p))) {
    throw ConfigError(field, "probability out of range");
  }
}

inline void check_fiber(const phys::FiberParams& f, const std::string& field) {
  check_probability(f.p_arrive, field + ".p_arrive");
  if (f.p_arrive && f.attenuation_db_per_km) {
    throw ConfigError(field,
                      "specify either p_arrive or attenuation_db_per_km, "
                      "not both");
  }
  if (f.attenuation_db_per_km && *f.attenuation_db_per_km < 0.0) {
    throw ConfigError(field + ".attenuation_db_per_km",
                      "attenuation must be nonnegative");
  }
  if (f.latency_ns_per_m == 0) {
    throw ConfigError(field + ".latency_ns_per_m", "latency must be nonzero");
  }
}

inline void check_node(const NodeConfig& n, const std::string& field) {
  if (n.cport == 0) {
    throw ConfigError(field + ".cport", "unknown port");
  }
  if (n.slots == 0) {
    throw ConfigError(field + ".slots", "need at least one qubit slot");
  }
  if (n.period_ns == 0) {
    throw ConfigError(field + ".period_ns", "period must be nonzero");
  }
  if (n.attempt && n.attempt->slot >= n.slots) {
    throw ConfigError(field + ".attempt.slot", "unknown slot");
  }
  std::set<std::uint32_t> cycles;
  for (std::size_t i = 0; i < n.attempts.size(); ++i) {
    const auto& e = n.attempts[i];
    const std::string at =
        field + ".attempts[" + std::to_string(i) + "]";
    if (e.attempt.slot >= n.slots) {
      throw ConfigError(at + ".slot", "unknown slot");
    }
    if (!cycles.insert(e.cycle).second) {
      throw ConfigError(at + ".cycle", "duplicate table key");
    }
  }
}

}  // namespace scenario_detail

// Semantic validation. The timing rules mirror how the simulation schedules
// events: photons and announcements leave a node one processing delay after
// its timer and cross their arm, so both must land at the midpoint in the
// same instant; the detector's report plus the return trip must complete
// before the next timer fires; and the report must beat the next attempt's
// announcements to the midpoint so stored state never crosses attempts.
inline void validate_scenario(const Scenario& s) {
  using scenario_detail::check_fiber;
  using scenario_detail::check_node;

  if (s.policy.max_cycles == 0) {
    throw ConfigError("policy.max_cycles", "must be at least 1");
  }
  if (s.policy.max_cycles > 0xFFFFFFFFULL) {
    throw ConfigError("policy.max_cycles", "cycle numbers are 32 bits");
  }
  check_node(s.node_a, "node_a");
  check_node(s.node_b, "node_b");
  if (s.node_a.period_ns != s.node_b.period_ns) {
    throw ConfigError("node_b.period_ns", "periods must match");
  }
  // Every attempt needs a partner on the far side, or its qubit slot would
  // wait forever for a verdict that cannot be decided.
  if (s.node_a.attempt.has_value() != s.node_b.attempt.has_value()) {
    throw ConfigError("node_b.attempt",
                      "attempt schedules must cover the same cycles");
  }
  if (!s.node_a.attempt) {
    std::set<std::uint32_t> ca, cb;
    for (const auto& e : s.node_a.attempts) ca.insert(e.cycle);
    for (const auto& e : s.node_b.attempts) cb.insert(e.cycle);
    if (ca != cb) {
      throw ConfigError("node_b.attempts",
                        "attempt schedules must cover the same cycles");
    }
  }
  check_fiber(s.midpoint.fiber_a, "midpoint.fiber_a");
  check_fiber(s.midpoint.fiber_b, "midpoint.fiber_b");
  scenario_detail::check_probability(
      std::optional<double>(s.midpoint.detector.p_bsm),
      "midpoint.detector.p_bsm");

  if (s.midpoint.port_a == 0 || s.midpoint.port_a >= mhp::kMaxPorts) {
    throw ConfigError("midpoint.port_a", "unknown port");
  }
  if (s.midpoint.port_b == 0 || s.midpoint.port_b >= mhp::kMaxPorts) {
    throw ConfigError("midpoint.port_b", "unknown port");
  }
  if (s.midpoint.port_a == s.midpoint.port_b) {
    throw ConfigError("midpoint.port_b", "ports must differ");
  }
  if (s.midpoint.det_id >= mhp::kMaxDetectors) {
    throw ConfigError("midpoint.det_id", "unknown detector");
  }

  const std::uint64_t period = s.node_a.period_ns;
  const std::uint64_t width = s.midpoint.detector.bin_width_ns;
  if (width == 0) {
    throw ConfigError("midpoint.detector.bin_width_ns", "must be nonzero");
  }
  if (period % width != 0) {
    throw ConfigError("midpoint.detector.bin_width_ns",
                      "bin width must divide the period");
  }

  const auto arrival = [&](const NodeConfig& n, const phys::FiberParams& f) {
    return n.phase_ns + n.processing_delay_ns + f.propagation_ns();
  };
  const std::uint64_t arrive_a = arrival(s.node_a, s.midpoint.fiber_a);
  const std::uint64_t arrive_b = arrival(s.node_b, s.midpoint.fiber_b);
  if (arrive_a != arrive_b) {
    throw ConfigError("node_b.phase_ns", "misaligned arrivals");
  }

  const std::uint64_t bin_close =
      (mhp::bin_of(arrive_a, width) + 1) * width +
      s.midpoint.detector.report_latency_ns;
  if (bin_close >= arrive_a + period) {
    throw ConfigError("midpoint.detector.report_latency_ns",
                      "report too late for the next attempt");
  }
  const auto check_turnaround = [&](const NodeConfig& n,
                                    const phys::FiberParams& f,
                                    const std::string& field) {
    const std::uint64_t reply_at_agent = bin_close +
                                         s.midpoint.processing_delay_ns +
                                         f.propagation_ns() +
                                         n.processing_delay_ns;
    if (reply_at_agent >= n.phase_ns + period) {
      throw ConfigError(field, "period too short");
    }
  };
  check_turnaround(s.node_a, s.midpoint.fiber_a, "node_a.period_ns");
  check_turnaround(s.node_b, s.midpoint.fiber_b, "node_b.period_ns");

  // The bin index of the final cycle must fit the report's 32-bit field.
  const std::uint64_t last_arrival =
      arrive_a + (s.policy.max_cycles - 1) * period;
  if (mhp::bin_of(last_arrival, width) > 0xFFFFFFFFULL) {
    throw ConfigError("policy.max_cycles",
                      "detection bin index exceeds wire range");
  }
}

// Parses a scenario document (JSON if it leads with '{', the TOML subset
// otherwise) and validates it. ParseError for malformed documents,
// ConfigError for semantic violations.
inline Scenario load_scenario(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() &&
         std::isspace(static_cast<unsigned char>(text[i]))) {
    ++i;
  }
  nlohmann::ordered_json j;
  if (i < text.size() && text[i] == '{') {
    try {
      j = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(e.what());
    }
  } else {
    j = parse_toml_lite(text);
  }
  Scenario s = scenario_from_json(j);
  validate_scenario(s);
  return s;
}

}  // namespace qherald::config

#endif  // QHERALD_CONFIG_SCENARIO_HPP_
