// Copyright 2026 The qherald Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QHERALD_HARNESS_METRICS_HPP_
#define QHERALD_HARNESS_METRICS_HPP_

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>

#include "json.hpp"
#include "qherald/bytes.hpp"
#include "qherald/errors.hpp"

namespace qherald::harness {

struct LatencyStats {
  std::uint64_t count = 0;
  std::uint64_t min_ns = 0;
  std::uint64_t max_ns = 0;
  std::uint64_t sum_ns = 0;

  void add(std::uint64_t v) {
    if (count == 0) {
      min_ns = max_ns = v;
    } else {
      min_ns = std::min(min_ns, v);
      max_ns = std::max(max_ns, v);
    }
    sum_ns += v;
    ++count;
  }
  double mean_ns() const {
    return count == 0 ? 0.0
                      : static_cast<double>(sum_ns) / static_cast<double>(count);
  }
  bool operator==(const LatencyStats&) const = default;
};

// Per-node view: what left the node, what survived the fiber, and what the
// node's agent was told.
struct SideMetrics {
  std::uint64_t attempts = 0;
  std::uint64_t photons_lost = 0;
  std::uint64_t photons_arrived = 0;
  std::uint64_t replies = 0;
  std::uint64_t successes = 0;
  std::uint64_t failures = 0;
  std::uint64_t errors = 0;
  std::uint64_t entangled_slots = 0;
  LatencyStats latency;
  bool operator==(const SideMetrics&) const = default;
};

struct DetectorMetrics {
  std::uint64_t bins_closed = 0;
  std::uint64_t heralds = 0;
  bool operator==(const DetectorMetrics&) const = default;
};

struct MetricsReport {
  std::uint64_t schema = 1;
  std::string scenario_digest;
  std::uint64_t seed = 0;
  std::string stop_reason;
  std::uint64_t cycles_run = 0;
  std::uint64_t sim_end_ns = 0;
  std::uint64_t events_dispatched = 0;
  std::uint64_t max_pending_events = 0;
  SideMetrics node_a;
  SideMetrics node_b;
  DetectorMetrics detector;
  std::uint64_t pair_seq_final = 0;
  std::uint64_t pairs_accepted = 0;
  std::uint64_t pairs_discarded = 0;
  std::uint64_t max_pairs_in_flight = 0;
  bool replies_consistent = true;
  std::uint64_t replies_compared = 0;
  std::uint64_t traps_node_a = 0;
  std::uint64_t traps_node_b = 0;
  std::uint64_t traps_midpoint = 0;
  bool operator==(const MetricsReport&) const = default;
};

namespace metrics_detail {

using Json = nlohmann::ordered_json;

inline Json latency_to_json(const LatencyStats& l) {
  return Json{{"count", l.count},
              {"min_ns", l.min_ns},
              {"max_ns", l.max_ns},
              {"sum_ns", l.sum_ns}};
}

inline LatencyStats latency_from_json(const Json& j) {
  LatencyStats l;
  l.count = j.value("count", std::uint64_t{0});
  l.min_ns = j.value("min_ns", std::uint64_t{0});
  l.max_ns = j.value("max_ns", std::uint64_t{0});
  l.sum_ns = j.value("sum_ns", std::uint64_t{0});
  return l;
}

inline Json side_to_json(const SideMetrics& s) {
  return Json{{"attempts", s.attempts},
              {"photons_lost", s.photons_lost},
              {"photons_arrived", s.photons_arrived},
              {"replies", s.replies},
              {"successes", s.successes},
              {"failures", s.failures},
              {"errors", s.errors},
              {"entangled_slots", s.entangled_slots},
              {"latency", latency_to_json(s.latency)}};
}

inline SideMetrics side_from_json(const Json& j) {
  SideMetrics s;
  s.attempts = j.value("attempts", std::uint64_t{0});
  s.photons_lost = j.value("photons_lost", std::uint64_t{0});
  s.photons_arrived = j.value("photons_arrived", std::uint64_t{0});
  s.replies = j.value("replies", std::uint64_t{0});
  s.successes = j.value("successes", std::uint64_t{0});
  s.failures = j.value("failures", std::uint64_t{0});
  s.errors = j.value("errors", std::uint64_t{0});
  s.entangled_slots = j.value("entangled_slots", std::uint64_t{0});
  if (j.contains("latency")) s.latency = latency_from_json(j.at("latency"));
  return s;
}

}  // namespace metrics_detail

inline nlohmann::ordered_json report_to_json(const MetricsReport& r) {
  using metrics_detail::Json;
  return Json{
      {"schema", r.schema},
      {"scenario_digest", r.scenario_digest},
      {"seed", r.seed},
      {"stop_reason", r.stop_reason},
      {"cycles_run", r.cycles_run},
      {"sim_end_ns", r.sim_end_ns},
      {"events_dispatched", r.events_dispatched},
      {"max_pending_events", r.max_pending_events},
      {"node_a", metrics_detail::side_to_json(r.node_a)},
      {"node_b", metrics_detail::side_to_json(r.node_b)},
      {"detector",
       Json{{"bins_closed", r.detector.bins_closed},
            {"heralds", r.detector.heralds}}},
      {"pairs",
       Json{{"pair_seq_final", r.pair_seq_final},
            {"accepted", r.pairs_accepted},
            {"discarded", r.pairs_discarded},
            {"max_in_flight", r.max_pairs_in_flight}}},
      {"replies_consistent", r.replies_consistent},
      {"replies_compared", r.replies_compared},
      {"traps",
       Json{{"node_a", r.traps_node_a},
            {"node_b", r.traps_node_b},
            {"midpoint", r.traps_midpoint}}},
  };
}

inline MetricsReport report_from_json(const nlohmann::ordered_json& j) {
  MetricsReport r;
  r.schema = j.value("schema", std::uint64_t{1});
  r.scenario_digest = j.value("scenario_digest", std::string{});
  r.seed = j.value("seed", std::uint64_t{0});
  r.stop_reason = j.value("stop_reason", std::string{});
  r.cycles_run = j.value("cycles_run", std::uint64_t{0});
  r.sim_end_ns = j.value("sim_end_ns", std::uint64_t{0});
  r.events_dispatched = j.value("events_dispatched", std::uint64_t{0});
  r.max_pending_events = j.value("max_pending_events", std::uint64_t{0});
  if (j.contains("node_a")) {
    r.node_a = metrics_detail::side_from_json(j.at("node_a"));
  }
  if (j.contains("node_b")) {
    r.node_b = metrics_detail::side_from_json(j.at("node_b"));
  }
  if (j.contains("detector")) {
    r.detector.bins_closed =
        j.at("detector").value("bins_closed", std::uint64_t{0});
    r.detector.heralds = j.at("detector").value("heralds", std::uint64_t{0});
  }
  if (j.contains("pairs")) {
    const auto& p = j.at("pairs");
    r.pair_seq_final = p.value("pair_seq_final", std::uint64_t{0});
    r.pairs_accepted = p.value("accepted", std::uint64_t{0});
    r.pairs_discarded = p.value("discarded", std::uint64_t{0});
    r.max_pairs_in_flight = p.value("max_in_flight", std::uint64_t{0});
  }
  r.replies_consistent = j.value("replies_consistent", true);
  r.replies_compared = j.value("replies_compared", std::uint64_t{0});
  if (j.contains("traps")) {
    const auto& t = j.at("traps");
    r.traps_node_a = t.value("node_a", std::uint64_t{0});
    r.traps_node_b = t.value("node_b", std::uint64_t{0});
    r.traps_midpoint = t.value("midpoint", std::uint64_t{0});
  }
  return r;
}

// Renders a report in the requested output format: "json" is the full
// document, "csv-summary" is a two-line headline view.
inline std::string emit_report(const MetricsReport& r,
                               std::string_view format) {
  if (format == "json") {
    return report_to_json(r).dump(2) + "\n";
  }
  if (format == "csv-summary") {
    const double rate =
        r.node_a.attempts == 0
            ? 0.0
            : static_cast<double>(r.node_a.successes) /
                  static_cast<double>(r.node_a.attempts);
    std::ostringstream out;
    out << "seed,scenario_digest,cycles_run,stop_reason,attempts,successes,"
           "failures,errors,success_rate,mean_reply_latency_ns,pair_seq,"
           "accepted,replies_consistent,traps\n";
    out << r.seed << ',' << r.scenario_digest << ',' << r.cycles_run << ','
        << r.stop_reason << ',' << r.node_a.attempts << ','
        << r.node_a.successes << ',' << r.node_a.failures << ','
        << r.node_a.errors << ',' << std::fixed << std::setprecision(6)
        << rate << ',' << std::setprecision(3) << r.node_a.latency.mean_ns()
        << ',' << r.pair_seq_final << ',' << r.pairs_accepted << ','
        << (r.replies_consistent ? "true" : "false") << ','
        << (r.traps_node_a + r.traps_node_b + r.traps_midpoint) << '\n';
    return out.str();
  }
  throw SimError("unknown report format '" + std::string(format) + "'");
}

}  // namespace qherald::harness

#endif  // QHERALD_HARNESS_METRICS_HPP_
