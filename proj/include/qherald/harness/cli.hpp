// Copyright 2026 The qherald Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QHERALD_HARNESS_CLI_HPP_
#define QHERALD_HARNESS_CLI_HPP_

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qherald/bytes.hpp"
#include "qherald/config/scenario.hpp"
#include "qherald/errors.hpp"
#include "qherald/harness/metrics.hpp"
#include "qherald/harness/simulation.hpp"

namespace qherald::harness {

// Exit codes: 0 success; 1 usage or runtime failure; 2 unusable scenario
// (unreadable, malformed, or infeasible); 3 run finished but a device
// trapped.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitBadScenario = 2;
inline constexpr int kExitTrapped = 3;

namespace cli_detail {

inline std::optional<std::string> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace cli_detail

// The command line entry point, callable in-process. `args` excludes the
// program name.
inline int cli_main(const std::vector<std::string>& args, std::ostream& out,
                    std::ostream& err) {
  CLI::App app{"Deterministic simulator of a heralded entanglement link"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::uint64_t> cycles_override;
  std::optional<std::uint64_t> stop_override;
  std::string out_path;
  std::string format = "json";

  CLI::App* run = app.add_subcommand("run", "Run a scenario and report");
  run->add_option("--scenario", scenario_path, "Scenario file (JSON or TOML)")
      ->required();
  run->add_option("--seed", seed_override, "Override the scenario seed");
  run->add_option("--cycles", cycles_override, "Override policy.max_cycles");
  run->add_option("--stop-after-successes", stop_override,
                  "Override policy.stop_after_successes");
  run->add_option("--out", out_path, "Write the report to a file");
  run->add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"json", "csv-summary"}));

  CLI::App* validate =
      app.add_subcommand("validate", "Check a scenario without running it");
  validate
      ->add_option("--scenario", scenario_path, "Scenario file (JSON or TOML)")
      ->required();

  try {
    // CLI11's vector overload consumes arguments from the back.
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitFailure;
  }

  const auto text = cli_detail::slurp(scenario_path);
  if (!text) {
    err << "error: cannot read '" << scenario_path << "'\n";
    return kExitBadScenario;
  }

  try {
    config::Scenario scenario = config::load_scenario(*text);
    if (validate->parsed()) {
      out << "ok " << to_hex(config::scenario_digest(scenario)) << "\n";
      return kExitOk;
    }
    if (seed_override) scenario.seed = *seed_override;
    if (cycles_override) scenario.policy.max_cycles = *cycles_override;
    if (stop_override) scenario.policy.stop_after_successes = *stop_override;
    config::validate_scenario(scenario);

    const MetricsReport report = run_scenario(scenario);
    const std::string rendered = emit_report(report, format);
    if (!out_path.empty()) {
      std::ofstream file(out_path, std::ios::binary);
      if (!file || !(file << rendered) || !file.flush()) {
        err << "error: cannot write '" << out_path << "'\n";
        return kExitFailure;
      }
    } else {
      out << rendered;
    }
    const std::uint64_t traps =
        report.traps_node_a + report.traps_node_b + report.traps_midpoint;
    if (traps > 0) {
      err << "error: " << traps << " data plane trap(s) during the run\n";
      return kExitTrapped;
    }
    return kExitOk;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadScenario;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadScenario;
  } catch (const SimError& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace qherald::harness

#endif  // QHERALD_HARNESS_CLI_HPP_
