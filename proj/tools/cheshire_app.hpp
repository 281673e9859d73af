// Copyright 2026 The Cheshire Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Argument parsing and dispatch for the `cheshire` executable.

#include <cstdint>
#include <exception>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cheshire/cli.hpp"

namespace cheshire::cli {

/// Runs the tool on `args` (without the program name).
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum Cheshire Cat interferometer simulator and weak-value analysis", "cheshire"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--seed", seed, "Random seed (overrides config)");
  app.add_option("--out", out_dir, "Output directory (overrides config)");

  double post_chi = 0.0;
  auto* weak = app.add_subcommand("weak-values", "Theoretical weak values and product-rule gap");
  weak->add_option("--post-chi", post_chi, "Postselection phase chi [rad]");

  std::string scenario;
  auto* scan_cmd = app.add_subcommand("scan", "Simulate one phase-shifter scan and fit it");
  scan_cmd->add_option("--scenario", scenario, "REF, ABS_I, ABS_II, MAG_I or MAG_II")->required();

  app.add_subcommand("table1", "Run the five-scenario pipeline and extract the weak values");

  std::string ref_path;
  std::vector<std::string> files;
  std::string analyze_label;
  auto* analyze = app.add_subcommand("analyze", "Extract weak values from interferogram CSV files");
  analyze->add_option("--ref", ref_path, "Reference (REF) scan CSV")->required();
  analyze->add_option("--scenario", analyze_label,
                      "Scenario of a single input file (default: inferred from scan_<LABEL>.csv)");
  analyze->add_option("files", files, "Interferogram CSV files")->required();

  // CLI11 wants argv order reversed.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kExitConfig;
  }
  if (seed) cfg.seed = *seed;
  if (!out_dir.empty()) cfg.output_dir = out_dir;

  if (weak->parsed()) return cmd_weak_values(cfg, post_chi, out, err);
  if (scan_cmd->parsed()) return cmd_scan(cfg, scenario, out, err);
  if (analyze->parsed()) {
    if (!analyze_label.empty() && files.size() != 1) {
      err << "analyze: --scenario applies to exactly one input file\n";
      return kExitConfig;
    }
    std::vector<AnalyzeInput> inputs;
    for (const auto& f : files)
      inputs.push_back({f, analyze_label.empty() ? std::nullopt : std::optional(analyze_label)});
    return cmd_analyze(cfg, ref_path, inputs, out, err);
  }
  return cmd_table1(cfg, out, err);
}

}  // namespace cheshire::cli
