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

// Run configuration, file formats and the command implementations behind the
// `cheshire` tool. Commands write to caller-supplied streams and return the
// process exit code.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "cheshire/experiment.hpp"
#include "cheshire/stochastics.hpp"
#include "cheshire/weakvalue.hpp"

namespace cheshire::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitUnknownScenario = 3,
  kExitPipeline = 4,
  kExitInputParse = 5,
  kExitDegenerateFit = 6,
};

inline constexpr std::string_view kCsvHeader = "chi_rad,o_counts,h_counts,dwell_s";

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A malformed input file; `line` is 1-based (the header is line 1).
class CsvError : public Error {
 public:
  CsvError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct RunConfig {
  double T = 0.79;
  double sigma_T = 0.01;
  double alpha_deg = 20.0;
  double flux = 45.0;
  double dwell = 556.0;
  int chi_points = 25;
  double chi_span = 2.0 * std::numbers::pi;
  std::string mode = "analytic";
  std::uint64_t seed = 1;
  int repetitions = 1;
  std::string output_dir = ".";
};

/// Keys are exactly the RunConfig field names; missing keys keep defaults,
/// unknown keys and wrong types are rejected.
inline RunConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  RunConfig c;
  auto number = [&](const std::string& key, double& out) {
    if (!j[key].is_number()) throw ConfigError("config: '" + key + "' must be a number");
    out = j[key].get<double>();
    if (!std::isfinite(out)) throw ConfigError("config: '" + key + "' must be finite");
  };
  auto integer = [&](const std::string& key, int& out) {
    if (!j[key].is_number_integer()) throw ConfigError("config: '" + key + "' must be an integer");
    out = j[key].get<int>();
  };
  for (const auto& [key, value] : j.items()) {
    if (key == "T") number(key, c.T);
    else if (key == "sigma_T") number(key, c.sigma_T);
    else if (key == "alpha_deg") number(key, c.alpha_deg);
    else if (key == "flux") number(key, c.flux);
    else if (key == "dwell") number(key, c.dwell);
    else if (key == "chi_points") integer(key, c.chi_points);
    else if (key == "chi_span") number(key, c.chi_span);
    else if (key == "repetitions") integer(key, c.repetitions);
    else if (key == "seed") {
      if (!value.is_number_unsigned()) throw ConfigError("config: 'seed' must be a non-negative integer");
      c.seed = value.get<std::uint64_t>();
    } else if (key == "mode") {
      if (!value.is_string()) throw ConfigError("config: 'mode' must be a string");
      c.mode = value.get<std::string>();
    } else if (key == "output_dir") {
      if (!value.is_string()) throw ConfigError("config: 'output_dir' must be a string");
      c.output_dir = value.get<std::string>();
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  if (!(c.T > 0.0 && c.T <= 1.0)) throw ConfigError("config: T must lie in (0, 1]");
  if (!(c.sigma_T >= 0.0)) throw ConfigError("config: sigma_T must be >= 0");
  if (!(c.flux > 0.0)) throw ConfigError("config: flux must be positive");
  if (!(c.dwell > 0.0)) throw ConfigError("config: dwell must be positive");
  if (c.chi_points < 4) throw ConfigError("config: chi_points must be >= 4");
  if (!(c.chi_span > 0.0)) throw ConfigError("config: chi_span must be positive");
  if (c.mode != "analytic" && c.mode != "stochastic")
    throw ConfigError("config: mode must be 'analytic' or 'stochastic'");
  if (c.repetitions < 1) throw ConfigError("config: repetitions must be >= 1");
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return parse_config(j);
}

inline ScanMode scan_mode(const RunConfig& c) {
  return c.mode == "stochastic" ? ScanMode::stochastic(c.seed) : ScanMode::analytic();
}

inline ExperimentConfig to_experiment(const RunConfig& c) {
  ExperimentConfig e;
  e.transmissivity = c.T;
  e.sigma_transmissivity = c.sigma_T;
  e.alpha = deg_to_rad(c.alpha_deg);
  e.flux = c.flux;
  e.dwell = c.dwell;
  e.chi_grid = chi_grid(c.chi_points, c.chi_span);
  e.mode = scan_mode(c);
  return e;
}

/// Writes via a sibling temp file and rename.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

/// Shortest round-trip decimal representation.
inline std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw Error("format_number failed");
  return std::string(buf, end);
}

inline std::string format_csv(const Interferogram& g) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& s : g.samples()) {
    out += format_number(s.chi) + ',' + format_number(s.o_counts) + ',' +
           format_number(s.h_counts) + ',' + format_number(s.dwell) + '\n';
  }
  return out;
}

inline Interferogram parse_csv(std::string_view text) {
  std::vector<InterferogramSample> samples;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      if (line != kCsvHeader)
        throw CsvError(1, "expected header '" + std::string(kCsvHeader) + "'");
      continue;
    }
    if (line.empty()) {
      if (pos >= text.size()) break;
      throw CsvError(line_no, "empty row");
    }
    std::array<double, 4> f{};
    std::size_t start = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      auto comma = line.find(',', start);
      const bool last = k == 3;
      if (last != (comma == std::string_view::npos)) throw CsvError(line_no, "expected 4 fields");
      if (last) comma = line.size();
      const auto field = line.substr(start, comma - start);
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), f[k]);
      if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty())
        throw CsvError(line_no, "invalid number '" + std::string(field) + "'");
      start = comma + 1;
    }
    InterferogramSample s{f[0], f[1], f[2], f[3]};
    if (!std::isfinite(s.chi)) throw CsvError(line_no, "non-finite chi");
    if (!samples.empty() && !(s.chi > samples.back().chi))
      throw CsvError(line_no, "chi must be strictly increasing");
    if (!(s.o_counts >= 0.0) || !(s.h_counts >= 0.0) || !std::isfinite(s.o_counts) ||
        !std::isfinite(s.h_counts))
      throw CsvError(line_no, "counts must be finite and non-negative");
    if (!(s.dwell > 0.0) || !std::isfinite(s.dwell)) throw CsvError(line_no, "dwell must be positive");
    samples.push_back(s);
  }
  if (line_no == 0) throw CsvError(1, "empty file");
  if (samples.empty()) throw CsvError(line_no + 1, "no data rows");
  return Interferogram(std::move(samples));
}

inline nlohmann::ordered_json fit_json(const FitResult& f) {
  return {{"mean", f.mean},
          {"sigma_mean", f.sigma_mean()},
          {"contrast", f.contrast},
          {"sigma_contrast", f.sigma_contrast()},
          {"phase", f.phase},
          {"sigma_phase", f.sigma_phase()},
          {"intensity_at_zero", f.intensity_at_zero},
          {"sigma_intensity_at_zero", f.sigma_intensity_at_zero},
          {"chi_squared", f.chi_squared},
          {"dof", f.dof}};
}

inline nlohmann::ordered_json config_json(const RunConfig& c) {
  return {{"T", c.T},          {"sigma_T", c.sigma_T},       {"alpha_deg", c.alpha_deg},
          {"flux", c.flux},    {"dwell", c.dwell},           {"chi_points", c.chi_points},
          {"chi_span", c.chi_span}, {"mode", c.mode},        {"seed", c.seed},
          {"repetitions", c.repetitions}};
}

inline std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

inline std::string fixed(double v, int precision = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << (v == 0.0 ? 0.0 : v);
  return s.str();
}

inline int cmd_weak_values(const RunConfig& cfg, double post_chi, std::ostream& out,
                           std::ostream& err) {
  try {
    const auto wv = cheshire_weak_values(post_chi);
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    out << "post_chi = " << format_number(post_chi) << " rad\n";
    out << std::left << std::setw(14) << "observable" << std::right << std::setw(12) << "Re"
        << std::setw(12) << "Im" << std::setw(12) << "|w|^2" << '\n';
    for (const auto* w : {&wv.path_I, &wv.path_II, &wv.spin_path_I, &wv.spin_path_II, &wv.spin}) {
      out << std::left << std::setw(14) << ("<" + w->observable_label + ">_w") << std::right
          << std::setw(12) << fixed(w->value.real(), 6) << std::setw(12)
          << fixed(w->value.imag(), 6) << std::setw(12) << fixed(std::norm(w->value), 6) << '\n';
      rows.push_back({{"observable", w->observable_label},
                      {"re", w->value.real()},
                      {"im", w->value.imag()},
                      {"abs2", std::norm(w->value)}});
    }
    out << "product-rule gap <sz Pi_II>_w - <sz>_w <Pi_II>_w = " << fixed(wv.product_gap.real(), 6)
        << (wv.product_gap.imag() < 0 ? " - " : " + ") << fixed(std::abs(wv.product_gap.imag()), 6)
        << "i\n";
    nlohmann::ordered_json theory = nlohmann::ordered_json::array();
    for (const auto& r : predicted_table()) theory.push_back({{"observable", r.label}, {"value", r.value}});
    nlohmann::ordered_json doc = {
        {"schema_version", kSchemaVersion},
        {"post_chi", post_chi},
        {"weak_values", rows},
        {"product_rule_gap",
         {{"A", "sz"}, {"B", "Pi_II"}, {"re", wv.product_gap.real()}, {"im", wv.product_gap.imag()}}},
        {"theory_chi0", theory}};
    write_atomic(std::filesystem::path(cfg.output_dir) / "weak_values.json", dump(doc));
    return kExitOk;
  } catch (const std::exception& e) {
    err << "weak-values: " << e.what() << '\n';
    return kExitPipeline;
  }
}

inline int cmd_scan(const RunConfig& cfg, std::string_view label_text, std::ostream& out,
                    std::ostream& err) {
  const auto label = parse_scenario(label_text);
  if (!label) {
    err << "scan: unknown scenario '" << label_text << "' (expected REF, ABS_I, ABS_II, MAG_I, MAG_II)\n";
    return kExitUnknownScenario;
  }
  try {
    const auto exp = to_experiment(cfg);
    const auto scenario = make_scenario(*label, exp.transmissivity, exp.alpha);
    const auto g = scan(scenario, exp.chi_grid, exp.flux, exp.dwell, exp.mode,
                        stream_name(0, *label));
    const auto fo = fit_interferogram(g, Port::O);
    const auto fh = fit_interferogram(g, Port::H);
    const auto dir = std::filesystem::path(cfg.output_dir);
    const std::string name = to_string(*label);
    write_atomic(dir / ("scan_" + name + ".csv"), format_csv(g));
    nlohmann::ordered_json doc = {{"schema_version", kSchemaVersion},
                                  {"scenario", name},
                                  {"config", config_json(cfg)},
                                  {"O", fit_json(fo)},
                                  {"H", fit_json(fh)}};
    write_atomic(dir / ("fit_" + name + ".json"), dump(doc));
    out << name << ": O I(0) = " << fixed(fo.intensity_at_zero) << " +/- "
        << fixed(fo.sigma_intensity_at_zero) << " cps, contrast " << fixed(fo.contrast)
        << "; H I(0) = " << fixed(fh.intensity_at_zero) << " cps, contrast " << fixed(fh.contrast)
        << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    err << "scan: " << e.what() << '\n';
    return kExitPipeline;
  }
}

inline nlohmann::ordered_json estimate_json(const EstimateReport& r) {
  return {{"observable", r.label},
          {"method", to_string(r.estimate.method)},
          {"path", to_string(r.estimate.path)},
          {"value", r.estimate.value},
          {"sigma", r.estimate.sigma},
          {"theory", r.theory},
          {"truncation_residue", r.truncation_residue},
          {"dropped_imaginary", r.dropped_imaginary}};
}

inline void print_table1(std::ostream& out, const std::array<EstimateReport, 4>& e) {
  auto cell = [](const EstimateReport& r) {
    return fixed(r.estimate.value, 3) + " +/- " + fixed(r.estimate.sigma, 3);
  };
  out << std::left << std::setw(18) << "" << std::setw(20) << "Path I" << "Path II" << '\n';
  out << std::setw(18) << "<Pi_j>_w" << std::setw(20) << cell(e[0]) << cell(e[1]) << '\n';
  out << std::setw(18) << "|<sz Pi_j>_w|^2" << std::setw(20) << cell(e[2]) << cell(e[3]) << '\n';
  out << std::setw(18) << "theory" << std::setw(20)
      << (fixed(e[0].theory, 0) + ", " + fixed(e[2].theory, 0))
      << (fixed(e[1].theory, 0) + ", " + fixed(e[3].theory, 0)) << '\n';
  out << std::setw(18) << "trunc. residue" << std::setw(20)
      << (fixed(e[0].truncation_residue) + ", " + fixed(e[2].truncation_residue))
      << (fixed(e[1].truncation_residue) + ", " + fixed(e[3].truncation_residue)) << '\n';
  out << std::right;
}

inline int cmd_table1(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const auto exp = to_experiment(cfg);
    std::array<std::vector<WeakValueEstimate>, 4> runs;
    std::optional<ExperimentResult> first;
    for (int r = 0; r < cfg.repetitions; ++r) {
      auto res = run_cheshire_experiment(exp, r);
      for (std::size_t k = 0; k < 4; ++k) runs[k].push_back(res.estimates[k].estimate);
      if (!first) first = std::move(res);
    }
    std::array<EstimateReport, 4> combined = first->estimates;
    for (std::size_t k = 0; k < 4; ++k) combined[k].estimate = aggregate(RunSet(runs[k]));

    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : combined) rows.push_back(estimate_json(r));
    nlohmann::ordered_json intensities;
    for (const auto& s : first->scans) {
      intensities[to_string(s.scenario.label)] = {
          {"intensity_at_zero", s.fit_o.intensity_at_zero},
          {"sigma", s.fit_o.sigma_intensity_at_zero}};
    }
    nlohmann::ordered_json doc = {{"schema_version", kSchemaVersion},
                                  {"config", config_json(cfg)},
                                  {"estimates", rows},
                                  {"o_port_intensities_rep0", intensities}};
    write_atomic(std::filesystem::path(cfg.output_dir) / "table1.json", dump(doc));
    print_table1(out, combined);
    return kExitOk;
  } catch (const std::exception& e) {
    err << "table1: " << e.what() << '\n';
    return kExitPipeline;
  }
}

struct AnalyzeInput {
  std::string path;
  std::optional<std::string> label;
};

/// Infers the scenario from a `scan_<LABEL>.csv` file name.
inline std::optional<ScenarioLabel> label_from_filename(const std::string& path) {
  const auto stem = std::filesystem::path(path).stem().string();
  if (stem.rfind("scan_", 0) != 0) return std::nullopt;
  return parse_scenario(stem.substr(5));
}

inline int cmd_analyze(const RunConfig& cfg, const std::string& ref_path,
                       const std::vector<AnalyzeInput>& inputs, std::ostream& out,
                       std::ostream& err) {
  std::vector<std::pair<ScenarioLabel, std::string>> labelled;
  for (const auto& in : inputs) {
    auto label = in.label ? parse_scenario(*in.label) : label_from_filename(in.path);
    if (!label) {
      err << "analyze: cannot determine scenario for " << in.path << '\n';
      return kExitUnknownScenario;
    }
    labelled.emplace_back(*label, in.path);
  }

  auto read = [&](const std::string& path) -> std::optional<Interferogram> {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
      err << "analyze: cannot open " << path << '\n';
      return std::nullopt;
    }
    std::stringstream buf;
    buf << f.rdbuf();
    try {
      return parse_csv(buf.str());
    } catch (const CsvError& e) {
      err << "analyze: " << path << ": " << e.what() << '\n';
      return std::nullopt;
    }
  };

  std::map<ScenarioLabel, Measured> intensity;
  auto fit_file = [&](ScenarioLabel label, const std::string& path) -> int {
    auto g = read(path);
    if (!g) return kExitInputParse;
    try {
      intensity[label] = fit_interferogram(*g, Port::O).at_zero();
    } catch (const FitDegenerate& e) {
      err << "analyze: " << path << ": " << e.what() << '\n';
      return kExitDegenerateFit;
    }
    return kExitOk;
  };

  if (int rc = fit_file(ScenarioLabel::REF, ref_path); rc != kExitOk) return rc;
  for (const auto& [label, path] : labelled)
    if (int rc = fit_file(label, path); rc != kExitOk) return rc;

  try {
    const Measured ref = intensity.at(ScenarioLabel::REF);
    const Measured t{cfg.T, cfg.sigma_T};
    const double alpha = deg_to_rad(cfg.alpha_deg);
    const auto theory = predicted_table();
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& [label, path] : labelled) {
      std::optional<WeakValueEstimate> e;
      std::size_t row = 0;
      switch (label) {
        case ScenarioLabel::REF: break;
        case ScenarioLabel::ABS_I: e = extract_population(ref, intensity[label], t, Path::I); row = 0; break;
        case ScenarioLabel::ABS_II: e = extract_population(ref, intensity[label], t, Path::II); row = 1; break;
        case ScenarioLabel::MAG_I: e = extract_spin(ref, intensity[label], alpha, Path::I); row = 2; break;
        case ScenarioLabel::MAG_II: e = extract_spin(ref, intensity[label], alpha, Path::II); row = 3; break;
      }
      if (!e) continue;
      out << std::left << std::setw(18) << theory[row].label << std::right << fixed(e->value, 3)
          << " +/- " << fixed(e->sigma, 3) << "  (theory " << fixed(theory[row].value, 0) << ")\n";
      rows.push_back({{"scenario", to_string(label)},
                      {"file", path},
                      {"observable", theory[row].label},
                      {"method", to_string(e->method)},
                      {"path", to_string(e->path)},
                      {"value", e->value},
                      {"sigma", e->sigma},
                      {"theory", theory[row].value}});
    }
    nlohmann::ordered_json ints;
    for (const auto& [label, m] : intensity)
      ints[to_string(label)] = {{"intensity_at_zero", m.value}, {"sigma", m.sigma}};
    nlohmann::ordered_json doc = {{"schema_version", kSchemaVersion},
                                  {"T", cfg.T},
                                  {"sigma_T", cfg.sigma_T},
                                  {"alpha_deg", cfg.alpha_deg},
                                  {"o_port_intensities", ints},
                                  {"estimates", rows}};
    write_atomic(std::filesystem::path(cfg.output_dir) / "analysis.json", dump(doc));
    return kExitOk;
  } catch (const std::exception& e) {
    err << "analyze: " << e.what() << '\n';
    return kExitPipeline;
  }
}

}  // namespace cheshire::cli
