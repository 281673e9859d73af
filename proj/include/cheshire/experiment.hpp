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

// The five measurement configurations, detector rates, phase-shifter scans,
// fringe fitting, and weak-value extraction from linearized intensities.

#include <array>
#include <cmath>
#include <cstdint>
#include <future>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cheshire/beamline.hpp"
#include "cheshire/errors.hpp"
#include "cheshire/hilbert.hpp"
#include "cheshire/stochastics.hpp"
#include "cheshire/weakvalue.hpp"

namespace cheshire {

enum class ScenarioLabel { REF, ABS_I, ABS_II, MAG_I, MAG_II };

inline constexpr std::array<ScenarioLabel, 5> kAllScenarios = {
    ScenarioLabel::REF, ScenarioLabel::ABS_I, ScenarioLabel::ABS_II, ScenarioLabel::MAG_I,
    ScenarioLabel::MAG_II};

inline std::string to_string(ScenarioLabel l) {
  switch (l) {
    case ScenarioLabel::REF: return "REF";
    case ScenarioLabel::ABS_I: return "ABS_I";
    case ScenarioLabel::ABS_II: return "ABS_II";
    case ScenarioLabel::MAG_I: return "MAG_I";
    case ScenarioLabel::MAG_II: return "MAG_II";
  }
  return "?";
}

inline std::optional<ScenarioLabel> parse_scenario(std::string_view s) {
  for (auto l : kAllScenarios)
    if (to_string(l) == s) return l;
  return std::nullopt;
}

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

struct Scenario {
  ScenarioLabel label = ScenarioLabel::REF;
  std::vector<ElementSpec> elements;
  double transmissivity = 1.0;
  double alpha = 0.0;
};

/// Builds the element list for `label`; T is used by ABS scenarios and alpha
/// by MAG scenarios.
inline Scenario make_scenario(ScenarioLabel label, double transmissivity, double alpha) {
  Scenario s{label, {}, transmissivity, alpha};
  switch (label) {
    case ScenarioLabel::REF: break;
    case ScenarioLabel::ABS_I: s.elements.emplace_back(Absorber{transmissivity, Path::I}); break;
    case ScenarioLabel::ABS_II: s.elements.emplace_back(Absorber{transmissivity, Path::II}); break;
    case ScenarioLabel::MAG_I: s.elements.emplace_back(Larmor{alpha, Path::I}); break;
    case ScenarioLabel::MAG_II: s.elements.emplace_back(Larmor{alpha, Path::II}); break;
  }
  // Validates parameters.
  for (const auto& e : s.elements) (void)element_operator(e);
  return s;
}

enum class Port { O, H };

inline std::string to_string(Port p) { return p == Port::O ? "O" : "H"; }

struct PortIntensity {
  double o = 0.0;
  double h = 0.0;
  double chi = 0.0;
};

namespace detail {

inline double port_probability(const SpinPathState& evolved, const PathKet& port_path,
                               bool spin_analysis) {
  if (spin_analysis) {
    const auto post = SpinPathState::product(spin_state(SpinDirection::MinusX), port_path);
    return std::norm(inner(post, evolved));
  }
  double p = 0.0;
  for (bool up : {true, false}) {
    const auto spin = spin_state(up ? SpinDirection::PlusZ : SpinDirection::MinusZ);
    p += std::norm(inner(SpinPathState::product(spin, port_path), evolved));
  }
  return p;
}

inline void require_flux(double flux) {
  if (!(flux > 0.0) || !std::isfinite(flux)) throw InvalidArgument("flux must be positive");
}

}  // namespace detail

/// Rates for an already composed beamline.
inline PortIntensity port_intensity(const BeamOperator& beamline, double chi, double flux) {
  detail::require_flux(flux);
  const auto evolved = apply(beamline, preselected_state());
  return {flux * detail::port_probability(evolved, o_port_path(chi), true),
          flux * detail::port_probability(evolved, h_port_path(chi), false), chi};
}

/// Spin-analyzed O-detector rate: flux |<psi_f(chi)| U |psi_i>|^2.
inline double o_port_rate(const Scenario& s, double chi, double flux) {
  return port_intensity(compose(s.elements), chi, flux).o;
}

/// H-detector rate, spin traced out.
inline double h_port_rate(const Scenario& s, double chi, double flux) {
  return port_intensity(compose(s.elements), chi, flux).h;
}

/// O-detector rate with the spin analyzer removed. O (unanalyzed) + H equals
/// flux times the transmitted fraction.
inline double o_port_rate_unanalyzed(const Scenario& s, double chi, double flux) {
  detail::require_flux(flux);
  const auto evolved = apply(compose(s.elements), preselected_state());
  return flux * detail::port_probability(evolved, o_port_path(chi), false);
}

struct InterferogramSample {
  double chi = 0.0;
  double o_counts = 0.0;
  double h_counts = 0.0;
  double dwell = 1.0;
};

/// A phase-shifter scan. Counts are integers in stochastic mode and expected
/// values in analytic mode.
class Interferogram {
 public:
  Interferogram() = default;

  /// Requires strictly increasing chi, finite non-negative counts, dwell > 0.
  explicit Interferogram(std::vector<InterferogramSample> samples, double flux_calibration = 0.0)
      : samples_(std::move(samples)), flux_calibration_(flux_calibration) {
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      if (auto problem = check(i)) throw InvalidArgument("Interferogram sample " +
                                                         std::to_string(i) + ": " + *problem);
    }
  }

  std::span<const InterferogramSample> samples() const { return samples_; }
  double flux_calibration() const { return flux_calibration_; }
  std::size_t size() const { return samples_.size(); }

 private:
  std::optional<std::string> check(std::size_t i) const {
    const auto& s = samples_[i];
    if (!std::isfinite(s.chi)) return "non-finite chi";
    if (i > 0 && !(s.chi > samples_[i - 1].chi)) return "chi not strictly increasing";
    if (!std::isfinite(s.o_counts) || s.o_counts < 0.0) return "invalid O counts";
    if (!std::isfinite(s.h_counts) || s.h_counts < 0.0) return "invalid H counts";
    if (!std::isfinite(s.dwell) || !(s.dwell > 0.0)) return "dwell must be positive";
    return std::nullopt;
  }

  std::vector<InterferogramSample> samples_;
  double flux_calibration_ = 0.0;
};

/// `points` equally spaced phases over [-span/2, span/2].
inline std::vector<double> chi_grid(int points, double span = 2.0 * std::numbers::pi) {
  if (points < 1) throw InvalidArgument("chi_grid: need at least one point");
  if (points == 1) return {0.0};
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) grid[k] = -span / 2 + span * k / (points - 1);
  return grid;
}

struct ScanMode {
  enum class Kind { Analytic, Stochastic };
  Kind kind = Kind::Analytic;
  std::uint64_t seed = 0;

  static ScanMode analytic() { return {}; }
  static ScanMode stochastic(std::uint64_t seed) { return {Kind::Stochastic, seed}; }
  bool is_stochastic() const { return kind == Kind::Stochastic; }
};

/// Records O and H counts over `chi_grid`. Stochastic mode draws Poisson
/// counts from a stream named `stream_name` (default: the scenario label).
inline Interferogram scan(const Scenario& s, std::span<const double> grid, double flux,
                          double dwell, const ScanMode& mode, std::string_view stream_name = {}) {
  if (grid.empty()) throw InvalidArgument("scan: empty chi grid");
  if (!(dwell > 0.0) || !std::isfinite(dwell)) throw InvalidArgument("scan: dwell must be positive");
  const auto beamline = compose(s.elements);
  std::optional<RandomStream> stream;
  if (mode.is_stochastic())
    stream.emplace(mode.seed, stream_name.empty() ? to_string(s.label) : std::string(stream_name));
  std::vector<InterferogramSample> samples;
  samples.reserve(grid.size());
  for (double chi : grid) {
    const auto rate = port_intensity(beamline, chi, flux);
    double o = rate.o * dwell;
    double h = rate.h * dwell;
    if (stream) {
      o = static_cast<double>(draw_poisson(o, *stream));
      h = static_cast<double>(draw_poisson(h, *stream));
    }
    samples.push_back({chi, o, h, dwell});
  }
  return Interferogram(std::move(samples), flux);
}

/// Single-harmonic fringe fit: rate(chi) = mean (1 + contrast cos(chi + phase)).
struct FitResult {
  double mean = 0.0;
  double contrast = 0.0;
  double phase = 0.0;
  double intensity_at_zero = 0.0;
  /// Covariance of (mean, contrast, phase).
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  double sigma_intensity_at_zero = 0.0;
  double chi_squared = 0.0;
  std::size_t dof = 0;

  double sigma_mean() const { return std::sqrt(covariance(0, 0)); }
  double sigma_contrast() const { return std::sqrt(covariance(1, 1)); }
  double sigma_phase() const { return std::sqrt(covariance(2, 2)); }
  Measured at_zero() const { return {intensity_at_zero, sigma_intensity_at_zero}; }
};

/// Weighted least squares in rate units with Poisson weights
/// (sigma^2 = counts, floor 1). The model is linear in
/// (mean, mean*c*cos(phase), -mean*c*sin(phase)), so the fit is a direct
/// solve; contrast >= 0 with the sign folded into the phase.
///
/// Throws FitDegenerate for fewer than 4 samples, a chi span below pi, a
/// singular normal matrix, or a non-positive fitted mean.
inline FitResult fit_interferogram(const Interferogram& g, Port port) {
  const auto samples = g.samples();
  if (samples.size() < 4) throw FitDegenerate("fit: need at least 4 samples");
  if (samples.back().chi - samples.front().chi < std::numbers::pi - 1e-12)
    throw FitDegenerate("fit: chi must span at least half a period");

  Eigen::Matrix3d normal = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  std::vector<std::pair<Eigen::Vector3d, CountSample>> rows;
  rows.reserve(samples.size());
  for (const auto& s : samples) {
    const CountSample c{port == Port::O ? s.o_counts : s.h_counts, s.dwell};
    const Eigen::Vector3d x(1.0, std::cos(s.chi), std::sin(s.chi));
    const double w = 1.0 / (c.sigma_rate() * c.sigma_rate());
    normal += w * x * x.transpose();
    rhs += w * c.rate() * x;
    rows.emplace_back(x, c);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(normal);
  const auto ev = eig.eigenvalues();
  if (!(ev.minCoeff() > 1e-12 * ev.maxCoeff())) throw FitDegenerate("fit: singular normal matrix");
  const Eigen::Matrix3d cov_linear = normal.inverse();
  const Eigen::Vector3d p = cov_linear * rhs;
  const double a = p(0), b = p(1), c = p(2);
  if (!(a > 0.0)) throw FitDegenerate("fit: non-positive mean rate");

  FitResult r;
  const double amp = std::hypot(b, c);
  r.mean = a;
  r.contrast = amp / a;
  r.phase = std::atan2(-c, b);
  r.intensity_at_zero = a + b;
  r.sigma_intensity_at_zero =
      std::sqrt(cov_linear(0, 0) + cov_linear(1, 1) + 2.0 * cov_linear(0, 1));

  if (amp > 1e-12 * a) {
    Eigen::Matrix3d jac;
    jac << 1.0, 0.0, 0.0,
        -amp / (a * a), b / (amp * a), c / (amp * a),
        0.0, c / (amp * amp), -b / (amp * amp);
    r.covariance = jac * cov_linear * jac.transpose();
  } else {
    // No resolvable fringe: phase is undetermined.
    r.covariance(0, 0) = cov_linear(0, 0);
    r.covariance(1, 1) = 0.5 * (cov_linear(1, 1) + cov_linear(2, 2)) / (a * a);
    r.covariance(2, 2) = std::numbers::pi * std::numbers::pi;
  }

  for (const auto& [x, cs] : rows) {
    const double resid = (cs.rate() - p.dot(x)) / cs.sigma_rate();
    r.chi_squared += resid * resid;
  }
  r.dof = samples.size() - 3;
  return r;
}

/// Absorber extraction: I_abs = I_ref [1 - 2 M <Pi_j>_w], M = 1 - sqrt(T).
/// Sigma by first-order propagation over I_ref, I_abs and T.
inline WeakValueEstimate extract_population(Measured i_ref, Measured i_abs, Measured t, Path path) {
  if (!(i_ref.value > 0.0)) throw InvalidArgument("extract_population: I_ref must be positive");
  if (!(t.value > 0.0 && t.value < 1.0))
    throw InvalidArgument("extract_population: T must lie in (0, 1); T = 1 carries no information");
  const std::array<Measured, 3> in{i_ref, i_abs, t};
  const auto out = propagate(
      [](std::span<const double> x) {
        return (1.0 - x[1] / x[0]) / (2.0 * absorption_coefficient(x[2]));
      },
      in);
  return {out.value, out.sigma, Method::ABS, path};
}

/// Magnetic-field extraction of |<sz Pi_j>_w|^2:
///   path I:  I_mag = I_ref [1 + (alpha^2/4) |w|^2]
///   path II: I_mag = I_ref [1 - alpha^2/4 + (alpha^2/4) |w|^2]
inline WeakValueEstimate extract_spin(Measured i_ref, Measured i_mag, double alpha, Path path) {
  if (!(i_ref.value > 0.0)) throw InvalidArgument("extract_spin: I_ref must be positive");
  if (alpha == 0.0 || !std::isfinite(alpha))
    throw InvalidArgument("extract_spin: alpha must be finite and non-zero");
  const double quarter_a2 = alpha * alpha / 4.0;
  const double offset = path == Path::I ? 0.0 : quarter_a2;
  const std::array<Measured, 2> in{i_ref, i_mag};
  const auto out = propagate(
      [&](std::span<const double> x) { return (x[1] / x[0] - 1.0 + offset) / quarter_a2; }, in);
  return {out.value, out.sigma, Method::MAG, path};
}

/// O-port intensity ratio to REF at chi = 0 predicted by the linearized
/// formulas with the ideal weak values.
inline double linearized_ratio(ScenarioLabel label, double transmissivity, double alpha) {
  const double m = absorption_coefficient(transmissivity);
  const double q = alpha * alpha / 4.0;
  switch (label) {
    case ScenarioLabel::REF: return 1.0;
    case ScenarioLabel::ABS_I: return 1.0;
    case ScenarioLabel::ABS_II: return 1.0 - 2.0 * m;
    case ScenarioLabel::MAG_I: return 1.0 + q;
    case ScenarioLabel::MAG_II: return 1.0 - q;
  }
  return 1.0;
}

/// Exact simulated O-port ratio to REF at chi = 0.
inline double exact_ratio(ScenarioLabel label, double transmissivity, double alpha) {
  const double ref = o_port_rate(make_scenario(ScenarioLabel::REF, 1.0, 0.0), 0.0, 1.0);
  return o_port_rate(make_scenario(label, transmissivity, alpha), 0.0, 1.0) / ref;
}

struct ExperimentConfig {
  double transmissivity = 0.79;
  double sigma_transmissivity = 0.01;
  double alpha = deg_to_rad(20.0);
  double flux = 45.0;
  double dwell = 556.0;
  std::vector<double> chi_grid = cheshire::chi_grid(25);
  ScanMode mode;
};

struct ScenarioRun {
  Scenario scenario;
  Interferogram interferogram;
  FitResult fit_o;
  FitResult fit_h;
};

/// One extracted quantity next to its theory value. `truncation_residue` is
/// what the linearized extraction returns on exact (noise-free) intensities
/// minus the theory value; `dropped_imaginary` is Im of the underlying weak
/// value, which the extraction neglects.
struct EstimateReport {
  std::string label;
  WeakValueEstimate estimate;
  double theory = 0.0;
  double truncation_residue = 0.0;
  double dropped_imaginary = 0.0;
};

struct ExperimentResult {
  std::vector<ScenarioRun> scans;  // REF, ABS_I, ABS_II, MAG_I, MAG_II
  std::array<EstimateReport, 4> estimates;  // Pi_I, Pi_II, |sz Pi_I|^2, |sz Pi_II|^2
  std::vector<TheoryRow> theory;

  const ScenarioRun& run(ScenarioLabel l) const { return scans.at(static_cast<std::size_t>(l)); }
};

inline std::string stream_name(int repetition, ScenarioLabel label) {
  return "rep" + std::to_string(repetition) + "/" + to_string(label);
}

inline void validate(const ExperimentConfig& cfg) {
  if (!(cfg.transmissivity > 0.0 && cfg.transmissivity < 1.0))
    throw InvalidArgument("experiment: T must lie in (0, 1)");
  if (!(cfg.sigma_transmissivity >= 0.0)) throw InvalidArgument("experiment: sigma_T must be >= 0");
  if (cfg.alpha == 0.0 || !std::isfinite(cfg.alpha))
    throw InvalidArgument("experiment: alpha must be finite and non-zero");
  detail::require_flux(cfg.flux);
  if (!(cfg.dwell > 0.0)) throw InvalidArgument("experiment: dwell must be positive");
}

/// Scans and fits all five scenarios, then extracts the four weak values from
/// the fitted chi = 0 O-port intensities. Scans run concurrently, each with
/// its own stream named by (repetition, label).
inline ExperimentResult run_cheshire_experiment(const ExperimentConfig& cfg, int repetition = 0) {
  validate(cfg);
  std::vector<std::future<ScenarioRun>> jobs;
  for (auto label : kAllScenarios) {
    jobs.push_back(std::async(std::launch::async, [&cfg, label, repetition] {
      auto scenario = make_scenario(label, cfg.transmissivity, cfg.alpha);
      auto g = scan(scenario, cfg.chi_grid, cfg.flux, cfg.dwell, cfg.mode,
                    stream_name(repetition, label));
      auto fo = fit_interferogram(g, Port::O);
      auto fh = fit_interferogram(g, Port::H);
      return ScenarioRun{std::move(scenario), std::move(g), fo, fh};
    }));
  }
  ExperimentResult result;
  for (auto& j : jobs) result.scans.push_back(j.get());

  const auto ref = result.run(ScenarioLabel::REF).fit_o.at_zero();
  const Measured t{cfg.transmissivity, cfg.sigma_transmissivity};
  auto at_zero = [&](ScenarioLabel l) { return result.run(l).fit_o.at_zero(); };
  const std::array<WeakValueEstimate, 4> est = {
      extract_population(ref, at_zero(ScenarioLabel::ABS_I), t, Path::I),
      extract_population(ref, at_zero(ScenarioLabel::ABS_II), t, Path::II),
      extract_spin(ref, at_zero(ScenarioLabel::MAG_I), cfg.alpha, Path::I),
      extract_spin(ref, at_zero(ScenarioLabel::MAG_II), cfg.alpha, Path::II)};

  // Noise-free extraction for the residue annotation.
  auto exact = [&](ScenarioLabel l) {
    return Measured{exact_ratio(l, cfg.transmissivity, cfg.alpha), 0.0};
  };
  const Measured one{1.0, 0.0};
  const Measured t_exact{cfg.transmissivity, 0.0};
  const std::array<double, 4> noiseless = {
      extract_population(one, exact(ScenarioLabel::ABS_I), t_exact, Path::I).value,
      extract_population(one, exact(ScenarioLabel::ABS_II), t_exact, Path::II).value,
      extract_spin(one, exact(ScenarioLabel::MAG_I), cfg.alpha, Path::I).value,
      extract_spin(one, exact(ScenarioLabel::MAG_II), cfg.alpha, Path::II).value};

  const auto wv = cheshire_weak_values(0.0);
  const std::array<double, 4> imag = {wv.path_I.value.imag(), wv.path_II.value.imag(),
                                      wv.spin_path_I.value.imag(), wv.spin_path_II.value.imag()};
  result.theory = predicted_table();
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& row = result.theory[k];
    result.estimates[k] = {row.label, est[k], row.value, noiseless[k] - row.value, imag[k]};
  }
  return result;
}

}  // namespace cheshire
