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

// Weak values <post|A|pre> / <post|pre> and the Cheshire Cat predictions.

#include <complex>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "cheshire/beamline.hpp"
#include "cheshire/hilbert.hpp"

namespace cheshire {

inline constexpr double kDefaultOverlapThreshold = 1e-10;

struct WeakValue {
  Amplitude value;
  std::string observable_label;
  std::string pre_label;
  std::string post_label;
};

/// Throws OrthogonalSelection when |<post|pre>| <= overlap_threshold.
///
/// The observable need not be a physical evolution, so A|pre> is formed as a
/// raw vector rather than through apply().
inline WeakValue weak_value(const SpinPathState& pre, const SpinPathState& post,
                            const BeamOperator& obs, std::string_view observable_label = "A",
                            double overlap_threshold = kDefaultOverlapThreshold,
                            std::string_view pre_label = "psi_i",
                            std::string_view post_label = "psi_f") {
  const Amplitude overlap = inner(post, pre);
  if (std::abs(overlap) <= overlap_threshold) {
    throw OrthogonalSelection("weak value of " + std::string(observable_label) +
                              " undefined: |<" + std::string(post_label) + "|" +
                              std::string(pre_label) + ">| below threshold");
  }
  const Amplitude numerator = post.amplitudes().dot(obs.matrix() * pre.amplitudes());
  return {numerator / overlap, std::string(observable_label), std::string(pre_label),
          std::string(post_label)};
}

/// <AB>_w - <A>_w <B>_w. Nonzero whenever the product rule fails.
inline Amplitude product_rule_gap(const SpinPathState& pre, const SpinPathState& post,
                                  const BeamOperator& a, const BeamOperator& b,
                                  double overlap_threshold = kDefaultOverlapThreshold) {
  const auto ab = weak_value(pre, post, a * b, "AB", overlap_threshold).value;
  const auto wa = weak_value(pre, post, a, "A", overlap_threshold).value;
  const auto wb = weak_value(pre, post, b, "B", overlap_threshold).value;
  return ab - wa * wb;
}

namespace observables {

inline BeamOperator path_projector(Path j) { return tensor(ops::identity2(), ops::projector(j)); }

/// sigma_z Pi_j: the spin component along z localized in path j.
inline BeamOperator spin_in_path(Path j) { return tensor(ops::sigma_z(), ops::projector(j)); }

inline BeamOperator spin_z() { return tensor(ops::sigma_z(), ops::identity2()); }

}  // namespace observables

/// The headline weak values for the Cheshire selection with postselection
/// phase `post_chi` (0 reproduces the textbook setting).
struct CheshireWeakValues {
  WeakValue path_I;
  WeakValue path_II;
  WeakValue spin_path_I;
  WeakValue spin_path_II;
  WeakValue spin;
  /// <sigma_z Pi_II>_w - <sigma_z>_w <Pi_II>_w.
  Amplitude product_gap;
};

inline CheshireWeakValues cheshire_weak_values(double post_chi = 0.0,
                                               double overlap_threshold = kDefaultOverlapThreshold) {
  const auto pre = preselected_state();
  const auto post = postselected_state(post_chi);
  auto wv = [&](const BeamOperator& a, std::string_view label) {
    return weak_value(pre, post, a, label, overlap_threshold);
  };
  return {wv(observables::path_projector(Path::I), "Pi_I"),
          wv(observables::path_projector(Path::II), "Pi_II"),
          wv(observables::spin_in_path(Path::I), "sz Pi_I"),
          wv(observables::spin_in_path(Path::II), "sz Pi_II"),
          wv(observables::spin_z(), "sz"),
          product_rule_gap(pre, post, observables::spin_z(), observables::path_projector(Path::II),
                           overlap_threshold)};
}

struct TheoryRow {
  std::string label;
  double value;
};

/// Theory values in the form the measurement reports them: path weak values
/// as real numbers, spin-path weak values as squared magnitudes.
inline std::vector<TheoryRow> predicted_table() {
  return {{"<Pi_I>_w", 0.0},
          {"<Pi_II>_w", 1.0},
          {"|<sz Pi_I>_w|^2", 1.0},
          {"|<sz Pi_II>_w|^2", 0.0}};
}

}  // namespace cheshire
