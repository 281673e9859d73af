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

// Pre/postselected states and interferometer elements as BeamOperators.
//
// Beamsplitters are not explicit elements: the preselected state is the
// state after the first splitter, and recombination is a projection onto
// the O- or H-port path state.

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <type_traits>
#include <variant>

#include "cheshire/hilbert.hpp"

namespace cheshire {

/// Relative phase between the paths; multiplies path II by e^{+i chi}, so that
/// projecting onto the chi = 0 O-port state is the same as projecting onto
/// postselected_state(chi).
struct PhaseShifter {
  double chi = 0.0;
};

/// Partial absorber of intensity transmissivity T in one path.
struct Absorber {
  double transmissivity = 1.0;
  Path path = Path::I;
};

/// Path-conditioned spin rotation about z by alpha.
struct Larmor {
  double alpha = 0.0;
  Path path = Path::I;
};

using ElementSpec = std::variant<PhaseShifter, Absorber, Larmor>;

/// Amplitude absorption coefficient M = 1 - sqrt(T).
inline double absorption_coefficient(double transmissivity) {
  return 1.0 - std::sqrt(transmissivity);
}

/// (|S_x;+>|I> + |S_x;->|II>)/sqrt2 = (1/2)(1, 1, 1, -1).
inline SpinPathState preselected_state() {
  const double r = 1.0 / std::numbers::sqrt2;
  return r * SpinPathState::product(spin_state(SpinDirection::PlusX), path_ket(Path::I)) +
         r * SpinPathState::product(spin_state(SpinDirection::MinusX), path_ket(Path::II));
}

/// O-port path state (|I> + e^{-i chi}|II>)/sqrt2.
inline PathKet o_port_path(double chi) {
  const double r = 1.0 / std::numbers::sqrt2;
  return PathKet(r, r * std::polar(1.0, -chi));
}

/// H-port path state (|I> - e^{-i chi}|II>)/sqrt2, the orthogonal complement
/// of the O-port state. This is a convention; no spin analysis on this port.
inline PathKet h_port_path(double chi) {
  const double r = 1.0 / std::numbers::sqrt2;
  return PathKet(r, -r * std::polar(1.0, -chi));
}

/// |S_x;-> (x) (|I> + e^{-i chi}|II>)/sqrt2.
inline SpinPathState postselected_state(double chi) {
  if (!std::isfinite(chi)) throw InvalidArgument("postselected_state: chi must be finite");
  return SpinPathState::product(spin_state(SpinDirection::MinusX), o_port_path(chi));
}

/// Multiplies both spin amplitudes on `path` by sqrt(T). Hermitian, and
/// non-unitary for T < 1.
inline BeamOperator absorber_operator(double transmissivity, Path path) {
  if (!(transmissivity > 0.0 && transmissivity <= 1.0))
    throw InvalidArgument("absorber_operator: transmissivity must lie in (0, 1]");
  const Path other = path == Path::I ? Path::II : Path::I;
  return tensor(ops::identity2(),
                std::sqrt(transmissivity) * ops::projector(path) + ops::projector(other));
}

/// exp(+i alpha sigma_z Pi_j / 2): up on `path` gets e^{i alpha/2}, down
/// gets e^{-i alpha/2}, the other path is untouched.
inline BeamOperator larmor_operator(double alpha, Path path) {
  if (!std::isfinite(alpha)) throw InvalidArgument("larmor_operator: alpha must be finite");
  const Path other = path == Path::I ? Path::II : Path::I;
  Mat2 rotation = Mat2::Zero();
  rotation(0, 0) = std::polar(1.0, alpha / 2);
  rotation(1, 1) = std::polar(1.0, -alpha / 2);
  return tensor(rotation, ops::projector(path)) + tensor(ops::identity2(), ops::projector(other));
}

inline BeamOperator phase_shifter_operator(double chi) {
  if (!std::isfinite(chi)) throw InvalidArgument("phase_shifter_operator: chi must be finite");
  Mat2 path = Mat2::Zero();
  path(0, 0) = 1.0;
  path(1, 1) = std::polar(1.0, chi);
  return tensor(ops::identity2(), path);
}

inline BeamOperator element_operator(const ElementSpec& e) {
  return std::visit(
      [](const auto& el) -> BeamOperator {
        using T = std::decay_t<decltype(el)>;
        if constexpr (std::is_same_v<T, PhaseShifter>) {
          return phase_shifter_operator(el.chi);
        } else if constexpr (std::is_same_v<T, Absorber>) {
          return absorber_operator(el.transmissivity, el.path);
        } else {
          return larmor_operator(el.alpha, el.path);
        }
      },
      e);
}

/// Whole-beamline evolution; the first element acts first.
inline BeamOperator compose(std::span<const ElementSpec> elements) {
  BeamOperator::Matrix m = BeamOperator::Matrix::Identity();
  for (const auto& e : elements) m = element_operator(e).matrix() * m;
  return BeamOperator(m);
}

inline std::string describe(const ElementSpec& e) {
  return std::visit(
      [](const auto& el) -> std::string {
        using T = std::decay_t<decltype(el)>;
        if constexpr (std::is_same_v<T, PhaseShifter>) {
          return "PhaseShifter(chi=" + std::to_string(el.chi) + ")";
        } else if constexpr (std::is_same_v<T, Absorber>) {
          return "Absorber(T=" + std::to_string(el.transmissivity) + ", path " +
                 to_string(el.path) + ")";
        } else {
          return "Larmor(alpha=" + std::to_string(el.alpha) + ", path " + to_string(el.path) + ")";
        }
      },
      e);
}

}  // namespace cheshire
