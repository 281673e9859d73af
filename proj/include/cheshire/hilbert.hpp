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

// Complex linear algebra on the 4-dimensional spin (x) path space.
//
// Basis order is fixed as [up I, down I, up II, down II], spin quantized
// along +z. Index = 2 * path + (spin down ? 1 : 0).

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "cheshire/errors.hpp"

namespace cheshire {

using Amplitude = std::complex<double>;
using Spinor = Eigen::Vector2cd;
using PathKet = Eigen::Vector2cd;
using Mat2 = Eigen::Matrix2cd;

/// Tolerance for every exact-algebra check in dimension 4.
inline constexpr double kExactTolerance = 1e-12;

enum class Path { I, II };

enum class SpinDirection { PlusX, MinusX, PlusZ, MinusZ };

inline std::string to_string(Path p) { return p == Path::I ? "I" : "II"; }

inline constexpr std::size_t basis_index(bool spin_up, Path path) {
  return 2 * static_cast<std::size_t>(path) + (spin_up ? 0 : 1);
}

class SpinPathState {
 public:
  using Vector = Eigen::Vector4cd;

  SpinPathState() : amp_(Vector::Zero()) {}

  /// Rejects non-finite amplitudes and squared norms above 1 + 1e-12.
  explicit SpinPathState(const Vector& amp) : amp_(amp) {
    if (!amp_.allFinite()) throw InvalidArgument("SpinPathState: non-finite amplitude");
    if (amp_.squaredNorm() > 1.0 + kExactTolerance)
      throw InvalidArgument("SpinPathState: squared norm exceeds 1");
  }

  static SpinPathState basis(bool spin_up, Path path) {
    Vector v = Vector::Zero();
    v(basis_index(spin_up, path)) = 1.0;
    return SpinPathState(v);
  }

  /// |spin> (x) |path>.
  static SpinPathState product(const Spinor& spin, const PathKet& path) {
    Vector v;
    for (int p = 0; p < 2; ++p)
      for (int s = 0; s < 2; ++s) v(2 * p + s) = spin(s) * path(p);
    return SpinPathState(v);
  }

  const Vector& amplitudes() const { return amp_; }
  Amplitude operator[](std::size_t k) const { return amp_(static_cast<Eigen::Index>(k)); }
  double squared_norm() const { return amp_.squaredNorm(); }

  friend SpinPathState operator+(const SpinPathState& a, const SpinPathState& b) {
    return SpinPathState(Vector(a.amp_ + b.amp_));
  }
  friend SpinPathState operator*(Amplitude c, const SpinPathState& s) {
    return SpinPathState(Vector(c * s.amp_));
  }

 private:
  Vector amp_;
};

class BeamOperator {
 public:
  using Matrix = Eigen::Matrix4cd;

  /// Flags are computed from the matrix at tolerance 1e-12.
  explicit BeamOperator(const Matrix& m) : m_(m) {
    if (!m_.allFinite()) throw InvalidArgument("BeamOperator: non-finite entry");
    hermitian_ = max_abs(m_ - m_.adjoint()) <= kExactTolerance;
    unitary_ = max_abs(m_.adjoint() * m_ - Matrix::Identity()) <= kExactTolerance;
  }

  static BeamOperator identity() { return BeamOperator(Matrix::Identity()); }

  const Matrix& matrix() const { return m_; }
  Amplitude operator()(int row, int col) const { return m_(row, col); }
  bool hermitian() const { return hermitian_; }
  bool unitary() const { return unitary_; }

  BeamOperator adjoint() const { return BeamOperator(Matrix(m_.adjoint())); }

  friend BeamOperator operator*(const BeamOperator& a, const BeamOperator& b) {
    return BeamOperator(Matrix(a.m_ * b.m_));
  }
  friend BeamOperator operator+(const BeamOperator& a, const BeamOperator& b) {
    return BeamOperator(Matrix(a.m_ + b.m_));
  }
  friend BeamOperator operator-(const BeamOperator& a, const BeamOperator& b) {
    return BeamOperator(Matrix(a.m_ - b.m_));
  }
  friend BeamOperator operator*(Amplitude c, const BeamOperator& a) {
    return BeamOperator(Matrix(c * a.m_));
  }

  static double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

 private:
  Matrix m_;
  bool hermitian_ = false;
  bool unitary_ = false;
};

/// Elementwise max |a - b|.
inline double max_abs_diff(const BeamOperator& a, const BeamOperator& b) {
  return BeamOperator::max_abs(a.matrix() - b.matrix());
}

namespace ops {

inline Mat2 identity2() { return Mat2::Identity(); }

inline Mat2 sigma_x() {
  Mat2 m;
  m << 0, 1, 1, 0;
  return m;
}

inline Mat2 sigma_y() {
  using namespace std::complex_literals;
  Mat2 m;
  m << 0, -1i, 1i, 0;
  return m;
}

inline Mat2 sigma_z() {
  Mat2 m;
  m << 1, 0, 0, -1;
  return m;
}

/// |j><j| on the path factor.
inline Mat2 projector(Path j) {
  Mat2 m = Mat2::Zero();
  m(static_cast<int>(j), static_cast<int>(j)) = 1.0;
  return m;
}

}  // namespace ops

/// Kronecker product spin_op (x) path_op in the fixed basis order.
inline BeamOperator tensor(const Mat2& spin_op, const Mat2& path_op) {
  if (!spin_op.allFinite() || !path_op.allFinite())
    throw InvalidArgument("tensor: non-finite input");
  BeamOperator::Matrix m;
  for (int p = 0; p < 2; ++p)
    for (int s = 0; s < 2; ++s)
      for (int q = 0; q < 2; ++q)
        for (int t = 0; t < 2; ++t) m(2 * p + s, 2 * q + t) = spin_op(s, t) * path_op(p, q);
  return BeamOperator(m);
}

/// <bra|ket>, conjugate-linear in `bra`.
inline Amplitude inner(const SpinPathState& bra, const SpinPathState& ket) {
  return bra.amplitudes().dot(ket.amplitudes());
}

inline SpinPathState apply(const BeamOperator& op, const SpinPathState& s) {
  return SpinPathState(SpinPathState::Vector(op.matrix() * s.amplitudes()));
}

inline Spinor spin_state(SpinDirection d) {
  const double r = 1.0 / std::numbers::sqrt2;
  switch (d) {
    case SpinDirection::PlusX: return Spinor(r, r);
    case SpinDirection::MinusX: return Spinor(r, -r);
    case SpinDirection::PlusZ: return Spinor(1.0, 0.0);
    case SpinDirection::MinusZ: return Spinor(0.0, 1.0);
  }
  return Spinor::Zero();
}

inline PathKet path_ket(Path p) {
  return p == Path::I ? PathKet(1.0, 0.0) : PathKet(0.0, 1.0);
}

}  // namespace cheshire
