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

// Random generators for property tests.

#include <complex>
#include <cstdint>
#include <random>

#include "cheshire/hilbert.hpp"

namespace cheshire::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  Amplitude complex_normal() {
    std::normal_distribution<double> n;
    return {n(rng_), n(rng_)};
  }

  /// Haar-like random unit vector.
  SpinPathState state() {
    SpinPathState::Vector v;
    for (int k = 0; k < 4; ++k) v(k) = complex_normal();
    v /= v.norm();
    return SpinPathState(v);
  }

  BeamOperator matrix() {
    BeamOperator::Matrix m;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) m(r, c) = complex_normal();
    return BeamOperator(m);
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace cheshire::testing
