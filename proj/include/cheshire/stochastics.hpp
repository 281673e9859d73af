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

// Counting statistics: reproducible random streams, Poisson draws,
// first-order error propagation and inverse-variance aggregation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cheshire/errors.hpp"
#include "cheshire/hilbert.hpp"

namespace cheshire {

namespace detail {

inline constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// An independently seeded stream identified by (seed, name).
///
/// mt19937_64 output is fixed by the standard; conversion to doubles and all
/// sampling are done here so sequences do not depend on the standard library.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::string_view name)
      : engine_(detail::splitmix64(seed ^ detail::splitmix64(detail::fnv1a(name)))) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// Poisson-distributed count with the given mean.
///
/// Sequential inversion below mean 10; above, Hörmann's PTRS transformed
/// rejection (exact, O(1) expected draws).
inline std::uint64_t draw_poisson(double mean, RandomStream& stream) {
  if (!std::isfinite(mean) || mean < 0.0)
    throw InvalidArgument("draw_poisson: mean must be finite and non-negative");
  if (mean == 0.0) return 0;
  if (mean < 10.0) {
    double u = stream.uniform();
    double p = std::exp(-mean);
    std::uint64_t k = 0;
    while (u > p) {
      u -= p;
      ++k;
      p *= mean / static_cast<double>(k);
      if (p <= 0.0) break;  // underflow in the far tail
    }
    return k;
  }
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = stream.uniform() - 0.5;
    const double v = stream.uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

/// A detector count over a dwell time. sigma uses sqrt(N) with a floor of
/// one count.
struct CountSample {
  double counts = 0.0;
  double dwell = 1.0;

  double rate() const { return counts / dwell; }
  double sigma_rate() const { return std::sqrt(std::max(counts, 1.0)) / dwell; }
};

/// A value with an independent Gaussian 1-sigma uncertainty.
struct Measured {
  double value = 0.0;
  double sigma = 0.0;
};

/// First-order propagation with central finite differences,
/// step h_i = max(1e-6, 1e-6 |x_i|).
inline Measured propagate(const std::function<double(std::span<const double>)>& f,
                          std::span<const Measured> inputs) {
  std::vector<double> x(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!(inputs[i].sigma >= 0.0)) throw InvalidArgument("propagate: sigma must be >= 0");
    x[i] = inputs[i].value;
  }
  const double value = f(x);
  double variance = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].sigma == 0.0) continue;
    const double h = std::max(1e-6, 1e-6 * std::abs(x[i]));
    const double xi = x[i];
    x[i] = xi + h;
    const double up = f(x);
    x[i] = xi - h;
    const double down = f(x);
    x[i] = xi;
    const double partial = (up - down) / (2.0 * h);
    variance += partial * partial * inputs[i].sigma * inputs[i].sigma;
  }
  return {value, std::sqrt(variance)};
}

enum class Method { ABS, MAG };

inline std::string to_string(Method m) { return m == Method::ABS ? "ABS" : "MAG"; }

/// An extracted weak value. ABS estimates <Pi_j>_w; MAG estimates
/// |<sz Pi_j>_w|^2.
struct WeakValueEstimate {
  double value = 0.0;
  double sigma = 0.0;
  Method method = Method::ABS;
  Path path = Path::I;
};

/// Estimates of one quantity from independent repetitions.
class RunSet {
 public:
  explicit RunSet(std::vector<WeakValueEstimate> runs) : runs_(std::move(runs)) {
    if (runs_.empty()) throw InvalidArgument("RunSet: empty");
    for (const auto& r : runs_) {
      if (r.method != runs_.front().method || r.path != runs_.front().path)
        throw InvalidArgument("RunSet: mixed method or path");
    }
  }

  std::span<const WeakValueEstimate> runs() const { return runs_; }

 private:
  std::vector<WeakValueEstimate> runs_;
};

/// Inverse-variance weighted mean, sigma = (sum sigma_i^-2)^-1/2.
inline WeakValueEstimate aggregate(const RunSet& set) {
  const auto runs = set.runs();
  if (runs.size() == 1) return runs.front();
  double weight_sum = 0.0;
  double weighted = 0.0;
  for (const auto& r : runs) {
    if (!(r.sigma > 0.0)) throw InvalidArgument("aggregate: every sigma must be positive");
    const double w = 1.0 / (r.sigma * r.sigma);
    weight_sum += w;
    weighted += w * r.value;
  }
  return {weighted / weight_sum, 1.0 / std::sqrt(weight_sum), runs.front().method,
          runs.front().path};
}

}  // namespace cheshire
