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

#include "cheshire/stochastics.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "cheshire/experiment.hpp"
#include "gtest/gtest.h"

namespace cheshire {
namespace {

double poisson_pmf(double mean, int k) {
  return std::exp(-mean + k * std::log(mean) - std::lgamma(k + 1.0));
}

TEST(DrawPoisson, ZeroMeanGivesZero) {
  RandomStream s(1, "zero");
  for (int i = 0; i < 100; ++i) EXPECT_EQ(draw_poisson(0.0, s), 0u);
}

TEST(DrawPoisson, RejectsInvalidMean) {
  RandomStream s(1, "bad");
  EXPECT_THROW(draw_poisson(-1.0, s), InvalidArgument);
  EXPECT_THROW(draw_poisson(std::nan(""), s), InvalidArgument);
  EXPECT_THROW(draw_poisson(INFINITY, s), InvalidArgument);
}

TEST(DrawPoisson, LargeMeanCentralLimit) {
  RandomStream s(42, "large");
  double sum = 0.0;
  for (int i = 0; i < 1000; ++i) sum += static_cast<double>(draw_poisson(1e6, s));
  EXPECT_NEAR(sum / 1000.0, 1e6, 3.0 * std::sqrt(1e6 / 1000.0));
}

TEST(DrawPoisson, DeterministicGivenSeedAndName) {
  RandomStream a(7, "rep0/REF"), b(7, "rep0/REF"), c(7, "rep0/ABS_I"), d(8, "rep0/REF");
  std::vector<std::uint64_t> va, vb, vc, vd;
  for (int i = 0; i < 50; ++i) {
    const double mean = i % 2 ? 3.0 : 5000.0;
    va.push_back(draw_poisson(mean, a));
    vb.push_back(draw_poisson(mean, b));
    vc.push_back(draw_poisson(mean, c));
    vd.push_back(draw_poisson(mean, d));
  }
  EXPECT_EQ(va, vb);
  EXPECT_NE(va, vc);
  EXPECT_NE(va, vd);
}

TEST(DrawPoisson, FrozenSequence) {
  // Regression guard for cross-platform reproducibility: mt19937_64 output is
  // fixed by the standard and all transformations are done in this library.
  RandomStream s(2026, "frozen");
  std::vector<std::uint64_t> got;
  for (double mean : {0.5, 4.0, 9.9, 10.0, 250.0, 6075.0}) got.push_back(draw_poisson(mean, s));
  const std::vector<std::uint64_t> want = {0, 0, 12, 9, 281, 6035};
  EXPECT_EQ(got, want);
}

// Empirical pmf against the exact Poisson pmf on both sampler branches.
class PoissonPmf : public ::testing::TestWithParam<double> {};

TEST_P(PoissonPmf, MatchesExactDistribution) {
  const double mean = GetParam();
  RandomStream s(99, "pmf");
  constexpr int kDraws = 200000;
  std::map<std::uint64_t, int> hist;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < kDraws; ++i) {
    const auto k = draw_poisson(mean, s);
    ++hist[k];
    sum += static_cast<double>(k);
    sum2 += static_cast<double>(k) * static_cast<double>(k);
  }
  const double m = sum / kDraws;
  const double var = sum2 / kDraws - m * m;
  EXPECT_NEAR(m, mean, 5.0 * std::sqrt(mean / kDraws));
  EXPECT_NEAR(var / mean, 1.0, 0.03);
  // Bins within two standard deviations of the mean.
  const int lo = std::max(0, static_cast<int>(mean - 2 * std::sqrt(mean)));
  const int hi = static_cast<int>(mean + 2 * std::sqrt(mean));
  for (int k = lo; k <= hi; ++k) {
    const double p = poisson_pmf(mean, k);
    const double expected = p * kDraws;
    EXPECT_NEAR(hist[static_cast<std::uint64_t>(k)], expected, 5.0 * std::sqrt(expected) + 1)
        << "mean " << mean << " k " << k;
  }
}

INSTANTIATE_TEST_SUITE_P(Means, PoissonPmf, ::testing::Values(0.3, 3.5, 9.5, 10.0, 25.0, 200.0));

TEST(CountSample, RateAndSigmaFloor) {
  const CountSample c{400.0, 2.0};
  EXPECT_DOUBLE_EQ(c.rate(), 200.0);
  EXPECT_DOUBLE_EQ(c.sigma_rate(), 10.0);
  const CountSample empty{0.0, 4.0};
  EXPECT_DOUBLE_EQ(empty.sigma_rate(), 0.25);
}

TEST(Propagate, Identity) {
  const std::array<Measured, 1> in{{{2.0, 0.05}}};
  const auto out = propagate([](std::span<const double> x) { return x[0]; }, in);
  EXPECT_DOUBLE_EQ(out.value, 2.0);
  EXPECT_NEAR(out.sigma, 0.05, 1e-9);
}

TEST(Propagate, Square) {
  const std::array<Measured, 1> in{{{3.0, 0.1}}};
  const auto out = propagate([](std::span<const double> x) { return x[0] * x[0]; }, in);
  EXPECT_DOUBLE_EQ(out.value, 9.0);
  EXPECT_NEAR(out.sigma, 0.6, 1e-8);
}

TEST(Propagate, RejectsNegativeSigma) {
  const std::array<Measured, 1> in{{{3.0, -0.1}}};
  EXPECT_THROW(propagate([](std::span<const double> x) { return x[0]; }, in), InvalidArgument);
}

TEST(Propagate, PopulationExtractionMatchesAnalyticPartials) {
  const Measured ref{11.25, 0.05}, abs{10.90, 0.09}, t{0.79, 0.01};
  const auto est = extract_population(ref, abs, t, Path::I);
  // d/dI_ref, d/dI_abs, d/dT of (1 - a/r) / (2 (1 - sqrt T)).
  const double m = 1.0 - std::sqrt(t.value);
  const double d_ref = abs.value / (ref.value * ref.value) / (2 * m);
  const double d_abs = -1.0 / (ref.value * 2 * m);
  const double d_t = (1.0 - abs.value / ref.value) / (2 * m * m) / (2 * std::sqrt(t.value));
  const double sigma = std::sqrt(std::pow(d_ref * ref.sigma, 2) + std::pow(d_abs * abs.sigma, 2) +
                                 std::pow(d_t * t.sigma, 2));
  EXPECT_NEAR(est.sigma, sigma, 1e-6);
  // Monte-Carlo oracle (1e6 samples, tests/oracle/cheshire_oracle.py): 0.04160.
  EXPECT_NEAR(est.sigma, 0.0416, 0.002);
}

TEST(Propagate, MeasuredIntensitySigmasAgainstMonteCarlo) {
  // Monte-Carlo standard deviations from tests/oracle/cheshire_oracle.py.
  const double alpha = deg_to_rad(20.0);
  const Measured ref{11.25, 0.05}, t{0.79, 0.01};
  EXPECT_NEAR(extract_population(ref, {8.83, 0.08}, t, Path::II).sigma, 0.06099, 0.003);
  EXPECT_NEAR(extract_spin(ref, {11.59, 0.06}, alpha, Path::I).sigma, 0.23060, 0.006);
  EXPECT_NEAR(extract_spin(ref, {10.97, 0.06}, alpha, Path::II).sigma, 0.22565, 0.006);
}

TEST(Aggregate, SingleRunUnchanged) {
  const WeakValueEstimate e{0.3, 0.2, Method::MAG, Path::II};
  const auto out = aggregate(RunSet({e}));
  EXPECT_EQ(out.value, 0.3);
  EXPECT_EQ(out.sigma, 0.2);
  EXPECT_EQ(out.method, Method::MAG);
  EXPECT_EQ(out.path, Path::II);
}

TEST(Aggregate, TwoEqualRuns) {
  const WeakValueEstimate e{0.7, 0.1, Method::ABS, Path::I};
  const auto out = aggregate(RunSet({e, e}));
  EXPECT_NEAR(out.value, 0.7, 1e-15);
  EXPECT_NEAR(out.sigma, 0.1 / std::sqrt(2.0), 1e-15);
}

TEST(Aggregate, WeightedMean) {
  const auto out = aggregate(RunSet({{1.0, 0.1, Method::ABS, Path::I}, {0.0, 0.3, Method::ABS, Path::I}}));
  EXPECT_NEAR(out.value, 0.9, 1e-12);
  EXPECT_NEAR(out.sigma, 0.0948683, 1e-6);
}

TEST(Aggregate, Rejections) {
  EXPECT_THROW(RunSet({}), InvalidArgument);
  EXPECT_THROW(RunSet({{1.0, 0.1, Method::ABS, Path::I}, {1.0, 0.1, Method::MAG, Path::I}}),
               InvalidArgument);
  EXPECT_THROW(RunSet({{1.0, 0.1, Method::ABS, Path::I}, {1.0, 0.1, Method::ABS, Path::II}}),
               InvalidArgument);
  EXPECT_THROW(aggregate(RunSet({{1.0, 0.0, Method::ABS, Path::I}, {1.0, 0.1, Method::ABS, Path::I}})),
               InvalidArgument);
}

}  // namespace
}  // namespace cheshire
