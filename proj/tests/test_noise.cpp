// Copyright 2026 The excitonsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "excitonsim/noise.hpp"
#include "excitonsim/random.hpp"

namespace es = excitonsim;

namespace {

double sample_variance(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

// Large-sample variance of the lag-k autocovariance estimate of a Gaussian
// AR(1) series with coefficient rho and stationary variance s2 (Bartlett).
double ar1_autocov_se(double s2, double rho, std::size_t k, std::size_t n) {
  const double r2 = rho * rho;
  const double r2k = std::pow(rho, 2.0 * static_cast<double>(k));
  const double v = (1 + r2) * (1 + r2k) / (1 - r2) - 2.0 * static_cast<double>(k) * r2k;
  return s2 * std::sqrt(v / static_cast<double>(n));
}

TEST(Noise, SpecValidation) {
  EXPECT_THROW(es::NoiseSpec::ornstein_uhlenbeck(1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(es::NoiseSpec::ornstein_uhlenbeck(-1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(es::NoiseSpec::white(-0.1), std::invalid_argument);
  EXPECT_THROW(es::NoiseSpec::static_disorder(-1.0), std::invalid_argument);
  EXPECT_DOUBLE_EQ(es::NoiseSpec::ornstein_uhlenbeck(2.0, 0.5).amplitude(), 4.0);
}

TEST(Noise, InitialZeroAmplitude) {
  es::RandomStream rng(3);
  for (double v : es::sample_initial(es::NoiseSpec::ornstein_uhlenbeck(0.0, 1.0), 4, rng)) EXPECT_EQ(v, 0.0);
}

TEST(Noise, InitialVariance) {
  es::RandomStream rng(4);
  const auto x = es::sample_initial(es::NoiseSpec::ornstein_uhlenbeck(2.0, 2.0), 100000, rng);
  EXPECT_NEAR(sample_variance(x), 1.0, 0.03);
}

TEST(Noise, InitialDeterministic) {
  es::RandomStream a(11), b(11);
  const auto spec = es::NoiseSpec::static_disorder(3.0);
  EXPECT_EQ(es::sample_initial(spec, 8, a), es::sample_initial(spec, 8, b));
}

TEST(Noise, InitialRejectsWhite) {
  es::RandomStream rng(1);
  EXPECT_THROW(es::sample_initial(es::NoiseSpec::white(1.0), 2, rng), std::invalid_argument);
}

TEST(Noise, UpdateWithoutDecayOrDiffusion) {
  const auto spec = es::NoiseSpec::ornstein_uhlenbeck(1.0, 1.0);
  EXPECT_NEAR(es::ou_update(0.7, 1e-12, spec, 0.0), 0.7, 1e-6);
}

TEST(Noise, UpdateRejectsBadInput) {
  es::RandomStream rng(1);
  EXPECT_THROW(es::gillespie_step(0.0, 0.0, es::NoiseSpec::ornstein_uhlenbeck(1, 1), rng), std::invalid_argument);
  EXPECT_THROW(es::gillespie_step(0.0, 0.1, es::NoiseSpec::white(1), rng), std::invalid_argument);
}

TEST(Noise, LongStepForgetsCurrentValue) {
  const auto spec = es::NoiseSpec::ornstein_uhlenbeck(3.0, 1.0);
  es::RandomStream rng(8);
  std::vector<double> x(100000);
  for (auto& v : x) v = es::gillespie_step(50.0, 100.0, spec, rng);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  EXPECT_NEAR(mean, 0.0, 3.0 * std::sqrt(3.0 / static_cast<double>(x.size())));
  EXPECT_NEAR(sample_variance(x), 3.0, 0.1);
}

TEST(Noise, OuAutocorrelation) {
  const double gamma = 1.0, tau = 1.0, dt = 0.05;
  const std::size_t n = 100000;
  const auto spec = es::NoiseSpec::ornstein_uhlenbeck(gamma, tau);
  es::RandomStream rng(2024);
  const auto traj = es::generate_trajectory(spec, 1, n, dt, rng);
  const auto& x = traj.samples;
  const double rho = std::exp(-dt / tau);
  const auto max_lag = static_cast<std::size_t>(5.0 * tau / dt);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    double c = 0.0;
    for (std::size_t s = 0; s + k < n; ++s) c += x[s] * x[s + k];
    c /= static_cast<double>(n - k);
    const double want = gamma / tau * std::exp(-static_cast<double>(k) * dt / tau);
    EXPECT_LE(std::abs(c - want), 3.0 * ar1_autocov_se(gamma / tau, rho, k, n)) << "lag " << k;
  }
}

TEST(Noise, SitesUncorrelated) {
  const double dt = 0.05;
  const std::size_t n = 100000;
  es::RandomStream rng(77);
  const auto traj = es::generate_trajectory(es::NoiseSpec::ornstein_uhlenbeck(1.0, 1.0), 2, n, dt, rng);
  double c = 0.0;
  for (std::size_t s = 0; s < n; ++s) c += traj.sample(s, 0) * traj.sample(s, 1);
  c /= static_cast<double>(n);
  const double rho = std::exp(-dt);
  const double se = std::sqrt((1 + rho * rho) / (1 - rho * rho) / static_cast<double>(n));
  EXPECT_LE(std::abs(c), 3.0 * se);
}

TEST(Noise, StationaryVarianceAtStartAndEnd) {
  const auto spec = es::NoiseSpec::ornstein_uhlenbeck(2.0, 0.5);
  std::vector<double> first, last;
  for (std::uint64_t xi = 0; xi < 20000; ++xi) {
    auto rng = es::RandomStream::for_trajectory(5, xi);
    const auto t = es::generate_trajectory(spec, 1, 50, 0.05, rng);
    first.push_back(t.sample(0, 0));
    last.push_back(t.sample(49, 0));
  }
  const double se = 4.0 * std::sqrt(2.0 / 20000.0);
  EXPECT_NEAR(sample_variance(first), 4.0, 3 * se);
  EXPECT_NEAR(sample_variance(last), 4.0, 3 * se);
}

TEST(Noise, StaticRowsIdentical) {
  es::RandomStream rng(6);
  const auto t = es::generate_trajectory(es::NoiseSpec::static_disorder(2.0), 3, 40, 0.05, rng);
  EXPECT_FALSE(t.is_integrated_phase);
  for (std::size_t s = 1; s < 40; ++s) {
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(t.sample(s, i), t.sample(0, i));
  }
}

TEST(Noise, WhitePhaseVariance) {
  es::RandomStream rng(10);
  const auto t = es::generate_trajectory(es::NoiseSpec::white(1.0), 1, 100000, 0.05, rng);
  EXPECT_TRUE(t.is_integrated_phase);
  EXPECT_NEAR(sample_variance(t.samples), 0.1, 0.003);
}

TEST(Noise, TrajectoryDeterministic) {
  const auto spec = es::NoiseSpec::ornstein_uhlenbeck(1.0, 0.3);
  auto a = es::RandomStream::for_trajectory(9, 17);
  auto b = es::RandomStream::for_trajectory(9, 17);
  EXPECT_EQ(es::generate_trajectory(spec, 4, 100, 0.05, a).samples,
            es::generate_trajectory(spec, 4, 100, 0.05, b).samples);
  auto c = es::RandomStream::for_trajectory(9, 18);
  auto d = es::RandomStream::for_trajectory(9, 17);
  EXPECT_NE(es::generate_trajectory(spec, 4, 100, 0.05, c).samples,
            es::generate_trajectory(spec, 4, 100, 0.05, d).samples);
}

TEST(Noise, ShapeChecks) {
  es::RandomStream rng(1);
  const auto spec = es::NoiseSpec::white(1.0);
  EXPECT_THROW(es::generate_trajectory(spec, 2, 0, 0.05, rng), std::invalid_argument);
  EXPECT_THROW(es::generate_trajectory(spec, 2, 10, -0.05, rng), std::invalid_argument);
  const auto t = es::generate_trajectory(spec, 3, 7, 0.05, rng);
  EXPECT_EQ(t.samples.size(), 21u);
  EXPECT_EQ(t.row(2).size(), 3u);
}

}  // namespace
