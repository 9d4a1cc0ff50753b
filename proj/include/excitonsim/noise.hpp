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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "excitonsim/errors.hpp"
#include "excitonsim/random.hpp"

namespace excitonsim {

enum class NoiseKind { OrnsteinUhlenbeck, White, Static };

/// Site-energy fluctuation model.
///
/// OrnsteinUhlenbeck: <de_i(t) de_j(0)> = delta_ij (gamma/tau) exp(-|t|/tau).
/// White: the tau -> 0 limit, <de_i(t) de_j(0)> = 2 gamma delta(t).
/// Static: frozen Gaussian disorder of the given variance (the tau -> inf
/// limit at fixed gamma/tau).
struct NoiseSpec {
  NoiseKind kind = NoiseKind::White;
  double gamma = 0.0;
  double tau = 0.0;
  double variance = 0.0;

  static NoiseSpec ornstein_uhlenbeck(double gamma, double tau) {
    NoiseSpec s{NoiseKind::OrnsteinUhlenbeck, gamma, tau, 0.0};
    s.validate();
    return s;
  }
  static NoiseSpec white(double gamma) {
    NoiseSpec s{NoiseKind::White, gamma, 0.0, 0.0};
    s.validate();
    return s;
  }
  static NoiseSpec static_disorder(double variance) {
    NoiseSpec s{NoiseKind::Static, 0.0, 0.0, variance};
    s.validate();
    return s;
  }

  /// Stationary variance of the instantaneous fluctuation.
  double amplitude() const {
    switch (kind) {
      case NoiseKind::OrnsteinUhlenbeck: return gamma / tau;
      case NoiseKind::Static: return variance;
      case NoiseKind::White: break;
    }
    throw std::invalid_argument("NoiseSpec: white noise has no instantaneous amplitude");
  }

  void validate() const {
    switch (kind) {
      case NoiseKind::OrnsteinUhlenbeck:
        detail::require(tau > 0.0 && std::isfinite(tau), "NoiseSpec: OU noise requires tau > 0");
        detail::require(gamma >= 0.0 && std::isfinite(gamma), "NoiseSpec: gamma must be >= 0");
        return;
      case NoiseKind::White:
        detail::require(gamma >= 0.0 && std::isfinite(gamma), "NoiseSpec: gamma must be >= 0");
        return;
      case NoiseKind::Static:
        detail::require(variance >= 0.0 && std::isfinite(variance),
                        "NoiseSpec: static variance must be >= 0");
        return;
    }
    throw std::invalid_argument("NoiseSpec: unknown kind");
  }
};

/// Realized fluctuation path, one row per propagation step.
///
/// For OU and Static noise, sample(s, i) is de_i(s dt), held constant over
/// step s. For White noise the instantaneous value does not exist and
/// sample(s, i) is the integrated phase over step s, with variance 2 gamma dt.
struct NoiseTrajectory {
  std::size_t n_sites = 0;
  std::size_t n_steps = 0;
  double dt = 0.0;
  bool is_integrated_phase = false;
  std::vector<double> samples;  // row-major n_steps x n_sites

  double sample(std::size_t step, std::size_t site) const { return samples[step * n_sites + site]; }
  std::span<const double> row(std::size_t step) const {
    return std::span<const double>(samples).subspan(step * n_sites, n_sites);
  }
};

inline std::vector<double> sample_initial(const NoiseSpec& spec, std::size_t n_sites, RandomStream& rng) {
  spec.validate();
  detail::require(spec.kind != NoiseKind::White,
                  "sample_initial: white noise has no instantaneous value");
  const double sigma = std::sqrt(spec.amplitude());
  std::vector<double> out(n_sites);
  for (auto& v : out) v = rng.normal() * sigma;
  return out;
}

/// Exact OU update over dt with an externally supplied standard-normal draw.
inline double ou_update(double current, double dt, const NoiseSpec& spec, double normal_draw) {
  detail::require(spec.kind == NoiseKind::OrnsteinUhlenbeck, "ou_update: requires OU noise");
  detail::require(dt > 0.0, "ou_update: dt must be positive");
  const double decay = std::exp(-dt / spec.tau);
  // 1 - exp(-2dt/tau), accurate for dt << tau
  const double spread = -std::expm1(-2.0 * dt / spec.tau);
  return current * decay + normal_draw * std::sqrt(spec.amplitude() * spread);
}

inline double gillespie_step(double current, double dt, const NoiseSpec& spec, RandomStream& rng) {
  spec.validate();
  detail::require(spec.kind == NoiseKind::OrnsteinUhlenbeck, "gillespie_step: requires OU noise");
  detail::require(dt > 0.0, "gillespie_step: dt must be positive");
  return ou_update(current, dt, spec, rng.normal());
}

/// Draws a full path. Draw order is row-major (step, then site), so the
/// stream is consumed identically by every engine.
inline NoiseTrajectory generate_trajectory(const NoiseSpec& spec, std::size_t n_sites, std::size_t n_steps,
                                           double dt, RandomStream& rng) {
  spec.validate();
  detail::require(n_steps >= 1, "generate_trajectory: n_steps must be >= 1");
  detail::require(n_sites >= 1, "generate_trajectory: n_sites must be >= 1");
  detail::require(dt > 0.0, "generate_trajectory: dt must be positive");

  NoiseTrajectory traj;
  traj.n_sites = n_sites;
  traj.n_steps = n_steps;
  traj.dt = dt;
  traj.is_integrated_phase = spec.kind == NoiseKind::White;
  traj.samples.resize(n_sites * n_steps);

  switch (spec.kind) {
    case NoiseKind::White: {
      const double sigma = std::sqrt(2.0 * spec.gamma * dt);
      for (auto& v : traj.samples) v = sigma * rng.normal();
      break;
    }
    case NoiseKind::Static: {
      const auto first = sample_initial(spec, n_sites, rng);
      for (std::size_t s = 0; s < n_steps; ++s) {
        std::copy(first.begin(), first.end(), traj.samples.begin() + static_cast<std::ptrdiff_t>(s * n_sites));
      }
      break;
    }
    case NoiseKind::OrnsteinUhlenbeck: {
      const auto first = sample_initial(spec, n_sites, rng);
      std::copy(first.begin(), first.end(), traj.samples.begin());
      const double decay = std::exp(-dt / spec.tau);
      const double kick = std::sqrt(spec.amplitude() * -std::expm1(-2.0 * dt / spec.tau));
      for (std::size_t s = 1; s < n_steps; ++s) {
        for (std::size_t i = 0; i < n_sites; ++i) {
          traj.samples[s * n_sites + i] = traj.samples[(s - 1) * n_sites + i] * decay + kick * rng.normal();
        }
      }
      break;
    }
  }
  return traj;
}

inline std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::OrnsteinUhlenbeck: return "ou";
    case NoiseKind::White: return "white";
    case NoiseKind::Static: return "static";
  }
  return "unknown";
}

}  // namespace excitonsim
