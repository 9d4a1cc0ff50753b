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

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "excitonsim/circuit.hpp"
#include "excitonsim/circuit_synth.hpp"
#include "excitonsim/dense_propagator.hpp"
#include "excitonsim/ensemble.hpp"
#include "excitonsim/errors.hpp"
#include "excitonsim/network.hpp"
#include "excitonsim/noise.hpp"
#include "excitonsim/random.hpp"
#include "excitonsim/state.hpp"

namespace excitonsim {

namespace detail {

inline std::size_t register_qubits(const StateVector& state) {
  const std::size_t dim = state.dim();
  require(dim >= 1 && std::has_single_bit(dim), "emulator: state dimension must be a power of two");
  return static_cast<std::size_t>(std::countr_zero(dim));
}

inline void apply_single(Eigen::VectorXcd& psi, std::size_t q, Complex m00, Complex m01, Complex m10, Complex m11) {
  const std::size_t bit = std::size_t{1} << q;
  const auto dim = static_cast<std::size_t>(psi.size());
  for (std::size_t b = 0; b < dim; ++b) {
    if (b & bit) continue;
    const auto i0 = static_cast<Eigen::Index>(b);
    const auto i1 = static_cast<Eigen::Index>(b | bit);
    const Complex a0 = psi(i0);
    const Complex a1 = psi(i1);
    psi(i0) = m00 * a0 + m01 * a1;
    psi(i1) = m10 * a0 + m11 * a1;
  }
}

}  // namespace detail

/// Applies one gate in place. Qubit q is bit q of the basis index.
inline void apply_gate(StateVector& state, const Gate& g) {
  const std::size_t n = detail::register_qubits(state);
  detail::require(g.qubits[0] < n && (g.arity() == 1 || g.qubits[1] < n), "apply_gate: qubit out of range");
  auto& psi = state.amplitudes();
  const auto dim = state.dim();
  const Complex i_unit(0.0, 1.0);
  switch (g.kind) {
    case GateKind::Hadamard: {
      const double r = 1.0 / std::sqrt(2.0);
      detail::apply_single(psi, g.qubits[0], r, r, r, -r);
      return;
    }
    case GateKind::PauliX:
      detail::apply_single(psi, g.qubits[0], 0.0, 1.0, 1.0, 0.0);
      return;
    case GateKind::RX: {
      const double c = std::cos(g.angle / 2.0);
      const double s = std::sin(g.angle / 2.0);
      detail::apply_single(psi, g.qubits[0], c, -i_unit * s, -i_unit * s, c);
      return;
    }
    case GateKind::RZ: {
      const std::size_t bit = std::size_t{1} << g.qubits[0];
      const Complex p0 = std::polar(1.0, -g.angle / 2.0);
      const Complex p1 = std::conj(p0);
      for (std::size_t b = 0; b < dim; ++b) psi(static_cast<Eigen::Index>(b)) *= (b & bit) ? p1 : p0;
      return;
    }
    case GateKind::CNOT: {
      const std::size_t cbit = std::size_t{1} << g.qubits[0];
      const std::size_t tbit = std::size_t{1} << g.qubits[1];
      for (std::size_t b = 0; b < dim; ++b) {
        if ((b & cbit) && !(b & tbit)) std::swap(psi(static_cast<Eigen::Index>(b)), psi(static_cast<Eigen::Index>(b | tbit)));
      }
      return;
    }
    case GateKind::RXX:
    case GateKind::RYY: {
      // cos(t/2) - i sin(t/2) P P on the pair; both couple b with b ^ mask.
      const std::size_t abit = std::size_t{1} << g.qubits[0];
      const std::size_t bbit = std::size_t{1} << g.qubits[1];
      const std::size_t mask = abit | bbit;
      const double c = std::cos(g.angle / 2.0);
      const Complex ms = -i_unit * std::sin(g.angle / 2.0);
      for (std::size_t b = 0; b < dim; ++b) {
        const std::size_t partner = b ^ mask;
        if (partner < b) continue;
        // YY|xy> = -(-1)^(x+y) |~x~y>; same sign in both directions.
        double sign = 1.0;
        if (g.kind == GateKind::RYY) sign = ((b & abit) != 0) == ((b & bbit) != 0) ? -1.0 : 1.0;
        const auto i0 = static_cast<Eigen::Index>(b);
        const auto i1 = static_cast<Eigen::Index>(partner);
        const Complex a0 = psi(i0);
        const Complex a1 = psi(i1);
        psi(i0) = c * a0 + ms * sign * a1;
        psi(i1) = c * a1 + ms * sign * a0;
      }
      return;
    }
  }
}

inline StateVector apply_gate(const StateVector& state, const Gate& g) {
  StateVector out = state;
  apply_gate(out, g);
  return out;
}

inline void run_step_circuit(StateVector& state, const Circuit& circuit) {
  detail::require(detail::register_qubits(state) == circuit.n_qubits(),
                  "run_step_circuit: register size does not match circuit");
  for (const auto& g : circuit.gates()) apply_gate(state, g);
}

inline StateVector run_step_circuit(const StateVector& state, const Circuit& circuit) {
  StateVector out = state;
  run_step_circuit(out, circuit);
  return out;
}

/// Register prepared with the excitation on `site` (1-based) by X gates on
/// |0...0>.
inline StateVector prepare_initial(const Encoding& encoding, std::size_t site) {
  detail::require(site >= 1 && site <= encoding.n_sites, "prepare_initial: site out of range");
  StateVector state = StateVector::basis(encoding.dim(), 0);
  if (encoding.kind == EncodingKind::Physical) {
    apply_gate(state, Gate::pauli_x(site - 1));
  } else {
    const std::size_t index = site - 1;
    for (std::size_t q = 0; q < encoding.n_qubits(); ++q) {
      if ((index >> q) & 1U) apply_gate(state, Gate::pauli_x(q));
    }
  }
  return state;
}

/// Population of a site: marginal P(qubit site-1 = 1) for the physical
/// encoding, |<bin(site-1)|psi>|^2 for the algorithmic one.
inline double site_population(const StateVector& state, const Encoding& encoding, std::size_t site) {
  detail::require(site >= 1 && site <= encoding.n_sites, "site_population: site out of range");
  detail::require(state.dim() == encoding.dim(), "site_population: state does not match encoding");
  if (encoding.kind == EncodingKind::Algorithmic) return state.probability(site - 1);
  const std::size_t bit = std::size_t{1} << (site - 1);
  double p = 0.0;
  for (std::size_t b = 0; b < state.dim(); ++b) {
    if (b & bit) p += state.probability(b);
  }
  return p;
}

struct ShotOutcome {
  int value = 0;
  std::size_t site = 1;
  EncodingKind encoding = EncodingKind::Algorithmic;
};

/// Single projective shot of the site occupation (no collapse applied).
inline ShotOutcome measure_site_once(const StateVector& state, const Encoding& encoding, std::size_t site,
                                     RandomStream& rng) {
  const double p = site_population(state, encoding, site);
  return {rng.uniform() < p ? 1 : 0, site, encoding.kind};
}

struct EstimatorResult {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
};

/// Bernoulli mean with the binomial standard error sqrt(p (1 - p) / n).
inline EstimatorResult estimate_from_shots(std::span<const ShotOutcome> shots) {
  detail::require(!shots.empty(), "estimate_from_shots: no shots");
  std::size_t ones = 0;
  for (const auto& s : shots) ones += static_cast<std::size_t>(s.value);
  const double n = static_cast<double>(shots.size());
  const double p = static_cast<double>(ones) / n;
  return {p, std::sqrt(p * (1.0 - p) / n), shots.size()};
}

struct AlgorithmConfig {
  double dt = 0.05;
  std::size_t n_steps = 1;
  std::size_t trotter_m = 3;
  std::size_t n_trajectories = 1;
  std::size_t initial_site = 1;
  std::vector<std::size_t> observed_sites;  // empty: all sites
  std::uint64_t master_seed = 0;
  unsigned threads = 0;
};

inline Circuit synth_step(const ExcitonNetwork& net, EncodingKind kind, std::span<const double> fluctuations,
                          double dt, std::size_t m) {
  return kind == EncodingKind::Physical ? synth_physical_step(net, fluctuations, dt, m)
                                        : synth_algorithmic_step(net, fluctuations, dt, m);
}

/// Circuit for step s of a noise path. White-noise phases are applied as a
/// diagonal kick ahead of the noise-free Trotter step, as in the dense engine.
inline Circuit synth_noise_step(const ExcitonNetwork& net, EncodingKind kind, const NoiseTrajectory& traj,
                                std::size_t s, std::size_t m) {
  const auto row = traj.row(s);
  if (!traj.is_integrated_phase) return synth_step(net, kind, row, traj.dt, m);
  Circuit c = synth_phase_kick(kind, row);
  const std::vector<double> zero(net.n_sites(), 0.0);
  c.append(synth_step(net, kind, zero, traj.dt, m).gates());
  return c;
}

/// Emulated quantum algorithm: per trajectory, draw the noise path, evolve
/// the register through the synthesized step circuits, and take one shot
/// per observed site at every recorded time from the uncollapsed state.
/// Shot draws follow the noise draws on the same stream, so the noise path
/// of trajectory xi equals that of the dense engine with the same seed.
inline PopulationSeries run_algorithm(const ExcitonNetwork& net, const NoiseSpec& spec, EncodingKind encoding_kind,
                                      const AlgorithmConfig& cfg) {
  spec.validate();
  const std::size_t n = net.n_sites();
  const Encoding encoding{encoding_kind, n};
  detail::require(cfg.n_steps >= 1, "run_algorithm: n_steps must be >= 1");
  detail::require(cfg.trotter_m >= 1, "run_algorithm: Trotter number must be >= 1");
  detail::require(cfg.n_trajectories >= 1, "run_algorithm: n_trajectories must be >= 1");
  detail::require(cfg.dt > 0.0, "run_algorithm: dt must be positive");
  detail::require(cfg.initial_site >= 1 && cfg.initial_site <= n, "run_algorithm: initial site out of range");
  const auto sites = cfg.observed_sites.empty() ? all_sites(n) : cfg.observed_sites;
  for (auto s : sites) detail::require(s >= 1 && s <= n, "run_algorithm: observed site out of range");
  const std::size_t cols = sites.size();
  const std::size_t rows = cfg.n_steps + 1;
  const StateVector initial = prepare_initial(encoding, cfg.initial_site);

  auto make_worker = [&] {
    return [&](std::size_t xi, std::span<double> out) {
      auto rng = RandomStream::for_trajectory(cfg.master_seed, xi);
      const auto traj = generate_trajectory(spec, n, cfg.n_steps, cfg.dt, rng);
      StateVector state = initial;
      auto shoot = [&](std::size_t s) {
        for (std::size_t c = 0; c < cols; ++c) {
          out[s * cols + c] = measure_site_once(state, encoding, sites[c], rng).value;
        }
      };
      shoot(0);
      for (std::size_t s = 0; s < cfg.n_steps; ++s) {
        run_step_circuit(state, synth_noise_step(net, encoding_kind, traj, s, cfg.trotter_m));
        shoot(s + 1);
      }
      const double drift = std::abs(state.norm_squared() - 1.0);
      if (drift > norm_drift_tolerance(cfg.n_steps * cfg.trotter_m)) {
        throw NumericalFailure(detail::audit_message("run_algorithm: norm drift", drift));
      }
    };
  };

  const auto acc = reduce_trajectories(cfg.n_trajectories, rows * cols, cfg.threads, make_worker);
  auto series = PopulationSeries::with_shape(cfg.n_steps, cfg.dt, sites);
  Eigen::MatrixXd se(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  const double xi_count = static_cast<double>(cfg.n_trajectories);
  for (std::size_t s = 0; s < rows; ++s) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double p = acc.mean(s * cols + c);
      series.populations(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(c)) = p;
      se(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(c)) = std::sqrt(p * (1.0 - p) / xi_count);
    }
  }
  series.std_errors = std::move(se);
  return series;
}

/// Noise-free reference for a circuit: populations of the exact state after
/// each synthesized step, without shot noise. Used to separate Trotter error
/// from sampling error.
inline PopulationSeries run_circuit_populations(const ExcitonNetwork& net, const NoiseTrajectory& traj,
                                                EncodingKind encoding_kind, std::size_t m, std::size_t initial_site) {
  const std::size_t n = net.n_sites();
  detail::require(traj.n_sites == n, "run_circuit_populations: noise/network dimension mismatch");
  const Encoding encoding{encoding_kind, n};
  auto series = PopulationSeries::with_shape(traj.n_steps, traj.dt, all_sites(n));
  StateVector state = prepare_initial(encoding, initial_site);
  auto record = [&](std::size_t s) {
    for (std::size_t i = 0; i < n; ++i) {
      series.populations(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(i)) =
          site_population(state, encoding, i + 1);
    }
  };
  record(0);
  for (std::size_t s = 0; s < traj.n_steps; ++s) {
    run_step_circuit(state, synth_noise_step(net, encoding_kind, traj, s, m));
    record(s + 1);
  }
  return series;
}

}  // namespace excitonsim
