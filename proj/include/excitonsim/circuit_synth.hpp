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
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "excitonsim/circuit.hpp"
#include "excitonsim/errors.hpp"
#include "excitonsim/network.hpp"

namespace excitonsim {

/// Coefficients below this magnitude are dropped from decompositions.
inline constexpr double kPauliDropTolerance = 1e-12;

namespace detail {

struct PauliMasks {
  std::uint64_t x = 0;  // qubits carrying X or Y
  std::uint64_t z = 0;  // qubits carrying Z or Y
  unsigned y_count = 0;
};

/// String index k encodes qubit q's letter in base-4 digit q (I, X, Y, Z).
inline PauliMasks masks_of(std::uint64_t k, std::size_t n_qubits) {
  PauliMasks m;
  for (std::size_t q = 0; q < n_qubits; ++q) {
    const auto digit = (k >> (2 * q)) & 3U;
    const std::uint64_t bit = std::uint64_t{1} << q;
    if (digit == 1 || digit == 2) m.x |= bit;
    if (digit == 2 || digit == 3) m.z |= bit;
    if (digit == 2) ++m.y_count;
  }
  return m;
}

inline std::vector<PauliLetter> letters_of(std::uint64_t k, std::size_t n_qubits) {
  std::vector<PauliLetter> letters(n_qubits);
  for (std::size_t q = 0; q < n_qubits; ++q) letters[q] = static_cast<PauliLetter>((k >> (2 * q)) & 3U);
  return letters;
}

/// Index of the Z-only string whose Z letters sit on the bits of `zmask`.
inline std::uint64_t z_string_index(std::uint64_t zmask, std::size_t n_qubits) {
  std::uint64_t k = 0;
  for (std::size_t q = 0; q < n_qubits; ++q) {
    if ((zmask >> q) & 1U) k |= std::uint64_t{3} << (2 * q);
  }
  return k;
}

/// Tr(P h) / 2^n for the string with the given masks; h is zero-padded.
inline double pauli_coefficient(const Eigen::MatrixXd& h, const PauliMasks& m, std::size_t n_qubits) {
  const std::uint64_t full = std::uint64_t{1} << n_qubits;
  const auto d = static_cast<std::uint64_t>(h.rows());
  // For real symmetric h, strings with an odd number of Y have zero weight.
  if (m.y_count % 2 == 1) return 0.0;
  double sum = 0.0;
  for (std::uint64_t c = 0; c < full; ++c) {
    const std::uint64_t r = c ^ m.x;
    if (c >= d || r >= d) continue;
    const double value = h(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r));
    sum += (std::popcount(c & m.z) % 2 == 0) ? value : -value;
  }
  // i^{y_count} with y_count even
  if (m.y_count % 4 == 2) sum = -sum;
  return sum / static_cast<double>(full);
}

}  // namespace detail

inline std::size_t qubits_for_sites(std::size_t n_sites) { return Encoding::algorithmic(n_sites).n_qubits(); }

/// h = sum_k h_k P_k under the binary mapping |i> -> |bin(i-1)>. Terms are
/// ordered by string index (qubit 0 the least significant base-4 digit);
/// the identity term, if non-zero, comes first.
inline std::vector<PauliTerm> pauli_decompose(const HamiltonianMatrix& h, std::size_t n_qubits) {
  detail::require(n_qubits < 31, "pauli_decompose: too many qubits");
  detail::require(h.dim() <= (std::size_t{1} << n_qubits), "pauli_decompose: matrix larger than register");
  detail::require(h.entries.rows() == h.entries.cols(), "pauli_decompose: matrix must be square");
  std::vector<PauliTerm> terms;
  const std::uint64_t n_strings = std::uint64_t{1} << (2 * n_qubits);
  for (std::uint64_t k = 0; k < n_strings; ++k) {
    const auto m = detail::masks_of(k, n_qubits);
    const double c = detail::pauli_coefficient(h.entries, m, n_qubits);
    if (std::abs(c) < kPauliDropTolerance) continue;
    terms.push_back({c, detail::letters_of(k, n_qubits)});
  }
  return terms;
}

/// CNOT-staircase lowering of exp(-i angle P / 2).
///
/// Basis change (H for X, RX(pi/2) for Y), CNOT cascade between consecutive
/// involved qubits in ascending order, RZ(angle) on the last involved qubit,
/// then the mirror image. Uses 2w - 2 CNOTs for a string of weight w.
inline std::vector<Gate> staircase(const PauliTerm& term, double angle) {
  std::vector<std::size_t> involved;
  for (std::size_t q = 0; q < term.letters.size(); ++q) {
    if (term.letters[q] != PauliLetter::I) involved.push_back(q);
  }
  detail::require(!involved.empty(), "staircase: identity string is a global phase");

  constexpr double half_pi = std::numbers::pi / 2.0;
  std::vector<Gate> gates;
  gates.reserve(4 * involved.size() + 1);
  for (auto q : involved) {
    if (term.letters[q] == PauliLetter::X) gates.push_back(Gate::hadamard(q));
    if (term.letters[q] == PauliLetter::Y) gates.push_back(Gate::rx(q, half_pi));
  }
  for (std::size_t k = 0; k + 1 < involved.size(); ++k) gates.push_back(Gate::cnot(involved[k], involved[k + 1]));
  gates.push_back(Gate::rz(involved.back(), angle));
  for (std::size_t k = involved.size() - 1; k > 0; --k) gates.push_back(Gate::cnot(involved[k - 1], involved[k]));
  for (auto q : involved) {
    if (term.letters[q] == PauliLetter::X) gates.push_back(Gate::hadamard(q));
    if (term.letters[q] == PauliLetter::Y) gates.push_back(Gate::rx(q, -half_pi));
  }
  return gates;
}

/// First-order Trotter step of the one-hot (physical) encoding on N qubits.
///
/// Each of the m repetitions is, in time order: RZ(-(e_q + de_q) dt/m) on
/// every qubit q ascending, then for every coupled pair (i, j), i < j in
/// lexicographic order, RXX(V_ij dt/m) followed by RYY(V_ij dt/m).
inline Circuit synth_physical_step(const ExcitonNetwork& net, std::span<const double> fluctuations, double dt,
                                   std::size_t m) {
  const std::size_t n = net.n_sites();
  detail::require(m >= 1, "synth_physical_step: Trotter number must be >= 1");
  detail::require(fluctuations.size() == n, "synth_physical_step: fluctuation vector length must equal n_sites");
  const double h = dt / static_cast<double>(m);
  Circuit c(n);
  for (std::size_t rep = 0; rep < m; ++rep) {
    for (std::size_t q = 0; q < n; ++q) {
      c.append(Gate::rz(q, -(net.site_energies()[q] + fluctuations[q]) * h));
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double v = net.coupling(i, j);
        if (v == 0.0) continue;
        c.append(Gate::rxx(i, j, v * h));
        c.append(Gate::ryy(i, j, v * h));
      }
    }
  }
  return c;
}

/// Pauli terms of one algorithmic Trotter repetition, in application order:
/// every non-identity Z-only string (kept even at zero weight, since the
/// fluctuations enter only through these), then the off-diagonal strings of
/// the coupling matrix. The identity term is dropped as a global phase.
inline std::vector<PauliTerm> algorithmic_step_terms(const ExcitonNetwork& net, std::span<const double> fluctuations) {
  const std::size_t n_qubits = qubits_for_sites(net.n_sites());
  const auto h = build_hamiltonian(net, fluctuations);
  std::vector<PauliTerm> terms;
  const std::uint64_t full = std::uint64_t{1} << n_qubits;
  for (std::uint64_t zmask = 1; zmask < full; ++zmask) {
    const auto k = detail::z_string_index(zmask, n_qubits);
    const double c = detail::pauli_coefficient(h.entries, detail::masks_of(k, n_qubits), n_qubits);
    terms.push_back({c, detail::letters_of(k, n_qubits)});
  }
  for (auto& t : pauli_decompose(h, n_qubits)) {
    if (!t.is_diagonal()) terms.push_back(std::move(t));
  }
  return terms;
}

/// First-order Trotter step of the binary (algorithmic) encoding on
/// ceil(log2 N) qubits: each term h_k P_k becomes exp(-i h_k P_k dt/m),
/// lowered by the staircase with angle 2 h_k dt / m; repeated m times.
inline Circuit synth_algorithmic_step(const ExcitonNetwork& net, std::span<const double> fluctuations, double dt,
                                      std::size_t m) {
  detail::require(m >= 1, "synth_algorithmic_step: Trotter number must be >= 1");
  detail::require(fluctuations.size() == net.n_sites(),
                  "synth_algorithmic_step: fluctuation vector length must equal n_sites");
  const std::size_t n_qubits = qubits_for_sites(net.n_sites());
  const double h = dt / static_cast<double>(m);
  const auto terms = algorithmic_step_terms(net, fluctuations);
  Circuit c(n_qubits);
  for (std::size_t rep = 0; rep < m; ++rep) {
    for (const auto& t : terms) c.append(staircase(t, 2.0 * t.coefficient * h));
  }
  return c;
}

/// Diagonal kick exp(-i diag(phases)) on the encoded register: RZ gates in
/// the physical encoding, Z-string staircases in the algorithmic one.
inline Circuit synth_phase_kick(EncodingKind kind, std::span<const double> phases) {
  const std::size_t n = phases.size();
  const ExcitonNetwork diagonal(std::vector<double>(phases.begin(), phases.end()),
                                Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
  const std::vector<double> zero(n, 0.0);
  return kind == EncodingKind::Physical ? synth_physical_step(diagonal, zero, 1.0, 1)
                                        : synth_algorithmic_step(diagonal, zero, 1.0, 1);
}

/// Removes pairs of identical CNOTs with no gate on either qubit in between,
/// repeating until none remain (cascades such as C1 C2 C2 C1 vanish).
inline Circuit peephole_cancel(const Circuit& c) {
  const auto& in = c.gates();
  std::vector<bool> alive(in.size(), true);
  // Per-qubit stack of surviving gates touching that qubit.
  std::vector<std::vector<std::size_t>> frontier(c.n_qubits());
  for (std::size_t k = 0; k < in.size(); ++k) {
    const Gate& g = in[k];
    if (g.kind == GateKind::CNOT) {
      auto& sa = frontier[g.qubits[0]];
      auto& sb = frontier[g.qubits[1]];
      if (!sa.empty() && !sb.empty() && sa.back() == sb.back()) {
        const Gate& prev = in[sa.back()];
        if (prev.kind == GateKind::CNOT && prev.qubits == g.qubits) {
          alive[sa.back()] = false;
          alive[k] = false;
          sa.pop_back();
          sb.pop_back();
          continue;
        }
      }
    }
    frontier[g.qubits[0]].push_back(k);
    if (g.arity() == 2) frontier[g.qubits[1]].push_back(k);
  }
  Circuit out(c.n_qubits());
  for (std::size_t k = 0; k < in.size(); ++k) {
    if (alive[k]) out.append(in[k]);
  }
  return out;
}

struct CircuitMetrics {
  std::size_t cnot_count = 0;
  std::size_t depth = 0;
  std::size_t total_gates = 0;

  friend bool operator==(const CircuitMetrics&, const CircuitMetrics&) = default;
};

/// Resource counts of a circuit.
///
/// cnot_count: explicit CNOTs plus the two-CNOT hardware cost of RXX/RYY. An
/// RXX immediately followed by an RYY on the same qubit pair is one
/// two-CNOT block; an unpaired RXX or RYY also costs two.
/// depth: greedy as-soon-as-possible layering over the IR gates.
inline CircuitMetrics metrics(const Circuit& c) {
  CircuitMetrics m;
  const auto& g = c.gates();
  m.total_gates = g.size();
  for (std::size_t k = 0; k < g.size(); ++k) {
    switch (g[k].kind) {
      case GateKind::CNOT: m.cnot_count += 1; break;
      case GateKind::RXX:
      case GateKind::RYY: {
        m.cnot_count += 2;
        const bool fused = g[k].kind == GateKind::RXX && k + 1 < g.size() && g[k + 1].kind == GateKind::RYY &&
                           std::minmax(g[k].qubits[0], g[k].qubits[1]) ==
                               std::minmax(g[k + 1].qubits[0], g[k + 1].qubits[1]);
        if (fused) ++k;
        break;
      }
      default: break;
    }
  }
  std::vector<std::size_t> level(c.n_qubits(), 0);
  for (const auto& gate : g) {
    std::size_t l = level[gate.qubits[0]];
    if (gate.arity() == 2) l = std::max(l, level[gate.qubits[1]]);
    ++l;
    level[gate.qubits[0]] = l;
    if (gate.arity() == 2) level[gate.qubits[1]] = l;
    m.depth = std::max(m.depth, l);
  }
  return m;
}

}  // namespace excitonsim
