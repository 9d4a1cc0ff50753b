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

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "excitonsim/errors.hpp"

namespace excitonsim {

/// Rotation gates follow R_P(theta) = exp(-i theta P / 2).
enum class GateKind { Hadamard, PauliX, RX, RZ, RXX, RYY, CNOT };

constexpr bool is_two_qubit(GateKind k) noexcept {
  return k == GateKind::RXX || k == GateKind::RYY || k == GateKind::CNOT;
}

constexpr bool has_angle(GateKind k) noexcept {
  return k == GateKind::RX || k == GateKind::RZ || k == GateKind::RXX || k == GateKind::RYY;
}

inline std::string_view gate_name(GateKind k) {
  switch (k) {
    case GateKind::Hadamard: return "H";
    case GateKind::PauliX: return "X";
    case GateKind::RX: return "RX";
    case GateKind::RZ: return "RZ";
    case GateKind::RXX: return "RXX";
    case GateKind::RYY: return "RYY";
    case GateKind::CNOT: return "CNOT";
  }
  return "?";
}

inline GateKind parse_gate_kind(std::string_view name) {
  for (auto k : {GateKind::Hadamard, GateKind::PauliX, GateKind::RX, GateKind::RZ, GateKind::RXX,
                 GateKind::RYY, GateKind::CNOT}) {
    if (gate_name(k) == name) return k;
  }
  throw std::invalid_argument("unknown gate kind '" + std::string(name) + "'");
}

/// One IR instruction. For CNOT, qubits[0] is the control.
struct Gate {
  GateKind kind = GateKind::Hadamard;
  std::array<std::size_t, 2> qubits{0, 0};
  double angle = 0.0;

  std::size_t arity() const noexcept { return is_two_qubit(kind) ? 2 : 1; }
  bool acts_on(std::size_t q) const noexcept { return qubits[0] == q || (arity() == 2 && qubits[1] == q); }

  static Gate hadamard(std::size_t q) { return {GateKind::Hadamard, {q, q}, 0.0}; }
  static Gate pauli_x(std::size_t q) { return {GateKind::PauliX, {q, q}, 0.0}; }
  static Gate rx(std::size_t q, double theta) { return {GateKind::RX, {q, q}, theta}; }
  static Gate rz(std::size_t q, double theta) { return {GateKind::RZ, {q, q}, theta}; }
  static Gate rxx(std::size_t a, std::size_t b, double theta) { return two(GateKind::RXX, a, b, theta); }
  static Gate ryy(std::size_t a, std::size_t b, double theta) { return two(GateKind::RYY, a, b, theta); }
  static Gate cnot(std::size_t control, std::size_t target) { return two(GateKind::CNOT, control, target, 0.0); }

  friend bool operator==(const Gate&, const Gate&) = default;

 private:
  static Gate two(GateKind k, std::size_t a, std::size_t b, double theta) {
    detail::require(a != b, "two-qubit gate requires distinct qubits");
    return {k, {a, b}, theta};
  }
};

class Circuit {
 public:
  explicit Circuit(std::size_t n_qubits = 0) : n_qubits_(n_qubits) {}

  std::size_t n_qubits() const noexcept { return n_qubits_; }
  const std::vector<Gate>& gates() const noexcept { return gates_; }
  std::size_t size() const noexcept { return gates_.size(); }
  bool empty() const noexcept { return gates_.empty(); }

  void append(const Gate& g) {
    detail::require(g.qubits[0] < n_qubits_ && (g.arity() == 1 || g.qubits[1] < n_qubits_),
                    "Circuit: gate qubit index out of range");
    detail::require(g.arity() == 1 || g.qubits[0] != g.qubits[1], "Circuit: two-qubit gate on one qubit");
    gates_.push_back(g);
  }

  void append(const std::vector<Gate>& gs) {
    for (const auto& g : gs) append(g);
  }

  friend bool operator==(const Circuit&, const Circuit&) = default;

 private:
  std::size_t n_qubits_;
  std::vector<Gate> gates_;
};

enum class PauliLetter { I, X, Y, Z };

inline char letter_char(PauliLetter p) {
  switch (p) {
    case PauliLetter::I: return 'I';
    case PauliLetter::X: return 'X';
    case PauliLetter::Y: return 'Y';
    case PauliLetter::Z: return 'Z';
  }
  return '?';
}

/// Real-weighted Pauli string; letters[q] acts on qubit q.
struct PauliTerm {
  double coefficient = 0.0;
  std::vector<PauliLetter> letters;

  std::size_t weight() const {
    std::size_t w = 0;
    for (auto l : letters) w += l != PauliLetter::I;
    return w;
  }

  bool is_diagonal() const {
    for (auto l : letters) {
      if (l == PauliLetter::X || l == PauliLetter::Y) return false;
    }
    return true;
  }

  /// Tensor-product notation, highest qubit first ("ZX" = Z_1 X_0).
  std::string label() const {
    std::string s;
    for (auto it = letters.rbegin(); it != letters.rend(); ++it) s.push_back(letter_char(*it));
    return s;
  }
};

/// Builds a term from its tensor-product label, highest qubit first.
inline PauliTerm pauli_term(std::string_view label, double coefficient = 1.0) {
  PauliTerm t{coefficient, {}};
  for (auto it = label.rbegin(); it != label.rend(); ++it) {
    switch (*it) {
      case 'I': t.letters.push_back(PauliLetter::I); break;
      case 'X': t.letters.push_back(PauliLetter::X); break;
      case 'Y': t.letters.push_back(PauliLetter::Y); break;
      case 'Z': t.letters.push_back(PauliLetter::Z); break;
      default: throw std::invalid_argument("pauli_term: invalid letter");
    }
  }
  return t;
}

enum class EncodingKind { Physical, Algorithmic };

/// Physical: one qubit per site, site i on qubit i-1.
/// Algorithmic: ceil(log2 N) qubits, site i on basis state |bin(i-1)>,
/// qubit 0 least significant.
struct Encoding {
  EncodingKind kind = EncodingKind::Algorithmic;
  std::size_t n_sites = 1;

  static Encoding physical(std::size_t n) { return {EncodingKind::Physical, n}; }
  static Encoding algorithmic(std::size_t n) { return {EncodingKind::Algorithmic, n}; }

  std::size_t n_qubits() const {
    if (kind == EncodingKind::Physical) return n_sites;
    std::size_t q = 0;
    while ((std::size_t{1} << q) < n_sites) ++q;
    return q;
  }

  std::size_t dim() const { return std::size_t{1} << n_qubits(); }
};

inline std::string_view to_string(EncodingKind k) {
  return k == EncodingKind::Physical ? "physical" : "algorithmic";
}

inline EncodingKind parse_encoding(std::string_view name) {
  if (name == "physical") return EncodingKind::Physical;
  if (name == "algorithmic") return EncodingKind::Algorithmic;
  throw std::invalid_argument("unknown encoding '" + std::string(name) + "'");
}

}  // namespace excitonsim
