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
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "excitonsim/circuit_synth.hpp"
#include "excitonsim/io.hpp"
#include "excitonsim/random.hpp"
#include "oracles.hpp"

namespace es = excitonsim;
using es::Gate;
using es::PauliLetter;

namespace {

std::map<std::string, double> by_label(const std::vector<es::PauliTerm>& terms) {
  std::map<std::string, double> m;
  for (const auto& t : terms) m[t.label()] = t.coefficient;
  return m;
}

oracle::Mat padded(const Eigen::MatrixXd& h, std::size_t n_qubits) {
  const Eigen::Index d = Eigen::Index{1} << n_qubits;
  oracle::Mat out = oracle::Mat::Zero(d, d);
  out.topLeftCorner(h.rows(), h.cols()) = h.cast<oracle::Complex>();
  return out;
}

oracle::Mat reconstruct(const std::vector<es::PauliTerm>& terms, std::size_t n_qubits) {
  const Eigen::Index d = Eigen::Index{1} << n_qubits;
  oracle::Mat out = oracle::Mat::Zero(d, d);
  for (const auto& t : terms) out += t.coefficient * oracle::pauli_string(t.letters);
  return out;
}

es::PauliTerm random_term(es::RandomStream& rng, std::size_t n) {
  es::PauliTerm t{1.0, std::vector<PauliLetter>(n, PauliLetter::I)};
  while (t.weight() == 0) {
    for (auto& l : t.letters) l = static_cast<PauliLetter>(static_cast<int>(rng.uniform() * 4.0));
  }
  return t;
}

std::vector<double> random_vector(es::RandomStream& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

TEST(PauliDecompose, ExampleDiagonalAngles) {
  const auto net = es::reference_hamiltonian(es::ReferenceNetwork::Example4Site);
  const auto& e = net.site_energies();
  const auto m = by_label(es::pauli_decompose(es::build_hamiltonian(net), 2));
  EXPECT_NEAR(m.at("II"), (e[0] + e[1] + e[2] + e[3]) / 4, 1e-12);
  EXPECT_NEAR(m.at("IZ"), (e[0] - e[1] + e[2] - e[3]) / 4, 1e-12);
  EXPECT_NEAR(m.at("ZI"), (e[0] + e[1] - e[2] - e[3]) / 4, 1e-12);
  EXPECT_NEAR(m.at("ZZ"), (e[0] - e[1] - e[2] + e[3]) / 4, 1e-12);
  EXPECT_NEAR(m.at("II"), -0.549, 1e-12);
  EXPECT_NEAR(m.at("IZ"), -0.8435, 1e-12);
  EXPECT_NEAR(m.at("ZI"), 0.8865, 1e-12);
  EXPECT_NEAR(m.at("ZZ"), 0.948, 1e-12);
}

TEST(PauliDecompose, RingCouplingAngles) {
  const es::ExcitonNetwork ring({0, 0, 0, 0}, es::ring_topology(4));
  const auto m = by_label(es::pauli_decompose(es::build_hamiltonian(ring), 2));
  EXPECT_NEAR(m.at("IX"), 1.0, 1e-12);
  EXPECT_NEAR(m.at("XX"), 1.0, 1e-12);
  EXPECT_EQ(m.count("ZX"), 0u);
  EXPECT_EQ(m.count("YY"), 0u);
  EXPECT_EQ(m.size(), 2u);
}

TEST(PauliDecompose, IdentityIsSingleTerm) {
  const auto terms = es::pauli_decompose({2.5 * Eigen::MatrixXd::Identity(4, 4)}, 2);
  ASSERT_EQ(terms.size(), 1u);
  EXPECT_EQ(terms[0].label(), "II");
  EXPECT_NEAR(terms[0].coefficient, 2.5, 1e-15);
}

TEST(PauliDecompose, ReconstructsRandomHamiltonians) {
  es::RandomStream rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 7.0);
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) v(i, j) = v(j, i) = rng.normal();
    }
    const es::ExcitonNetwork net(random_vector(rng, n), v);
    const auto h = es::build_hamiltonian(net);
    const std::size_t q = es::qubits_for_sites(n);
    EXPECT_LT((reconstruct(es::pauli_decompose(h, q), q) - padded(h.entries, q)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(PauliDecompose, TooFewQubitsThrows) {
  EXPECT_THROW(es::pauli_decompose({Eigen::MatrixXd::Identity(5, 5)}, 2), std::invalid_argument);
}

TEST(Staircase, FigureExampleGatePattern) {
  const double theta = 0.37;
  const auto gates = es::staircase(es::pauli_term("ZYX"), theta);
  const std::vector<Gate> want{
      Gate::hadamard(0), Gate::rx(1, std::numbers::pi / 2), Gate::cnot(0, 1), Gate::cnot(1, 2), Gate::rz(2, theta),
      Gate::cnot(1, 2),  Gate::cnot(0, 1), Gate::hadamard(0), Gate::rx(1, -std::numbers::pi / 2)};
  EXPECT_EQ(gates, want);
}

TEST(Staircase, SingleZIsOneRotation) {
  const auto gates = es::staircase(es::pauli_term("IZ"), 0.2);
  ASSERT_EQ(gates.size(), 1u);
  EXPECT_EQ(gates[0], Gate::rz(0, 0.2));
}

TEST(Staircase, CnotCountIsTwoWeightMinusTwo) {
  es::RandomStream rng(8);
  for (int k = 0; k < 50; ++k) {
    const auto t = random_term(rng, 5);
    es::Circuit c(5);
    c.append(es::staircase(t, 0.1));
    EXPECT_EQ(es::metrics(c).cnot_count, 2 * t.weight() - 2) << t.label();
  }
}

TEST(Staircase, MatchesAnalyticExponential) {
  es::RandomStream rng(44);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 4.0);
    const auto t = random_term(rng, n);
    const double theta = (rng.uniform() - 0.5) * 4.0 * std::numbers::pi;
    es::Circuit c(n);
    c.append(es::staircase(t, theta));
    const auto want = oracle::rotation(oracle::pauli_string(t.letters), theta);
    EXPECT_LT((oracle::circuit_matrix(c) - want).cwiseAbs().maxCoeff(), 1e-10) << t.label();
  }
}

TEST(Staircase, IdentityTermThrows) {
  EXPECT_THROW(es::staircase(es::pauli_term("II"), 0.1), std::invalid_argument);
}

TEST(PhysicalStep, RingShape) {
  const auto net = es::reference_hamiltonian(es::ReferenceNetwork::Example4Site);
  const std::vector<double> zero(4, 0.0);
  const auto c = es::synth_physical_step(net, zero, 0.05, 1);
  std::map<es::GateKind, int> count;
  for (const auto& g : c.gates()) ++count[g.kind];
  EXPECT_EQ(count[es::GateKind::RXX], 4);
  EXPECT_EQ(count[es::GateKind::RYY], 4);
  EXPECT_EQ(count[es::GateKind::RZ], 4);
  EXPECT_EQ(c.size(), 12u);
  EXPECT_EQ(c.n_qubits(), 4u);
  EXPECT_DOUBLE_EQ(c.gates()[0].angle, -0.442 * 0.05);
}

TEST(PhysicalStep, NoCouplingOnlyRz) {
  const es::ExcitonNetwork net({1, 2, 3}, Eigen::MatrixXd::Zero(3, 3));
  const std::vector<double> zero(3, 0.0);
  const auto c = es::synth_physical_step(net, zero, 0.1, 3);
  for (const auto& g : c.gates()) EXPECT_EQ(g.kind, es::GateKind::RZ);
}

TEST(PhysicalStep, FineTrotterMatchesExactStep) {
  const es::ExcitonNetwork dimer({0.0, 0.0}, es::ring_topology(2));
  const std::vector<double> f{0.8, -0.3};
  const auto u = oracle::circuit_matrix(es::synth_physical_step(dimer, f, 0.05, 64));
  const oracle::Mat h = es::build_hamiltonian(dimer, f).entries.cast<oracle::Complex>();
  const auto exact = oracle::expm_taylor(oracle::Complex(0, -0.05) * h);
  // Single-excitation states: site 1 -> |01>, site 2 -> |10>.
  oracle::Mat sub(2, 2);
  const int idx[2] = {1, 2};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) sub(a, b) = u(idx[a], idx[b]);
  }
  EXPECT_LT(oracle::distance_up_to_phase(sub, exact), 1e-3);
}

TEST(PhysicalStep, ConservesExcitationNumber) {
  es::RandomStream rng(15);
  for (std::size_t n = 2; n <= 4; ++n) {
    const es::ExcitonNetwork net(random_vector(rng, n), es::full_topology(n, 0.8));
    const auto u = oracle::circuit_matrix(es::synth_physical_step(net, random_vector(rng, n), 0.1, 2));
    oracle::Mat number = oracle::Mat::Zero(u.rows(), u.cols());
    for (Eigen::Index b = 0; b < u.rows(); ++b) number(b, b) = static_cast<double>(std::popcount(static_cast<unsigned>(b)));
    EXPECT_LT((u * number - number * u).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(PhysicalStep, WrongFluctuationLengthThrows) {
  const auto net = es::reference_hamiltonian(es::ReferenceNetwork::Example4Site);
  const std::vector<double> f(3, 0.0);
  EXPECT_THROW(es::synth_physical_step(net, f, 0.05, 1), std::invalid_argument);
  EXPECT_THROW(es::synth_algorithmic_step(net, f, 0.05, 1), std::invalid_argument);
}

TEST(AlgorithmicStep, RingStringsInOrder) {
  const auto net = es::reference_hamiltonian(es::ReferenceNetwork::Example4Site);
  const std::vector<double> zero(4, 0.0);
  std::vector<std::string> labels;
  for (const auto& t : es::algorithmic_step_terms(net, zero)) labels.push_back(t.label());
  EXPECT_EQ(labels, (std::vector<std::string>{"IZ", "ZI", "ZZ", "IX", "XX"}));
  EXPECT_EQ(es::synth_algorithmic_step(net, zero, 0.05, 1).n_qubits(), 2u);
}

TEST(AlgorithmicStep, HomodimerSingleQubit) {
  const es::ExcitonNetwork dimer({0.0, 0.0}, es::ring_topology(2));
  const std::vector<double> f{0.1, 0.2};
  std::vector<std::string> labels;
  for (const auto& t : es::algorithmic_step_terms(dimer, f)) labels.push_back(t.label());
  EXPECT_EQ(labels, (std::vector<std::string>{"Z", "X"}));
  const auto c = es::synth_algorithmic_step(dimer, f, 0.05, 3);
  EXPECT_EQ(c.n_qubits(), 1u);
  EXPECT_EQ(es::metrics(c).cnot_count, 0u);
}

TEST(AlgorithmicStep, FineTrotterMatchesExactStep) {
  const auto net = es::reference_hamiltonian(es::ReferenceNetwork::Example4Site);
  const std::vector<double> f{0.4, -1.1, 0.2, 0.7};
  const auto u = oracle::circuit_matrix(es::synth_algorithmic_step(net, f, 0.05, 64));
  const oracle::Mat h = es::build_hamiltonian(net, f).entries.cast<oracle::Complex>();
  EXPECT_LT(oracle::distance_up_to_phase(u, oracle::expm_taylor(oracle::Complex(0, -0.05) * h)), 1e-3);
}

TEST(AlgorithmicStep, PaddedSitesStayUnpopulated) {
  es::RandomStream rng(3);
  const es::ExcitonNetwork net(random_vector(rng, 3), es::ring_topology(3));
  const auto f = random_vector(rng, 3);
  // Individual Pauli strings mix the padding state into the register, so
  // leakage is a second-order Trotter error that falls as 1/m.
  auto leakage = [&](std::size_t m) {
    const auto u = oracle::circuit_matrix(es::synth_algorithmic_step(net, f, 0.05, m));
    double worst = 0.0;
    for (Eigen::Index r = 0; r < 3; ++r) worst = std::max(worst, std::abs(u(3, r)));
    return worst;
  };
  const double coarse = leakage(2), fine = leakage(8);
  EXPECT_LT(coarse, 5e-3);
  EXPECT_NEAR(coarse / fine, 4.0, 0.5);
}

TEST(PhaseKick, AppliesDiagonalPhases) {
  const std::vector<double> phi{0.3, -0.7, 1.1, 0.05};
  for (auto kind : {es::EncodingKind::Physical, es::EncodingKind::Algorithmic}) {
    const auto u = oracle::circuit_matrix(es::synth_phase_kick(kind, phi));
    const bool physical = kind == es::EncodingKind::Physical;
    oracle::Mat sub(4, 4), want = oracle::Mat::Zero(4, 4);
    for (int a = 0; a < 4; ++a) {
      want(a, a) = std::exp(oracle::Complex(0, -phi[a]));
      for (int b = 0; b < 4; ++b) sub(a, b) = u(physical ? (1 << a) : a, physical ? (1 << b) : b);
    }
    EXPECT_LT(oracle::distance_up_to_phase(sub, want), 1e-12) << es::to_string(kind);
  }
}

TEST(Peephole, AdjacentPairRemoved) {
  es::Circuit c(2);
  c.append({Gate::cnot(0, 1), Gate::cnot(0, 1)});
  EXPECT_TRUE(es::peephole_cancel(c).empty());
}

TEST(Peephole, DisjointGateDoesNotBlock) {
  es::Circuit c(3);
  c.append({Gate::cnot(0, 1), Gate::rz(2, 0.4), Gate::cnot(0, 1)});
  const auto out = es::peephole_cancel(c);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out.gates()[0], Gate::rz(2, 0.4));
}

TEST(Peephole, InterveningGateBlocks) {
  es::Circuit c(2);
  c.append({Gate::cnot(0, 1), Gate::rz(1, 0.4), Gate::cnot(0, 1)});
  EXPECT_EQ(es::peephole_cancel(c).size(), 3u);
  es::Circuit d(2);
  d.append({Gate::cnot(0, 1), Gate::cnot(1, 0)});
  EXPECT_EQ(es::peephole_cancel(d).size(), 2u);
}

TEST(Peephole, NestedCascadeVanishes) {
  es::Circuit c(3);
  c.append({Gate::cnot(0, 1), Gate::cnot(1, 2), Gate::cnot(1, 2), Gate::cnot(0, 1)});
  EXPECT_TRUE(es::peephole_cancel(c).empty());
}

TEST(Peephole, PreservesUnitary) {
  es::RandomStream rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    es::Circuit c(4);
    for (int k = 0; k < 4; ++k) c.append(es::staircase(random_term(rng, 4), rng.normal()));
    const auto out = es::peephole_cancel(c);
    EXPECT_LE(out.size(), c.size());
    EXPECT_LT((oracle::circuit_matrix(out) - oracle::circuit_matrix(c)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Metrics, EmptyCircuit) {
  EXPECT_EQ(es::metrics(es::Circuit(3)), (es::CircuitMetrics{0, 0, 0}));
}

TEST(Metrics, PhysicalFullConnectivity) {
  for (std::size_t n = 2; n <= 8; ++n) {
    const es::ExcitonNetwork net(std::vector<double>(n, 0.5), es::full_topology(n));
    const std::vector<double> zero(n, 0.0);
    EXPECT_EQ(es::metrics(es::synth_physical_step(net, zero, 0.05, 1)).cnot_count, n * (n - 1));
  }
}

TEST(Metrics, DepthOfSmallCircuit) {
  es::Circuit c(3);
  c.append({Gate::hadamard(0), Gate::hadamard(1), Gate::cnot(0, 1), Gate::rz(2, 0.1), Gate::cnot(1, 2)});
  const auto m = es::metrics(c);
  EXPECT_EQ(m.depth, 3u);
  EXPECT_EQ(m.cnot_count, 2u);
  EXPECT_EQ(m.total_gates, 5u);
}

TEST(Metrics, LoneRyyCostsTwo) {
  es::Circuit c(3);
  c.append({Gate::rxx(0, 1, 0.1), Gate::ryy(1, 2, 0.1)});
  EXPECT_EQ(es::metrics(c).cnot_count, 4u);
}

TEST(Metrics, AlgorithmicDenseBound) {
  es::RandomStream rng(2);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(8, 8);
  for (int i = 0; i < 8; ++i) {
    for (int j = i + 1; j < 8; ++j) v(i, j) = v(j, i) = rng.normal();
  }
  const es::ExcitonNetwork net(random_vector(rng, 8), v);
  const auto c = es::synth_algorithmic_step(net, random_vector(rng, 8), 0.05, 1);
  EXPECT_LE(es::metrics(c).cnot_count, 2u * 64u * 2u);
}

TEST(Parametrization, OnlyRotationAnglesChange) {
  es::RandomStream rng(100);
  const auto net = es::reference_hamiltonian(es::ReferenceNetwork::MAQT4Site);
  for (auto kind : {es::EncodingKind::Physical, es::EncodingKind::Algorithmic}) {
    const std::vector<double> zero(4, 0.0);
    const auto base = kind == es::EncodingKind::Physical ? es::synth_physical_step(net, zero, 0.05, 3)
                                                         : es::synth_algorithmic_step(net, zero, 0.05, 3);
    for (int k = 0; k < 20; ++k) {
      const auto f = random_vector(rng, 4);
      const auto c = kind == es::EncodingKind::Physical ? es::synth_physical_step(net, f, 0.05, 3)
                                                        : es::synth_algorithmic_step(net, f, 0.05, 3);
      ASSERT_EQ(c.size(), base.size());
      for (std::size_t g = 0; g < c.size(); ++g) {
        EXPECT_EQ(c.gates()[g].kind, base.gates()[g].kind);
        EXPECT_EQ(c.gates()[g].qubits, base.gates()[g].qubits);
        if (c.gates()[g].kind != es::GateKind::RZ) {
          EXPECT_EQ(c.gates()[g].angle, base.gates()[g].angle);
        }
      }
    }
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Golden, ExamplePhysicalStep) {
  const auto net = es::reference_hamiltonian(es::ReferenceNetwork::Example4Site);
  std::ostringstream os;
  es::write_circuit(os, es::synth_physical_step(net, std::vector<double>(4, 0.0), 0.05, 1));
  EXPECT_EQ(os.str(), slurp(std::string(EXCITONSIM_GOLDEN_DIR) + "/example4_physical_m1.txt"));
}

TEST(Golden, ExampleAlgorithmicStep) {
  const auto net = es::reference_hamiltonian(es::ReferenceNetwork::Example4Site);
  std::ostringstream os;
  es::write_circuit(os, es::synth_algorithmic_step(net, std::vector<double>(4, 0.0), 0.05, 1));
  EXPECT_EQ(os.str(), slurp(std::string(EXCITONSIM_GOLDEN_DIR) + "/example4_algorithmic_m1.txt"));
}

}  // namespace
