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

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "excitonsim/errors.hpp"
#include "excitonsim/random.hpp"

namespace excitonsim {

/// Frenkel exciton network in units of the inter-site coupling (V = 1).
///
/// Sites are 0-based here; user-facing interfaces (CLI, CSV headers,
/// `site` arguments of the emulator and analysis functions) are 1-based.
class ExcitonNetwork {
 public:
  ExcitonNetwork(std::vector<double> site_energies, Eigen::MatrixXd couplings)
      : energies_(std::move(site_energies)), couplings_(std::move(couplings)) {
    const auto n = static_cast<Eigen::Index>(energies_.size());
    detail::require(n > 0, "ExcitonNetwork: at least one site is required");
    detail::require(couplings_.rows() == n && couplings_.cols() == n,
                    "ExcitonNetwork: coupling matrix must be n_sites x n_sites");
    for (Eigen::Index i = 0; i < n; ++i) {
      detail::require(couplings_(i, i) == 0.0, "ExcitonNetwork: coupling diagonal must be zero");
      for (Eigen::Index j = i + 1; j < n; ++j) {
        detail::require(couplings_(i, j) == couplings_(j, i),
                        "ExcitonNetwork: coupling matrix must be symmetric");
      }
    }
    for (double e : energies_) detail::require(std::isfinite(e), "ExcitonNetwork: non-finite energy");
    detail::require(couplings_.allFinite(), "ExcitonNetwork: non-finite coupling");
  }

  std::size_t n_sites() const noexcept { return energies_.size(); }
  const std::vector<double>& site_energies() const noexcept { return energies_; }
  const Eigen::MatrixXd& couplings() const noexcept { return couplings_; }
  double coupling(std::size_t i, std::size_t j) const {
    return couplings_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

 private:
  std::vector<double> energies_;
  Eigen::MatrixXd couplings_;
};

/// Single-exciton Hamiltonian. The model only produces real symmetric
/// matrices, so the Hermitian matrix is stored by its real part.
struct HamiltonianMatrix {
  Eigen::MatrixXd entries;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(entries.rows()); }
};

inline HamiltonianMatrix build_hamiltonian(const ExcitonNetwork& net,
                                           std::span<const double> fluctuations = {}) {
  const auto n = static_cast<Eigen::Index>(net.n_sites());
  detail::require(fluctuations.empty() || static_cast<Eigen::Index>(fluctuations.size()) == n,
                  "build_hamiltonian: fluctuation vector length must equal n_sites");
  HamiltonianMatrix h{net.couplings()};
  for (Eigen::Index i = 0; i < n; ++i) {
    h.entries(i, i) = net.site_energies()[static_cast<std::size_t>(i)] +
                      (fluctuations.empty() ? 0.0 : fluctuations[static_cast<std::size_t>(i)]);
  }
  return h;
}

/// Nearest-neighbour ring with uniform coupling. Two sites give a dimer.
inline Eigen::MatrixXd ring_topology(std::size_t n_sites, double coupling = 1.0) {
  const auto n = static_cast<Eigen::Index>(n_sites);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, n);
  if (n < 2) return v;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index j = (i + 1) % n;
    if (i == j) continue;
    v(i, j) = coupling;
    v(j, i) = coupling;
  }
  return v;
}

/// All-to-all connectivity with uniform coupling.
inline Eigen::MatrixXd full_topology(std::size_t n_sites, double coupling = 1.0) {
  const auto n = static_cast<Eigen::Index>(n_sites);
  Eigen::MatrixXd v = Eigen::MatrixXd::Constant(n, n, coupling);
  v.diagonal().setZero();
  return v;
}

/// Site energies drawn i.i.d. from N(0, energy_variance); couplings copied.
inline ExcitonNetwork random_disordered_network(std::size_t n_sites, const Eigen::MatrixXd& topology,
                                                double energy_variance, RandomStream& rng) {
  detail::require(energy_variance >= 0.0, "random_disordered_network: variance must be non-negative");
  const auto n = static_cast<Eigen::Index>(n_sites);
  detail::require(topology.rows() == n && topology.cols() == n,
                  "random_disordered_network: topology must be n_sites x n_sites");
  detail::require(topology.cwiseEqual(topology.transpose()).all(),
                  "random_disordered_network: topology must be symmetric");
  const double sigma = std::sqrt(energy_variance);
  std::vector<double> energies(n_sites);
  for (auto& e : energies) e = sigma * rng.normal();
  return ExcitonNetwork(std::move(energies), topology);
}

enum class ReferenceNetwork { Example4Site, MAQT4Site };

/// The two four-site cyclic networks used throughout the examples and tests.
/// MAQT4Site entry (2,3) is taken as 1 (cyclic topology).
inline ExcitonNetwork reference_hamiltonian(ReferenceNetwork id) {
  switch (id) {
    case ReferenceNetwork::Example4Site:
      return ExcitonNetwork({0.442, 0.233, -3.227, 0.356}, ring_topology(4));
    case ReferenceNetwork::MAQT4Site:
      return ExcitonNetwork({-1.504, 0.491, -2.643, 1.436}, ring_topology(4));
  }
  throw std::invalid_argument("reference_hamiltonian: unknown network id");
}

inline ReferenceNetwork parse_reference_network(std::string_view name) {
  if (name == "example4" || name == "Example4Site") return ReferenceNetwork::Example4Site;
  if (name == "maqt4" || name == "MAQT4Site") return ReferenceNetwork::MAQT4Site;
  throw std::invalid_argument("unknown built-in network '" + std::string(name) + "'");
}

}  // namespace excitonsim
