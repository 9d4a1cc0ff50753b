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

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <optional>
#include <vector>

#include "excitonsim/errors.hpp"

namespace excitonsim {

using Complex = std::complex<double>;

/// Pure state amplitudes. Used both for the N-dimensional single-exciton
/// space of the dense engine and for 2^n-dimensional qubit registers.
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(Eigen::VectorXcd amplitudes) : amplitudes_(std::move(amplitudes)) {}

  static StateVector basis(std::size_t dim, std::size_t index) {
    detail::require(index < dim, "StateVector::basis: index out of range");
    Eigen::VectorXcd a = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
    a(static_cast<Eigen::Index>(index)) = 1.0;
    return StateVector(std::move(a));
  }

  std::size_t dim() const noexcept { return static_cast<std::size_t>(amplitudes_.size()); }
  double norm_squared() const { return amplitudes_.squaredNorm(); }
  double probability(std::size_t index) const { return std::norm(amplitudes_(static_cast<Eigen::Index>(index))); }

  Eigen::VectorXcd& amplitudes() noexcept { return amplitudes_; }
  const Eigen::VectorXcd& amplitudes() const noexcept { return amplitudes_; }
  Complex& operator[](std::size_t i) { return amplitudes_(static_cast<Eigen::Index>(i)); }
  const Complex& operator[](std::size_t i) const { return amplitudes_(static_cast<Eigen::Index>(i)); }

 private:
  Eigen::VectorXcd amplitudes_;
};

/// Site populations sampled on a uniform time grid, row s at t = s dt.
/// Columns correspond to the 1-based site labels in `sites`.
struct PopulationSeries {
  std::vector<double> times;
  std::vector<std::size_t> sites;
  Eigen::MatrixXd populations;
  std::optional<Eigen::MatrixXd> std_errors;

  std::size_t n_times() const noexcept { return times.size(); }
  std::size_t n_columns() const noexcept { return sites.size(); }

  /// Column index of a 1-based site label.
  std::size_t column_of(std::size_t site) const {
    const auto it = std::find(sites.begin(), sites.end(), site);
    detail::require(it != sites.end(), "PopulationSeries: site not recorded");
    return static_cast<std::size_t>(it - sites.begin());
  }

  double population(std::size_t step, std::size_t site) const {
    return populations(static_cast<Eigen::Index>(step), static_cast<Eigen::Index>(column_of(site)));
  }

  static PopulationSeries with_shape(std::size_t n_steps, double dt, std::vector<std::size_t> sites) {
    PopulationSeries p;
    p.times.resize(n_steps + 1);
    for (std::size_t s = 0; s <= n_steps; ++s) p.times[s] = static_cast<double>(s) * dt;
    p.populations = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_steps + 1),
                                          static_cast<Eigen::Index>(sites.size()));
    p.sites = std::move(sites);
    return p;
  }
};

inline std::vector<std::size_t> all_sites(std::size_t n_sites) {
  std::vector<std::size_t> s(n_sites);
  std::iota(s.begin(), s.end(), std::size_t{1});
  return s;
}

/// Point estimate with its standard error.
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

namespace detail {

/// Number of recorded steps s >= 1 with s dt <= threshold, i.e. S = T / dt.
inline std::size_t window_steps(double dt, std::size_t n_steps, double threshold_time) {
  require(dt > 0.0, "efficiency window: dt must be positive");
  require(threshold_time > 0.0, "efficiency window: threshold time must be positive");
  const double ratio = threshold_time / dt;
  const auto steps = static_cast<std::size_t>(std::floor(ratio + 1e-9 * std::max(1.0, ratio)));
  require(steps >= 1, "efficiency window: threshold shorter than one step");
  require(steps <= n_steps, "efficiency window: threshold beyond last recorded time");
  return steps;
}

}  // namespace detail
}  // namespace excitonsim
