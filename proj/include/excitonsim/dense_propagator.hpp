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
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "excitonsim/ensemble.hpp"
#include "excitonsim/errors.hpp"
#include "excitonsim/network.hpp"
#include "excitonsim/noise.hpp"
#include "excitonsim/random.hpp"
#include "excitonsim/state.hpp"

namespace excitonsim {

inline constexpr double kHermiticityTolerance = 1e-10;
inline constexpr double kNormDriftTolerance = 1e-10;

/// Allowed norm drift after `n_steps` unitary steps; rounding adds a few ulp
/// per step.
inline double norm_drift_tolerance(std::size_t n_steps) {
  return kNormDriftTolerance + 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(n_steps);
}

/// exp(-i h dt) from the eigendecomposition of the real symmetric h.
inline Eigen::MatrixXcd step_unitary(const HamiltonianMatrix& h, double dt) {
  const auto& m = h.entries;
  detail::require(m.rows() == m.cols(), "step_unitary: matrix must be square");
  detail::require((m - m.transpose()).cwiseAbs().maxCoeff() <= kHermiticityTolerance,
                  "step_unitary: Hamiltonian is not Hermitian");
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  const Eigen::VectorXcd phases =
      (solver.eigenvalues() * dt).unaryExpr([](double a) { return std::polar(1.0, -a); });
  return solver.eigenvectors().cast<Complex>() * phases.asDiagonal() *
         solver.eigenvectors().transpose().cast<Complex>();
}

/// psi <- exp(-i G) psi for a real symmetric generator G, without forming
/// the unitary. Owns its eigensolver workspace.
class SymmetricExpApplier {
 public:
  explicit SymmetricExpApplier(std::size_t dim)
      : solver_(static_cast<Eigen::Index>(dim)), scratch_(static_cast<Eigen::Index>(dim)) {}

  void decompose(const Eigen::MatrixXd& generator) {
    solver_.compute(generator);
    if (solver_.info() != Eigen::Success) throw NumericalFailure("eigendecomposition did not converge");
    phases_ = solver_.eigenvalues().unaryExpr([](double a) { return std::polar(1.0, -a); });
  }

  /// Applies the most recently decomposed exponential.
  void apply(Eigen::VectorXcd& psi) {
    const auto& v = solver_.eigenvectors();
    scratch_.noalias() = v.transpose() * psi;
    scratch_.array() *= phases_.array();
    psi.noalias() = v * scratch_;
  }

 private:
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver_;
  Eigen::VectorXcd scratch_;
  Eigen::VectorXcd phases_;
};

/// Piecewise-constant stochastic propagation of one trajectory.
///
/// For OU and static noise step s applies exp(-i (H + diag(de(s dt))) dt).
/// For white noise it applies the diagonal phases exp(-i phi_s), phi_s being
/// the fluctuation integrated over the step, and then exp(-i H dt).
class DensePropagator {
 public:
  explicit DensePropagator(const ExcitonNetwork& net)
      : hamiltonian_(build_hamiltonian(net).entries),
        generator_(hamiltonian_.rows(), hamiltonian_.cols()),
        exp_(net.n_sites()),
        free_(net.n_sites()) {}

  std::size_t dim() const noexcept { return static_cast<std::size_t>(hamiltonian_.rows()); }

  /// Evolves `psi` in place; `observe(step, psi)` is called for steps
  /// 0..n_steps, before the first propagator and after each one.
  template <class Observer>
  void run(const NoiseTrajectory& traj, Eigen::VectorXcd& psi, Observer&& observe) {
    detail::require(traj.n_sites == dim(), "propagate_trajectory: noise/network dimension mismatch");
    detail::require(static_cast<std::size_t>(psi.size()) == dim(),
                    "propagate_trajectory: state/network dimension mismatch");
    const double initial_norm = psi.squaredNorm();
    detail::require(std::abs(initial_norm - 1.0) <= kNormDriftTolerance,
                    "propagate_trajectory: initial state is not normalized");
    const auto n = static_cast<Eigen::Index>(dim());
    const double dt = traj.dt;

    observe(std::size_t{0}, std::as_const(psi));
    if (traj.is_integrated_phase) {
      if (free_dt_ != dt) {
        generator_.noalias() = hamiltonian_ * dt;
        free_.decompose(generator_);
        free_dt_ = dt;
      }
      for (std::size_t s = 0; s < traj.n_steps; ++s) {
        const auto row = traj.row(s);
        for (Eigen::Index i = 0; i < n; ++i) psi(i) *= std::polar(1.0, -row[static_cast<std::size_t>(i)]);
        free_.apply(psi);
        observe(s + 1, std::as_const(psi));
      }
      check_norm(psi, initial_norm, traj.n_steps);
      return;
    }
    std::span<const double> previous;
    for (std::size_t s = 0; s < traj.n_steps; ++s) {
      const auto row = traj.row(s);
      // Frozen disorder repeats rows; reuse the decomposition.
      const bool reuse = !previous.empty() && std::equal(row.begin(), row.end(), previous.begin());
      if (!reuse) {
        generator_.noalias() = hamiltonian_ * dt;
        for (Eigen::Index i = 0; i < n; ++i) {
          generator_(i, i) += row[static_cast<std::size_t>(i)] * dt;
        }
        exp_.decompose(generator_);
      }
      exp_.apply(psi);
      previous = row;
      observe(s + 1, std::as_const(psi));
    }
    check_norm(psi, initial_norm, traj.n_steps);
  }

 private:
  static void check_norm(const Eigen::VectorXcd& psi, double initial_norm, std::size_t n_steps) {
    const double drift = std::abs(psi.squaredNorm() - initial_norm);
    if (drift > norm_drift_tolerance(n_steps)) {
      throw NumericalFailure(detail::audit_message("propagate_trajectory: norm drift", drift));
    }
  }

  Eigen::MatrixXd hamiltonian_;
  Eigen::MatrixXd generator_;
  SymmetricExpApplier exp_;
  SymmetricExpApplier free_;  // exp(-i H dt), cached for white noise
  double free_dt_ = std::numeric_limits<double>::quiet_NaN();
};

inline PopulationSeries propagate_trajectory(const ExcitonNetwork& net, const NoiseTrajectory& traj,
                                             const StateVector& psi0) {
  detail::require(psi0.dim() == net.n_sites(), "propagate_trajectory: state/network dimension mismatch");
  DensePropagator prop(net);
  auto series = PopulationSeries::with_shape(traj.n_steps, traj.dt, all_sites(net.n_sites()));
  Eigen::VectorXcd psi = psi0.amplitudes();
  prop.run(traj, psi, [&](std::size_t s, const Eigen::VectorXcd& state) {
    series.populations.row(static_cast<Eigen::Index>(s)) = state.cwiseAbs2().transpose();
  });
  return series;
}

struct EnsembleConfig {
  std::size_t n_trajectories = 1;
  std::size_t n_steps = 1;
  double dt = 0.05;
  std::uint64_t master_seed = 0;
  unsigned threads = 0;  // 0: hardware concurrency
  std::size_t substeps = 1;  // propagator steps per recorded interval
};

/// Target site (1-based) and threshold time of a transport-efficiency window.
struct EfficiencyWindow {
  std::size_t target_site = 1;
  double threshold_time = 0.0;
};

struct EnsembleResult {
  PopulationSeries series;
  std::optional<Estimate> efficiency;
};

namespace detail {

inline PopulationSeries series_from_moments(const MomentAccumulator& acc, std::size_t n_steps, double dt,
                                            std::vector<std::size_t> sites) {
  auto series = PopulationSeries::with_shape(n_steps, dt, std::move(sites));
  const auto cols = static_cast<Eigen::Index>(series.n_columns());
  Eigen::MatrixXd se(series.populations.rows(), cols);
  for (Eigen::Index s = 0; s < series.populations.rows(); ++s) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto k = static_cast<std::size_t>(s * cols + c);
      series.populations(s, c) = acc.mean(k);
      se(s, c) = acc.standard_error(k);
    }
  }
  series.std_errors = std::move(se);
  return series;
}

inline std::size_t efficiency_column(const std::optional<EfficiencyWindow>& window, std::size_t n_sites,
                                     std::size_t n_steps, double dt, std::size_t& window_len) {
  if (!window) return 0;
  require(window->target_site >= 1 && window->target_site <= n_sites, "efficiency: target site out of range");
  window_len = window_steps(dt, n_steps, window->threshold_time);
  return window->target_site - 1;
}

}  // namespace detail

/// Trajectory-averaged populations. Trajectory xi draws its noise from
/// RandomStream::for_trajectory(master_seed, xi), so the result does not
/// depend on the worker count. When `window` is given, the per-trajectory
/// time-averaged target population is reduced alongside, giving the
/// efficiency and its standard error. With cfg.substeps = k the noise path
/// and the propagator run on dt / k while populations are recorded on dt.
inline EnsembleResult run_dense_ensemble(const ExcitonNetwork& net, const NoiseSpec& spec,
                                         const StateVector& psi0, const EnsembleConfig& cfg,
                                         const std::optional<EfficiencyWindow>& window = std::nullopt) {
  spec.validate();
  detail::require(cfg.n_trajectories >= 1, "ensemble_average: n_trajectories must be >= 1");
  detail::require(cfg.n_steps >= 1, "ensemble_average: n_steps must be >= 1");
  detail::require(cfg.substeps >= 1, "ensemble_average: substeps must be >= 1");
  detail::require(psi0.dim() == net.n_sites(), "ensemble_average: state/network dimension mismatch");
  const std::size_t n = net.n_sites();
  const std::size_t rows = cfg.n_steps + 1;
  std::size_t window_len = 0;
  const std::size_t target = detail::efficiency_column(window, n, cfg.n_steps, cfg.dt, window_len);
  const std::size_t sample_length = rows * n + (window ? 1 : 0);

  auto make_worker = [&] {
    return [&, prop = DensePropagator(net), psi = Eigen::VectorXcd()](std::size_t xi,
                                                                      std::span<double> out) mutable {
      auto rng = RandomStream::for_trajectory(cfg.master_seed, xi);
      const std::size_t k = cfg.substeps;
      const auto traj = generate_trajectory(spec, n, cfg.n_steps * k, cfg.dt / static_cast<double>(k), rng);
      psi = psi0.amplitudes();
      double window_sum = 0.0;
      prop.run(traj, psi, [&](std::size_t fine, const Eigen::VectorXcd& state) {
        if (fine % k != 0) return;
        const std::size_t s = fine / k;
        for (std::size_t i = 0; i < n; ++i) out[s * n + i] = std::norm(state(static_cast<Eigen::Index>(i)));
        if (s >= 1 && s <= window_len) window_sum += out[s * n + target];
      });
      if (window) out[rows * n] = window_sum / static_cast<double>(window_len);
    };
  };

  const auto acc = reduce_trajectories(cfg.n_trajectories, sample_length, cfg.threads, make_worker);
  EnsembleResult result{detail::series_from_moments(acc, cfg.n_steps, cfg.dt, all_sites(n)), std::nullopt};
  if (window) {
    result.efficiency = Estimate{acc.mean(rows * n), acc.standard_error(rows * n)};
  }
  return result;
}

inline PopulationSeries ensemble_average(const ExcitonNetwork& net, const NoiseSpec& spec,
                                         const StateVector& psi0, const EnsembleConfig& cfg) {
  return run_dense_ensemble(net, spec, psi0, cfg).series;
}

struct WeightedState {
  double weight = 0.0;
  StateVector state;
};

/// rho(0) = sum_k p_k |psi_k><psi_k|: weighted average of pure-state
/// ensembles. Standard errors combine as sqrt(sum p_k^2 se_k^2).
inline PopulationSeries ensemble_average_mixed(const ExcitonNetwork& net, const NoiseSpec& spec,
                                               std::span<const WeightedState> mixture,
                                               const EnsembleConfig& cfg) {
  detail::require(!mixture.empty(), "ensemble_average_mixed: empty mixture");
  double total = 0.0;
  for (const auto& w : mixture) {
    detail::require(w.weight >= 0.0, "ensemble_average_mixed: negative weight");
    total += w.weight;
  }
  detail::require(std::abs(total - 1.0) <= 1e-12, "ensemble_average_mixed: weights must sum to 1");

  PopulationSeries out;
  Eigen::MatrixXd var;
  for (const auto& w : mixture) {
    auto part = ensemble_average(net, spec, w.state, cfg);
    if (out.times.empty()) {
      out = part;
      out.populations *= w.weight;
      var = (part.std_errors->array().square() * w.weight * w.weight).matrix();
    } else {
      out.populations += w.weight * part.populations;
      var += (part.std_errors->array().square() * w.weight * w.weight).matrix();
    }
  }
  out.std_errors = var.cwiseSqrt();
  return out;
}

}  // namespace excitonsim
