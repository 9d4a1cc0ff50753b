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
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "excitonsim/dense_propagator.hpp"
#include "excitonsim/errors.hpp"
#include "excitonsim/network.hpp"
#include "excitonsim/noise.hpp"
#include "excitonsim/state.hpp"

namespace excitonsim {

/// Time-averaged target population (1/T) sum_{s=1..S} P(s dt) dt, S = T/dt.
inline double efficiency(const PopulationSeries& series, std::size_t target_site, double threshold_time) {
  detail::require(series.n_times() >= 2, "efficiency: series needs at least two time points");
  const std::size_t col = series.column_of(target_site);
  const double dt = series.times[1] - series.times[0];
  const std::size_t steps = detail::window_steps(dt, series.n_times() - 1, threshold_time);
  double sum = 0.0;
  for (std::size_t s = 1; s <= steps; ++s) {
    sum += series.populations(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(col));
  }
  return sum / static_cast<double>(steps);
}

enum class SweepParameter { Gamma, GammaOverTau, Variance };

inline std::string_view to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::Gamma: return "gamma";
    case SweepParameter::GammaOverTau: return "gamma_over_tau";
    case SweepParameter::Variance: return "variance";
  }
  return "?";
}

/// Efficiency against one noise parameter at fixed tau. tau = 0 is white
/// noise, tau = +inf is static disorder (values are then variances).
struct EfficiencyProfile {
  SweepParameter parameter = SweepParameter::Gamma;
  std::vector<double> parameter_values;
  double tau = 0.0;
  std::vector<double> efficiencies;
  std::vector<double> std_errors;
  std::size_t target_site = 1;
  double threshold_time = 0.0;

  std::size_t size() const noexcept { return parameter_values.size(); }

  /// Noise strength Gamma of point k (nan for static disorder).
  double gamma_at(std::size_t k) const {
    if (parameter == SweepParameter::Gamma) return parameter_values[k];
    if (std::isinf(tau)) return std::numeric_limits<double>::quiet_NaN();
    return parameter_values[k] * tau;
  }

  /// Fluctuation amplitude Gamma / tau of point k (nan for white noise).
  double gamma_over_tau_at(std::size_t k) const {
    if (parameter != SweepParameter::Gamma) return parameter_values[k];
    if (tau == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return parameter_values[k] / tau;
  }
};

/// Same points plotted against Gamma / tau. White-noise profiles have no
/// such axis.
inline EfficiencyProfile against_gamma_over_tau(const EfficiencyProfile& p) {
  detail::require(p.tau > 0.0, "against_gamma_over_tau: white-noise profile has no gamma/tau axis");
  EfficiencyProfile out = p;
  out.parameter = std::isinf(p.tau) ? SweepParameter::Variance : SweepParameter::GammaOverTau;
  for (std::size_t k = 0; k < p.size(); ++k) out.parameter_values[k] = p.gamma_over_tau_at(k);
  return out;
}

/// min * 10^(k / per_decade) for k = 0.. while <= max (within rounding).
inline std::vector<double> log_grid(double min, double max, std::size_t per_decade) {
  detail::require(min > 0.0 && max >= min && std::isfinite(max), "log_grid: need 0 < min <= max");
  detail::require(per_decade >= 1, "log_grid: points per decade must be >= 1");
  const double lo = std::log10(min);
  const double span = std::log10(max) - lo;
  const auto count = static_cast<std::size_t>(std::floor(span * static_cast<double>(per_decade) + 1e-9)) + 1;
  std::vector<double> g(count);
  for (std::size_t k = 0; k < count; ++k) {
    g[k] = std::pow(10.0, lo + static_cast<double>(k) / static_cast<double>(per_decade));
  }
  return g;
}

struct SweepConfig {
  double dt = 0.05;
  double threshold_time = 40.0;
  std::size_t n_trajectories = 10000;
  std::size_t initial_site = 1;
  std::size_t target_site = 3;
  std::uint64_t master_seed = 0;
  unsigned threads = 0;
  // Upper bound on the site-energy phase variance accumulated in one
  // propagator step; strong or fast noise gets substeps to stay below it.
  double max_step_phase_variance = 0.2;
};

/// Variance of the fluctuation integrated over one step of length h:
/// 2 gamma [h - tau (1 - exp(-h/tau))], or 2 gamma h for white noise.
/// Static disorder accumulates no random phase within a step.
inline double step_phase_variance(const NoiseSpec& spec, double h) {
  switch (spec.kind) {
    case NoiseKind::White: return 2.0 * spec.gamma * h;
    case NoiseKind::OrnsteinUhlenbeck: return 2.0 * spec.gamma * (h + spec.tau * std::expm1(-h / spec.tau));
    case NoiseKind::Static: break;
  }
  return 0.0;
}

/// Smallest number of substeps k with step_phase_variance(dt / k) <= bound.
inline std::size_t noise_substeps(const NoiseSpec& spec, double dt, double bound) {
  detail::require(dt > 0.0 && bound > 0.0, "noise_substeps: dt and bound must be positive");
  std::size_t k = 1;
  while (step_phase_variance(spec, dt / static_cast<double>(k)) > bound) {
    // The variance is at most linear in h, so doubling converges quickly.
    k *= 2;
    detail::require(k <= (std::size_t{1} << 30), "noise_substeps: noise too strong for this step");
  }
  std::size_t lo = k / 2 + 1;
  while (lo < k) {
    const std::size_t mid = lo + (k - lo) / 2;
    if (step_phase_variance(spec, dt / static_cast<double>(mid)) > bound) lo = mid + 1;
    else k = mid;
  }
  return k;
}

/// Noise model for one sweep point; `value` is Gamma, or the variance when
/// tau is infinite.
inline NoiseSpec sweep_noise(double tau, double value) {
  if (tau == 0.0) return NoiseSpec::white(value);
  if (std::isinf(tau)) return NoiseSpec::static_disorder(value);
  return NoiseSpec::ornstein_uhlenbeck(value, tau);
}

/// One dense-engine ensemble per (tau, value) point. Every point reuses the
/// master seed so neighbouring points share random numbers. Each point is
/// integrated with noise_substeps(...) steps per recorded dt.
inline std::vector<EfficiencyProfile> sweep_efficiency(const ExcitonNetwork& net, std::span<const double> taus,
                                                       std::span<const double> values, const SweepConfig& cfg) {
  detail::require(!taus.empty() && !values.empty(), "sweep_efficiency: grids must be non-empty");
  for (double t : taus) detail::require(t >= 0.0 && !std::isnan(t), "sweep_efficiency: tau must be >= 0");
  for (double v : values) detail::require(v > 0.0 && std::isfinite(v), "sweep_efficiency: grid values must be > 0");
  const std::size_t n = net.n_sites();
  detail::require(cfg.initial_site >= 1 && cfg.initial_site <= n, "sweep_efficiency: initial site out of range");
  detail::require(cfg.target_site >= 1 && cfg.target_site <= n, "sweep_efficiency: target site out of range");
  detail::require(cfg.dt > 0.0 && cfg.threshold_time > 0.0, "sweep_efficiency: dt and T must be positive");
  const auto n_steps = static_cast<std::size_t>(std::ceil(cfg.threshold_time / cfg.dt - 1e-9));
  detail::require(cfg.max_step_phase_variance > 0.0, "sweep_efficiency: phase-variance bound must be > 0");
  EnsembleConfig ecfg{cfg.n_trajectories, n_steps, cfg.dt, cfg.master_seed, cfg.threads};
  const EfficiencyWindow window{cfg.target_site, cfg.threshold_time};
  const auto psi0 = StateVector::basis(n, cfg.initial_site - 1);

  std::vector<EfficiencyProfile> out;
  out.reserve(taus.size());
  for (double tau : taus) {
    EfficiencyProfile p;
    p.parameter = std::isinf(tau) ? SweepParameter::Variance : SweepParameter::Gamma;
    p.parameter_values.assign(values.begin(), values.end());
    p.tau = tau;
    p.target_site = cfg.target_site;
    p.threshold_time = cfg.threshold_time;
    for (double v : values) {
      const auto spec = sweep_noise(tau, v);
      ecfg.substeps = noise_substeps(spec, cfg.dt, cfg.max_step_phase_variance);
      const auto r = run_dense_ensemble(net, spec, psi0, ecfg, window);
      p.efficiencies.push_back(r.efficiency->mean);
      p.std_errors.push_back(r.efficiency->std_error);
    }
    out.push_back(std::move(p));
  }
  return out;
}

inline constexpr double kTraceDriftTolerance = 1e-6;

namespace detail {

/// Number of RK4 substeps per interval so that h * rate stays small.
inline std::size_t rk4_substeps(double dt, double rate_bound) {
  const double h_max = 0.01 / std::max(rate_bound, 1e-12);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(dt / h_max)));
}

}  // namespace detail

/// Haken-Strobl master equation
///   d rho/dt = -i[H, rho] + sum_i 2 gamma (P_i rho P_i - {P_i, rho}/2)
/// by fixed-step RK4. Populations are the diagonal of rho.
inline PopulationSeries lindblad_reference(const ExcitonNetwork& net, double gamma, const StateVector& psi0,
                                           double dt, std::size_t n_steps) {
  detail::require(gamma >= 0.0 && std::isfinite(gamma), "lindblad_reference: gamma must be >= 0");
  detail::require(dt > 0.0, "lindblad_reference: dt must be positive");
  detail::require(n_steps >= 1, "lindblad_reference: n_steps must be >= 1");
  const std::size_t n = net.n_sites();
  detail::require(psi0.dim() == n, "lindblad_reference: state/network dimension mismatch");
  const Eigen::MatrixXcd h = build_hamiltonian(net).entries.cast<Complex>();
  const double h_norm = build_hamiltonian(net).entries.cwiseAbs().rowwise().sum().maxCoeff();
  const std::size_t sub = detail::rk4_substeps(dt, 2.0 * h_norm + 4.0 * gamma);
  const double step = dt / static_cast<double>(sub);
  const Complex minus_i(0.0, -1.0);

  // Dephasing damps every coherence at 2 gamma and leaves populations alone.
  auto rhs = [&](const Eigen::MatrixXcd& rho) {
    Eigen::MatrixXcd d = minus_i * (h * rho - rho * h);
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
      for (Eigen::Index j = 0; j < d.cols(); ++j) {
        if (i != j) d(i, j) -= 2.0 * gamma * rho(i, j);
      }
    }
    return d;
  };

  Eigen::MatrixXcd rho = psi0.amplitudes() * psi0.amplitudes().adjoint();
  const double trace0 = rho.trace().real();
  auto series = PopulationSeries::with_shape(n_steps, dt, all_sites(n));
  auto record = [&](std::size_t s) {
    const double drift = std::abs(rho.trace().real() - trace0);
    if (!(drift <= kTraceDriftTolerance)) {
      throw NumericalFailure(detail::audit_message("lindblad_reference: trace drift", drift));
    }
    for (std::size_t i = 0; i < n; ++i) {
      series.populations(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(i)) =
          rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
    }
  };
  record(0);
  for (std::size_t s = 1; s <= n_steps; ++s) {
    for (std::size_t k = 0; k < sub; ++k) {
      const Eigen::MatrixXcd k1 = rhs(rho);
      const Eigen::MatrixXcd k2 = rhs(rho + 0.5 * step * k1);
      const Eigen::MatrixXcd k3 = rhs(rho + 0.5 * step * k2);
      const Eigen::MatrixXcd k4 = rhs(rho + step * k3);
      rho += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    record(s);
  }
  return series;
}

/// Kinetic rates; entry (i, j) is the rate from site j into site i, so the
/// columns sum to zero.
struct RateMatrix {
  Eigen::MatrixXd entries;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(entries.rows()); }
  double rate(std::size_t to, std::size_t from) const {
    return entries(static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(from));
  }
};

inline constexpr double kEnvelopeCutoff = 1e-12;

namespace detail {

/// log of exp[-2 gamma t + 2 gamma tau (1 - exp(-t/tau))].
inline double log_envelope(double t, double gamma, double tau) {
  if (tau == 0.0) return -2.0 * gamma * t;
  return -2.0 * gamma * t - 2.0 * gamma * tau * std::expm1(-t / tau);
}

/// Time after which the envelope stays below the cutoff, capped at 1e4/gamma.
inline double envelope_horizon(double gamma, double tau) {
  const double target = std::log(kEnvelopeCutoff);
  const double cap = 1e4 / gamma;
  if (log_envelope(cap, gamma, tau) > target) return cap;
  double lo = 0.0;
  double hi = cap;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (log_envelope(mid, gamma, tau) > target ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace detail

/// Re int_0^inf exp[i de t - 2 gamma t + 2 gamma tau (1 - exp(-t/tau))] dt.
inline double forster_integral(double delta_energy, double gamma, double tau) {
  detail::require(gamma > 0.0 && std::isfinite(gamma), "forster_rates: gamma must be > 0");
  detail::require(tau >= 0.0 && std::isfinite(tau), "forster_rates: tau must be finite and >= 0");
  const double t_max = detail::envelope_horizon(gamma, tau);
  auto f = [&](double t) { return std::exp(detail::log_envelope(t, gamma, tau)) * std::cos(delta_energy * t); };
  // Panels of a few oscillation periods or decay lengths keep each piece smooth.
  const double scale = std::min(1.0 / (2.0 * gamma) + std::sqrt(tau / gamma),
                                delta_energy != 0.0 ? 2.0 * M_PI / std::abs(delta_energy) : t_max);
  const auto panels = static_cast<std::size_t>(std::clamp(std::ceil(t_max / scale), 1.0, 4096.0));
  const double width = t_max / static_cast<double>(panels);
  double sum = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double a = width * static_cast<double>(p);
    sum += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, a + width, 15, 1e-13);
  }
  return sum;
}

/// Golden-rule hopping rates kappa_ij = 2 |V_ij|^2 I(e_i - e_j); the
/// diagonal makes every column sum to zero.
inline RateMatrix forster_rates(const ExcitonNetwork& net, double gamma, double tau) {
  detail::require(gamma > 0.0 && std::isfinite(gamma), "forster_rates: gamma must be > 0");
  detail::require(tau >= 0.0 && std::isfinite(tau), "forster_rates: tau must be finite and >= 0");
  const std::size_t n = net.n_sites();
  const auto& e = net.site_energies();
  RateMatrix k{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = net.coupling(i, j);
      if (v == 0.0) continue;
      // The integrand depends on the energy gap only through cos, so the
      // rate is symmetric.
      const double r = 2.0 * v * v * forster_integral(e[i] - e[j], gamma, tau);
      k.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r;
      k.entries(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = r;
    }
  }
  for (Eigen::Index j = 0; j < k.entries.cols(); ++j) k.entries(j, j) = -k.entries.col(j).sum();
  return k;
}

/// RK4 integration of dP/dt = kappa P.
inline PopulationSeries kinetic_propagate(const RateMatrix& rates, std::span<const double> p0, double dt,
                                          std::size_t n_steps) {
  const std::size_t n = rates.dim();
  detail::require(rates.entries.cols() == rates.entries.rows(), "kinetic_propagate: rate matrix must be square");
  detail::require(p0.size() == n, "kinetic_propagate: p0/rate dimension mismatch");
  detail::require(dt > 0.0 && n_steps >= 1, "kinetic_propagate: need dt > 0 and n_steps >= 1");
  double total = 0.0;
  for (double p : p0) {
    detail::require(p >= 0.0, "kinetic_propagate: p0 entries must be >= 0");
    total += p;
  }
  detail::require(std::abs(total - 1.0) <= 1e-10, "kinetic_propagate: p0 must sum to 1");
  const double bound = n == 0 ? 0.0 : rates.entries.cwiseAbs().colwise().sum().maxCoeff();
  const std::size_t sub = detail::rk4_substeps(dt, bound);
  const double h = dt / static_cast<double>(sub);
  const Eigen::MatrixXd& k = rates.entries;

  Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(p0.data(), static_cast<Eigen::Index>(n));
  auto series = PopulationSeries::with_shape(n_steps, dt, all_sites(n));
  series.populations.row(0) = p.transpose();
  for (std::size_t s = 1; s <= n_steps; ++s) {
    for (std::size_t q = 0; q < sub; ++q) {
      const Eigen::VectorXd k1 = k * p;
      const Eigen::VectorXd k2 = k * (p + 0.5 * h * k1);
      const Eigen::VectorXd k3 = k * (p + 0.5 * h * k2);
      const Eigen::VectorXd k4 = k * (p + h * k3);
      p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    series.populations.row(static_cast<Eigen::Index>(s)) = p.transpose();
  }
  return series;
}

}  // namespace excitonsim
