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

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "excitonsim/analysis.hpp"
#include "excitonsim/circuit.hpp"
#include "excitonsim/errors.hpp"
#include "excitonsim/network.hpp"
#include "excitonsim/noise.hpp"
#include "excitonsim/state.hpp"

namespace excitonsim {

/// Raised for malformed input files and configurations.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Shortest decimal that round-trips; "inf"/"nan" for non-finite values.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view text) {
  std::string s(text);
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t\r");
  s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  if (s == "inf" || s == "+inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw ConfigError("not a number: '" + s + "'");
  }
  return v;
}

inline std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto end = comma == std::string_view::npos ? text.size() : comma;
    out.push_back(parse_double(text.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

/// `t,P1..PN[,SE1..SEN]`, one row per recorded time.
inline void write_population_csv(std::ostream& os, const PopulationSeries& series) {
  os << 't';
  for (auto s : series.sites) os << ",P" << s;
  if (series.std_errors) {
    for (auto s : series.sites) os << ",SE" << s;
  }
  os << '\n';
  for (std::size_t r = 0; r < series.n_times(); ++r) {
    os << format_double(series.times[r]);
    const auto row = static_cast<Eigen::Index>(r);
    for (Eigen::Index c = 0; c < series.populations.cols(); ++c) os << ',' << format_double(series.populations(row, c));
    if (series.std_errors) {
      for (Eigen::Index c = 0; c < series.std_errors->cols(); ++c) os << ',' << format_double((*series.std_errors)(row, c));
    }
    os << '\n';
  }
}

/// `tau,gamma,gamma_over_tau,eta,eta_se`, tau-major in the given order.
inline void write_sweep_csv(std::ostream& os, const std::vector<EfficiencyProfile>& profiles) {
  os << "tau,gamma,gamma_over_tau,eta,eta_se\n";
  for (const auto& p : profiles) {
    for (std::size_t k = 0; k < p.size(); ++k) {
      os << format_double(p.tau) << ',' << format_double(p.gamma_at(k)) << ','
         << format_double(p.gamma_over_tau_at(k)) << ',' << format_double(p.efficiencies[k]) << ','
         << format_double(k < p.std_errors.size() ? p.std_errors[k] : 0.0) << '\n';
    }
  }
}

/// `qubits=<n>` then one `KIND q0[,q1][,angle]` line per gate.
inline void write_circuit(std::ostream& os, const Circuit& c) {
  os << "qubits=" << c.n_qubits() << '\n';
  for (const auto& g : c.gates()) {
    os << gate_name(g.kind) << ' ' << g.qubits[0];
    if (g.arity() == 2) os << ',' << g.qubits[1];
    if (has_angle(g.kind)) os << ',' << format_double(g.angle);
    os << '\n';
  }
}

inline Circuit read_circuit(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("qubits=", 0) != 0) throw ConfigError("circuit: missing qubits= header");
  Circuit c(static_cast<std::size_t>(parse_double(std::string_view(line).substr(7))));
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto sp = line.find(' ');
    if (sp == std::string::npos) throw ConfigError("circuit: malformed line '" + line + "'");
    const GateKind kind = parse_gate_kind(std::string_view(line).substr(0, sp));
    const auto fields = parse_double_list(std::string_view(line).substr(sp + 1));
    const std::size_t want = (is_two_qubit(kind) ? 2 : 1) + (has_angle(kind) ? 1 : 0);
    if (fields.size() != want) throw ConfigError("circuit: wrong field count in '" + line + "'");
    Gate g{kind, {}, 0.0};
    g.qubits[0] = static_cast<std::size_t>(fields[0]);
    g.qubits[1] = is_two_qubit(kind) ? static_cast<std::size_t>(fields[1]) : g.qubits[0];
    if (has_angle(kind)) g.angle = fields.back();
    c.append(g);
  }
  return c;
}

/// Reads an ini-style network description:
///   n_sites = 3
///   energies = 0, 1, 2
///   couplings = <n*n values, row-major>
inline ExcitonNetwork read_network(std::istream& is) {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::read_ini(is, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("network file: ") + e.what());
  }
  const auto n_text = pt.get_optional<std::string>("n_sites");
  const auto e_text = pt.get_optional<std::string>("energies");
  const auto v_text = pt.get_optional<std::string>("couplings");
  if (!n_text || !e_text || !v_text) throw ConfigError("network file: need n_sites, energies and couplings");
  const double n_real = parse_double(*n_text);
  if (!(n_real >= 1.0) || n_real != std::floor(n_real)) throw ConfigError("network file: bad n_sites");
  const auto n = static_cast<std::size_t>(n_real);
  auto energies = parse_double_list(*e_text);
  const auto flat = parse_double_list(*v_text);
  if (energies.size() != n || flat.size() != n * n) throw ConfigError("network file: size mismatch");
  Eigen::MatrixXd v(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = flat[i * n + j];
  }
  try {
    return ExcitonNetwork(std::move(energies), v);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("network file: ") + e.what());
  }
}

enum class EngineKind { Dense, Emulator, Lindblad, Kinetic };

inline std::string_view to_string(EngineKind k) {
  switch (k) {
    case EngineKind::Dense: return "dense";
    case EngineKind::Emulator: return "emulator";
    case EngineKind::Lindblad: return "lindblad";
    case EngineKind::Kinetic: return "kinetic";
  }
  return "?";
}

inline EngineKind parse_engine(std::string_view s) {
  if (s == "dense") return EngineKind::Dense;
  if (s == "emulator") return EngineKind::Emulator;
  if (s == "lindblad") return EngineKind::Lindblad;
  if (s == "kinetic") return EngineKind::Kinetic;
  throw ConfigError("unknown engine '" + std::string(s) + "'");
}

inline NoiseKind parse_noise_kind(std::string_view s) {
  if (s == "ou" || s == "ornstein-uhlenbeck") return NoiseKind::OrnsteinUhlenbeck;
  if (s == "white") return NoiseKind::White;
  if (s == "static") return NoiseKind::Static;
  throw ConfigError("unknown noise kind '" + std::string(s) + "'");
}

inline std::string_view noise_key(NoiseKind k) {
  switch (k) {
    case NoiseKind::OrnsteinUhlenbeck: return "ou";
    case NoiseKind::White: return "white";
    case NoiseKind::Static: return "static";
  }
  return "?";
}

/// Resolved run parameters. Defaults are the 4-site reference settings.
struct RunConfig {
  std::string network = "example4";  // built-in id or path to a network file
  EngineKind engine = EngineKind::Dense;
  EncodingKind encoding = EncodingKind::Algorithmic;
  NoiseSpec noise = NoiseSpec{NoiseKind::OrnsteinUhlenbeck, 1.0, 1.0, 0.0};
  double dt = 0.05;
  std::size_t n_steps = 800;
  std::size_t trotter_m = 3;
  std::size_t n_trajectories = 10000;
  std::size_t initial_site = 1;
  std::size_t target_site = 3;
  double threshold_time = 40.0;
  std::uint64_t master_seed = 1;
  unsigned threads = 0;
  std::string output = "populations.csv";

  // sweep
  std::vector<double> taus{0.0};
  double grid_min = 1e-2;
  double grid_max = 1e3;
  std::size_t points_per_decade = 10;
  double max_step_phase_variance = 0.2;

  // circuit-stats
  std::size_t n_min = 2;
  std::size_t n_max = 8;
  std::string connectivity = "full";

  void validate() const {
    auto need = [](bool ok, const char* msg) {
      if (!ok) throw ConfigError(msg);
    };
    need(dt > 0.0 && std::isfinite(dt), "run.dt must be > 0");
    need(n_steps >= 1, "run.n_steps must be >= 1");
    need(n_trajectories >= 1, "run.n_trajectories must be >= 1");
    need(trotter_m >= 1, "run.trotter_m must be >= 1");
    need(initial_site >= 1 && target_site >= 1, "sites are 1-based");
    need(threshold_time > 0.0, "run.threshold_time must be > 0");
    need(grid_min > 0.0 && grid_max >= grid_min, "sweep grid needs 0 < min <= max");
    need(points_per_decade >= 1, "sweep.points_per_decade must be >= 1");
    need(max_step_phase_variance > 0.0, "sweep.max_step_phase_variance must be > 0");
    need(n_min >= 2 && n_max >= n_min, "stats range needs 2 <= n_min <= n_max");
    need(connectivity == "full" || connectivity == "ring", "stats.connectivity must be full or ring");
    try {
      noise.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
};

namespace detail {

inline std::size_t parse_count(const std::string& key, const std::string& text) {
  const double v = parse_double(text);
  if (!(v >= 0.0) || v != std::floor(v) || v > 9.0e15) throw ConfigError(key + " must be a non-negative integer");
  return static_cast<std::size_t>(v);
}

inline std::uint64_t parse_seed(const std::string& text) {
  std::uint64_t v = 0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || r.ec != std::errc() || r.ptr != text.data() + text.size()) {
    throw ConfigError("run.master_seed must be an unsigned integer");
  }
  return v;
}

}  // namespace detail

/// Parses `key = value` lines grouped in [network], [noise], [run], [sweep],
/// [stats] and [output] sections. Unknown keys are rejected.
inline RunConfig read_config(std::istream& is) {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::read_ini(is, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  RunConfig c;
  for (const auto& [section, body] : pt) {
    if (body.empty() && !body.data().empty()) throw ConfigError("config: key '" + section + "' outside a section");
    for (const auto& [key, node] : body) {
      const std::string v = node.data();
      const std::string id = section + "." + key;
      if (id == "network.source") c.network = v;
      else if (id == "noise.kind") c.noise.kind = parse_noise_kind(v);
      else if (id == "noise.gamma") c.noise.gamma = parse_double(v);
      else if (id == "noise.tau") c.noise.tau = parse_double(v);
      else if (id == "noise.variance") c.noise.variance = parse_double(v);
      else if (id == "run.engine") c.engine = parse_engine(v);
      else if (id == "run.encoding") {
        try {
          c.encoding = parse_encoding(v);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
      }
      else if (id == "run.dt") c.dt = parse_double(v);
      else if (id == "run.n_steps") c.n_steps = detail::parse_count(id, v);
      else if (id == "run.trotter_m") c.trotter_m = detail::parse_count(id, v);
      else if (id == "run.n_trajectories") c.n_trajectories = detail::parse_count(id, v);
      else if (id == "run.initial_site") c.initial_site = detail::parse_count(id, v);
      else if (id == "run.target_site") c.target_site = detail::parse_count(id, v);
      else if (id == "run.threshold_time") c.threshold_time = parse_double(v);
      else if (id == "run.master_seed") c.master_seed = detail::parse_seed(v);
      else if (id == "run.threads") c.threads = static_cast<unsigned>(detail::parse_count(id, v));
      else if (id == "output.path") c.output = v;
      else if (id == "sweep.taus") c.taus = parse_double_list(v);
      else if (id == "sweep.gamma_min") c.grid_min = parse_double(v);
      else if (id == "sweep.gamma_max") c.grid_max = parse_double(v);
      else if (id == "sweep.points_per_decade") c.points_per_decade = detail::parse_count(id, v);
      else if (id == "sweep.max_step_phase_variance") c.max_step_phase_variance = parse_double(v);
      else if (id == "stats.n_min") c.n_min = detail::parse_count(id, v);
      else if (id == "stats.n_max") c.n_max = detail::parse_count(id, v);
      else if (id == "stats.connectivity") c.connectivity = v;
      else throw ConfigError("config: unknown key '" + id + "'");
    }
  }
  return c;
}

/// Resolved configuration in the same format read_config accepts.
inline void write_manifest(std::ostream& os, const RunConfig& c) {
  os << "[network]\nsource = " << c.network << "\n\n";
  os << "[noise]\nkind = " << noise_key(c.noise.kind) << "\ngamma = " << format_double(c.noise.gamma)
     << "\ntau = " << format_double(c.noise.tau) << "\nvariance = " << format_double(c.noise.variance) << "\n\n";
  os << "[run]\nengine = " << to_string(c.engine) << "\nencoding = " << to_string(c.encoding)
     << "\ndt = " << format_double(c.dt) << "\nn_steps = " << c.n_steps << "\ntrotter_m = " << c.trotter_m
     << "\nn_trajectories = " << c.n_trajectories << "\ninitial_site = " << c.initial_site
     << "\ntarget_site = " << c.target_site << "\nthreshold_time = " << format_double(c.threshold_time)
     << "\nmaster_seed = " << c.master_seed << "\nthreads = " << c.threads << "\n\n";
  os << "[sweep]\ntaus = ";
  for (std::size_t k = 0; k < c.taus.size(); ++k) os << (k ? ", " : "") << format_double(c.taus[k]);
  os << "\ngamma_min = " << format_double(c.grid_min) << "\ngamma_max = " << format_double(c.grid_max)
     << "\npoints_per_decade = " << c.points_per_decade
     << "\nmax_step_phase_variance = " << format_double(c.max_step_phase_variance) << "\n\n";
  os << "[stats]\nn_min = " << c.n_min << "\nn_max = " << c.n_max << "\nconnectivity = " << c.connectivity
     << "\n\n";
  os << "[output]\npath = " << c.output << '\n';
}

}  // namespace excitonsim
