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

// excitonsim: command-line driver.
//
//   excitonsim simulate      --config run.ini [--engine dense|emulator|lindblad|kinetic]
//   excitonsim sweep         --config run.ini
//   excitonsim circuit-stats --config run.ini
//   excitonsim dump-circuit  --config run.ini --output step.txt
//
// Exit status: 0 success, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "excitonsim/analysis.hpp"
#include "excitonsim/circuit_synth.hpp"
#include "excitonsim/dense_propagator.hpp"
#include "excitonsim/emulator.hpp"
#include "excitonsim/errors.hpp"
#include "excitonsim/io.hpp"
#include "excitonsim/network.hpp"

namespace es = excitonsim;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Overrides {
  std::string config_path;
  std::optional<std::string> engine;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> output;
  std::optional<std::string> dump_circuit;
};

es::RunConfig resolve(const Overrides& o) {
  es::RunConfig c;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw es::ConfigError("cannot open config '" + o.config_path + "'");
    c = es::read_config(in);
  }
  if (o.engine) c.engine = es::parse_engine(*o.engine);
  if (o.seed) c.master_seed = *o.seed;
  if (o.threads) c.threads = *o.threads;
  if (o.output) c.output = *o.output;
  c.validate();
  return c;
}

es::ExcitonNetwork load_network(const std::string& source) {
  try {
    return es::reference_hamiltonian(es::parse_reference_network(source));
  } catch (const std::invalid_argument&) {
  }
  if (!std::filesystem::is_regular_file(source)) {
    throw es::ConfigError("network '" + source + "' is neither a built-in id nor a readable file");
  }
  std::ifstream in(source);
  return es::read_network(in);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw es::ConfigError("cannot write '" + path + "'");
  return out;
}

void write_manifest_for(const es::RunConfig& c) {
  auto out = open_output(c.output + ".manifest");
  es::write_manifest(out, c);
}

es::Circuit noise_free_step(const es::ExcitonNetwork& net, const es::RunConfig& c) {
  const std::vector<double> zero(net.n_sites(), 0.0);
  return es::synth_step(net, c.encoding, zero, c.dt, c.trotter_m);
}

void check_site(std::size_t site, std::size_t n, const char* what) {
  if (site < 1 || site > n) throw es::ConfigError(std::string(what) + " out of range for this network");
}

int cmd_simulate(const Overrides& o) {
  const auto c = resolve(o);
  const auto net = load_network(c.network);
  const std::size_t n = net.n_sites();
  check_site(c.initial_site, n, "run.initial_site");
  check_site(c.target_site, n, "run.target_site");
  const auto psi0 = es::StateVector::basis(n, c.initial_site - 1);

  es::PopulationSeries series;
  switch (c.engine) {
    case es::EngineKind::Dense:
      series = es::ensemble_average(net, c.noise, psi0,
                                    {c.n_trajectories, c.n_steps, c.dt, c.master_seed, c.threads});
      break;
    case es::EngineKind::Emulator: {
      es::AlgorithmConfig a;
      a.dt = c.dt;
      a.n_steps = c.n_steps;
      a.trotter_m = c.trotter_m;
      a.n_trajectories = c.n_trajectories;
      a.initial_site = c.initial_site;
      a.master_seed = c.master_seed;
      a.threads = c.threads;
      series = es::run_algorithm(net, c.noise, c.encoding, a);
      break;
    }
    case es::EngineKind::Lindblad:
      if (c.noise.kind != es::NoiseKind::White) throw es::ConfigError("lindblad engine requires white noise");
      series = es::lindblad_reference(net, c.noise.gamma, psi0, c.dt, c.n_steps);
      break;
    case es::EngineKind::Kinetic: {
      if (c.noise.kind == es::NoiseKind::Static) throw es::ConfigError("kinetic engine requires white or ou noise");
      const double tau = c.noise.kind == es::NoiseKind::White ? 0.0 : c.noise.tau;
      std::vector<double> p0(n, 0.0);
      p0[c.initial_site - 1] = 1.0;
      series = es::kinetic_propagate(es::forster_rates(net, c.noise.gamma, tau), p0, c.dt, c.n_steps);
      break;
    }
  }

  {
    auto out = open_output(c.output);
    es::write_population_csv(out, series);
  }
  write_manifest_for(c);
  if (o.dump_circuit) {
    auto out = open_output(*o.dump_circuit);
    es::write_circuit(out, noise_free_step(net, c));
  }
  if (c.threshold_time <= static_cast<double>(c.n_steps) * c.dt * (1.0 + 1e-12)) {
    std::cout << "eta[" << c.target_site << "](T=" << es::format_double(c.threshold_time)
              << ") = " << es::format_double(es::efficiency(series, c.target_site, c.threshold_time)) << '\n';
  }
  return 0;
}

int cmd_sweep(const Overrides& o) {
  const auto c = resolve(o);
  const auto net = load_network(c.network);
  check_site(c.initial_site, net.n_sites(), "run.initial_site");
  check_site(c.target_site, net.n_sites(), "run.target_site");
  es::SweepConfig s;
  s.dt = c.dt;
  s.threshold_time = c.threshold_time;
  s.n_trajectories = c.n_trajectories;
  s.initial_site = c.initial_site;
  s.target_site = c.target_site;
  s.master_seed = c.master_seed;
  s.threads = c.threads;
  s.max_step_phase_variance = c.max_step_phase_variance;
  const auto grid = es::log_grid(c.grid_min, c.grid_max, c.points_per_decade);
  const auto profiles = es::sweep_efficiency(net, c.taus, grid, s);
  {
    auto out = open_output(c.output);
    es::write_sweep_csv(out, profiles);
  }
  write_manifest_for(c);
  return 0;
}

int cmd_circuit_stats(const Overrides& o) {
  const auto c = resolve(o);
  const bool physical = c.encoding == es::EncodingKind::Physical;
  if (c.n_max > (physical ? 64u : 32u)) throw es::ConfigError("stats.n_max too large for this encoding");
  std::cout << "N,qubits,cnot_count,depth,cnot_bound,violation\n";
  for (std::size_t n = c.n_min; n <= c.n_max; ++n) {
    const auto topo = c.connectivity == "ring" ? es::ring_topology(n) : es::full_topology(n);
    std::vector<double> energies(n);
    for (std::size_t i = 0; i < n; ++i) energies[i] = 0.1 * static_cast<double>(i + 1);
    const es::ExcitonNetwork net(energies, topo);
    const std::vector<double> zero(n, 0.0);
    const auto circuit = es::peephole_cancel(es::synth_step(net, c.encoding, zero, c.dt, 1));
    const auto m = es::metrics(circuit);
    const std::size_t q = circuit.n_qubits();
    const std::size_t bound = physical ? n * (n - 1) : (std::size_t{2} << (2 * q)) * (q > 0 ? q - 1 : 0);
    std::cout << n << ',' << q << ',' << m.cnot_count << ',' << m.depth << ',' << bound << ','
              << (m.cnot_count > bound ? "yes" : "no") << '\n';
  }
  return 0;
}

int cmd_dump_circuit(const Overrides& o) {
  const auto c = resolve(o);
  const auto net = load_network(c.network);
  const std::string path = o.dump_circuit ? *o.dump_circuit : c.output;
  auto out = open_output(path);
  es::write_circuit(out, noise_free_step(net, c));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exciton transport under colored noise"};
  app.require_subcommand(1);
  Overrides o;
  std::string engine, output, dump;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "Run configuration file");
    sub->add_option("--engine", engine, "dense, emulator, lindblad or kinetic");
    sub->add_option("--seed", seed, "Master seed");
    sub->add_option("--threads", threads, "Worker threads (0: hardware)");
    sub->add_option("--output", output, "Output path");
    sub->add_option("--dump-circuit", dump, "Write the noise-free step circuit here");
  };
  auto* simulate = app.add_subcommand("simulate", "Population dynamics of one configuration");
  auto* sweep = app.add_subcommand("sweep", "Efficiency against noise strength");
  auto* stats = app.add_subcommand("circuit-stats", "CNOT count and depth of one Trotter step");
  auto* dumpc = app.add_subcommand("dump-circuit", "Write one Trotter step circuit");
  for (auto* s : {simulate, sweep, stats, dumpc}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  auto* active = app.get_subcommands().front();
  if (active->count("--engine")) o.engine = engine;
  if (active->count("--seed")) o.seed = seed;
  if (active->count("--threads")) o.threads = threads;
  if (active->count("--output")) o.output = output;
  if (active->count("--dump-circuit")) o.dump_circuit = dump;

  try {
    if (active == simulate) return cmd_simulate(o);
    if (active == sweep) return cmd_sweep(o);
    if (active == stats) return cmd_circuit_stats(o);
    return cmd_dump_circuit(o);
  } catch (const es::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}
