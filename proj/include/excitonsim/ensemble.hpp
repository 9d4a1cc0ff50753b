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
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "excitonsim/errors.hpp"

namespace excitonsim {

/// Element-wise running mean and centred second moment (Welford), with the
/// pairwise merge of Chan et al. for combining partial results.
class MomentAccumulator {
 public:
  MomentAccumulator() = default;
  explicit MomentAccumulator(std::size_t length) : mean_(length, 0.0), m2_(length, 0.0) {}

  std::size_t count() const noexcept { return count_; }
  std::size_t length() const noexcept { return mean_.size(); }

  void add(std::span<const double> sample) {
    detail::require(sample.size() == mean_.size(), "MomentAccumulator: sample length mismatch");
    ++count_;
    const double inv = 1.0 / static_cast<double>(count_);
    for (std::size_t k = 0; k < mean_.size(); ++k) {
      const double delta = sample[k] - mean_[k];
      mean_[k] += delta * inv;
      m2_[k] += delta * (sample[k] - mean_[k]);
    }
  }

  void merge(const MomentAccumulator& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
      *this = other;
      return;
    }
    detail::require(other.length() == length(), "MomentAccumulator: merge length mismatch");
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(other.count_);
    const double n = na + nb;
    for (std::size_t k = 0; k < mean_.size(); ++k) {
      const double delta = other.mean_[k] - mean_[k];
      mean_[k] += delta * nb / n;
      m2_[k] += other.m2_[k] + delta * delta * na * nb / n;
    }
    count_ += other.count_;
  }

  double mean(std::size_t k) const { return mean_[k]; }
  const std::vector<double>& means() const noexcept { return mean_; }

  /// Unbiased sample variance; zero for fewer than two samples.
  double variance(std::size_t k) const {
    return count_ < 2 ? 0.0 : m2_[k] / static_cast<double>(count_ - 1);
  }

  /// Standard error of the mean, s / sqrt(n).
  double standard_error(std::size_t k) const {
    return count_ < 2 ? 0.0 : std::sqrt(variance(k) / static_cast<double>(count_));
  }

 private:
  std::size_t count_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

inline unsigned resolve_thread_count(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Trajectories per reduction chunk. Fixed so that the floating-point
/// reduction tree, and therefore every output bit, does not depend on the
/// number of workers.
inline constexpr std::size_t kTrajectoryChunk = 64;

/// Runs `n_trajectories` independent trajectories and reduces their
/// fixed-length sample vectors.
///
/// `make_worker()` is called once per thread and must return a callable
/// `void(std::size_t trajectory_index, std::span<double> sample_out)`. Each
/// worker owns its scratch state, so workers never share mutable data.
/// Trajectories are grouped in fixed chunks; chunk partials are merged in
/// chunk order after all workers finish.
template <class WorkerFactory>
MomentAccumulator reduce_trajectories(std::size_t n_trajectories, std::size_t sample_length,
                                      unsigned threads, WorkerFactory&& make_worker) {
  detail::require(n_trajectories >= 1, "reduce_trajectories: at least one trajectory is required");
  const std::size_t n_chunks = (n_trajectories + kTrajectoryChunk - 1) / kTrajectoryChunk;
  std::vector<MomentAccumulator> partials(n_chunks, MomentAccumulator(sample_length));
  std::atomic<std::size_t> next_chunk{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto run = [&] {
    try {
      auto worker = make_worker();
      std::vector<double> sample(sample_length);
      for (;;) {
        const std::size_t chunk = next_chunk.fetch_add(1);
        if (chunk >= n_chunks) break;
        const std::size_t begin = chunk * kTrajectoryChunk;
        const std::size_t end = std::min(n_trajectories, begin + kTrajectoryChunk);
        for (std::size_t xi = begin; xi < end; ++xi) {
          worker(xi, std::span<double>(sample));
          partials[chunk].add(sample);
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next_chunk.store(n_chunks);
    }
  };

  const unsigned n_threads =
      static_cast<unsigned>(std::min<std::size_t>(resolve_thread_count(threads), n_chunks));
  if (n_threads <= 1) {
    run();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(run);
  }
  if (failure) std::rethrow_exception(failure);

  MomentAccumulator total(sample_length);
  for (const auto& p : partials) total.merge(p);
  return total;
}

}  // namespace excitonsim
