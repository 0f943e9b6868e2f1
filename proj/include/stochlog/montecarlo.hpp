#pragma once

// Reproducible Monte Carlo plumbing: one RNG substream per sample index and a
// reduction tree keyed by sample index, so results do not depend on how many
// worker threads ran the loop.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "stochlog/errors.hpp"

namespace stochlog {

struct McConfig {
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 42;
  bool antithetic = true;
  unsigned workers = 1;

  void validate() const {
    if (samples < 2) throw ArgumentError("McConfig: samples must be at least 2");
    if (workers == 0) throw ArgumentError("McConfig: workers must be positive");
  }
};

/// Default sample count by system dimension.
inline std::uint64_t default_samples(std::size_t dim) {
  if (dim <= 4) return 1'000'000;
  if (dim <= 16) return 100'000;
  return 10'000;
}

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of the stream owned by sample `index` under master seed `seed`.
inline constexpr std::uint64_t substream_seed(std::uint64_t seed,
                                              std::uint64_t index) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

/// SplitMix64 as a UniformRandomBitGenerator; cheap to construct per sample.
class Substream {
 public:
  using result_type = std::uint64_t;

  Substream(std::uint64_t seed, std::uint64_t index) noexcept
      : state_(substream_seed(seed, index)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Streaming mean/variance (Welford) with a deterministic merge (Chan et al.).
/// Non-finite observations are counted and kept out of the moments.
struct Accumulator {
  std::uint64_t count = 0;
  std::uint64_t nonfinite = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) noexcept {
    if (!std::isfinite(x)) {
      ++nonfinite;
      return;
    }
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  static Accumulator merge(const Accumulator& a, const Accumulator& b) noexcept {
    if (a.count == 0) return {a.count + b.count, a.nonfinite + b.nonfinite, b.mean, b.m2};
    if (b.count == 0) return {a.count, a.nonfinite + b.nonfinite, a.mean, a.m2};
    Accumulator out;
    out.count = a.count + b.count;
    out.nonfinite = a.nonfinite + b.nonfinite;
    const double na = static_cast<double>(a.count);
    const double nb = static_cast<double>(b.count);
    const double n = static_cast<double>(out.count);
    const double delta = b.mean - a.mean;
    out.mean = a.mean + delta * (nb / n);
    out.m2 = a.m2 + b.m2 + delta * delta * (na * nb / n);
    return out;
  }

  double variance() const noexcept {
    return count >= 2 ? m2 / static_cast<double>(count - 1) : 0.0;
  }

  double std_error() const noexcept {
    return count >= 2 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
  }
};

inline constexpr std::uint64_t kReductionBlock = 1024;

/// Runs `samples` independent evaluations, each producing `dims` statistics,
/// and reduces them per dimension. `make_worker()` is called once per thread
/// and must return a callable `(std::uint64_t index, std::span<double> out)`.
/// Samples are grouped into fixed blocks of kReductionBlock indices; blocks are
/// merged pairwise in index order, so the output is bit-identical for any
/// worker count.
template <class MakeWorker>
std::vector<Accumulator> accumulate_samples(std::uint64_t samples, std::size_t dims,
                                            unsigned workers, MakeWorker make_worker) {
  const std::uint64_t blocks = (samples + kReductionBlock - 1) / kReductionBlock;
  std::vector<std::vector<Accumulator>> partial(blocks, std::vector<Accumulator>(dims));

  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::uint64_t first_error_block = std::numeric_limits<std::uint64_t>::max();

  auto run = [&]() {
    std::uint64_t current = 0;
    try {
      auto worker = make_worker();
      std::vector<double> out(dims);
      for (;;) {
        const std::uint64_t b = next.fetch_add(1);
        if (b >= blocks || failed.load()) return;
        current = b;
        const std::uint64_t begin = b * kReductionBlock;
        const std::uint64_t end = std::min(samples, begin + kReductionBlock);
        auto& acc = partial[b];
        for (std::uint64_t i = begin; i < end; ++i) {
          try {
            worker(i, std::span<double>(out));
          } catch (const ConvergenceError& e) {
            throw e.at_sample(i);
          }
          for (std::size_t d = 0; d < dims; ++d) acc[d].add(out[d]);
        }
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!first_error || current < first_error_block) {
        first_error = std::current_exception();
        first_error_block = current;
      }
      failed = true;
    }
  };

  const unsigned nthreads =
      static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, workers), blocks));
  if (nthreads <= 1) {
    run();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(run);
  }
  if (first_error) std::rethrow_exception(first_error);

  // pairwise tree over blocks
  while (partial.size() > 1) {
    std::vector<std::vector<Accumulator>> merged;
    merged.reserve((partial.size() + 1) / 2);
    for (std::size_t k = 0; k + 1 < partial.size(); k += 2) {
      std::vector<Accumulator> m(dims);
      for (std::size_t d = 0; d < dims; ++d) {
        m[d] = Accumulator::merge(partial[k][d], partial[k + 1][d]);
      }
      merged.push_back(std::move(m));
    }
    if (partial.size() % 2 == 1) merged.push_back(std::move(partial.back()));
    partial = std::move(merged);
  }
  if (partial.empty()) return std::vector<Accumulator>(dims);
  return std::move(partial.front());
}

}  // namespace stochlog
