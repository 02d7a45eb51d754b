#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace l2field {

/// Execution policy for the data-parallel kernels. `serial` is the reference
/// implementation; both produce bit-identical output.
enum class Exec { serial, parallel };

using Rng = std::mt19937_64;

/// Sub-seed for stream `index` of a run seeded with `seed` (splitmix64 mix).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Caps the OpenMP worker count. Values < 1 restore the runtime default.
void set_worker_threads(int n);
int worker_threads();

/// Applies L2FIELD_THREADS from the environment, if set. Returns the cap or 0.
int apply_thread_env();

/// Running first and second moments, combined in a fixed order.
struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) noexcept;
  void merge(const Moments& other) noexcept;
  double variance() const noexcept;  // unbiased
  double std_error() const noexcept;
};

/// Samples per Monte-Carlo chunk. Fixed so the chunk decomposition (and hence
/// the output) never depends on the number of threads.
inline constexpr std::size_t kMcChunk = 4096;

/// Chunked Monte-Carlo moment accumulation. Chunk i draws from an Rng seeded
/// with mix_seed(seed, i); chunk moments are merged in chunk order.
template <class SampleFn>
Moments chunked_moments(std::size_t n, std::uint64_t seed, SampleFn&& sample,
                        Exec exec = Exec::parallel) {
  const std::size_t n_chunks = (n + kMcChunk - 1) / kMcChunk;
  std::vector<Moments> parts(n_chunks);
  auto run_chunk = [&](std::size_t c) {
    Rng rng(mix_seed(seed, c));
    const std::size_t begin = c * kMcChunk;
    const std::size_t end = begin + kMcChunk < n ? begin + kMcChunk : n;
    Moments m;
    for (std::size_t i = begin; i < end; ++i) m.add(sample(rng));
    parts[c] = m;
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_chunks); ++c)
      run_chunk(static_cast<std::size_t>(c));
  } else {
    for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
  }
  Moments total;
  for (const auto& p : parts) total.merge(p);
  return total;
}

}  // namespace l2field
