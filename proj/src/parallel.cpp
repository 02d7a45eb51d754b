#include "l2field/parallel.hpp"

#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <string>

namespace l2field {

namespace {
int g_default_threads = 0;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  auto splitmix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return splitmix(splitmix(seed) ^ (index * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL));
}

void set_worker_threads(int n) {
  if (g_default_threads == 0) g_default_threads = omp_get_max_threads();
  omp_set_num_threads(n >= 1 ? n : g_default_threads);
}

int worker_threads() { return omp_get_max_threads(); }

int apply_thread_env() {
  const char* env = std::getenv("L2FIELD_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  int n = 0;
  try {
    n = std::stoi(env);
  } catch (...) {
    return 0;
  }
  if (n < 1) return 0;
  set_worker_threads(n);
  return n;
}

void Moments::add(double x) noexcept {
  ++n;
  const double delta = x - mean;
  mean += delta / static_cast<double>(n);
  m2 += delta * (x - mean);
}

void Moments::merge(const Moments& other) noexcept {
  if (other.n == 0) return;
  if (n == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n);
  const double nb = static_cast<double>(other.n);
  const double delta = other.mean - mean;
  const double total = na + nb;
  mean += delta * nb / total;
  m2 += other.m2 + delta * delta * na * nb / total;
  n += other.n;
}

double Moments::variance() const noexcept {
  return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
}

double Moments::std_error() const noexcept {
  return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
}

}  // namespace l2field
