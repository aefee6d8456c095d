// Copyright 2026 The qcbind Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QCBIND_COMMON_HPP
#define QCBIND_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace qcbind {

// Error taxonomy. The CLI maps these onto process exit codes
// (config/usage -> 1, data -> 2, numerical checks -> 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};
class DataError : public Error {
 public:
  using Error::Error;
};
class ConfigError : public Error {
 public:
  using Error::Error;
};
class ShapeError : public Error {
 public:
  using Error::Error;
};
class WiringError : public Error {
 public:
  using Error::Error;
};
class DomainError : public Error {
 public:
  using Error::Error;
};
class RankDeficiencyError : public Error {
 public:
  using Error::Error;
};
class IoError : public Error {
 public:
  using Error::Error;
};
class NumericCheckError : public Error {
 public:
  using Error::Error;
};

namespace detail {

// Deterministic RNG. All randomness in the library flows through this class so
// that results are reproducible bit-for-bit for a given seed, independent of
// the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; draws two uniforms per call, no cached state.
  double normal(double mean = 0.0, double sigma = 1.0) {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return mean +
           sigma * std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
  }

  // Uniform integer in [0, n); n > 0.
  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(gen_()) * n) >> 64);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 gen_;
};

// splitmix64-style mixer for deriving independent seed streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Exact log2 of a power of two; throws otherwise.
inline int log2_exact(std::size_t n, const char* what) {
  if (n == 0 || (n & (n - 1)) != 0)
    throw ShapeError(std::string(what) + ": size " + std::to_string(n) +
                     " is not a power of two");
  int k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

inline int thread_count() {
  static const int n = [] {
    if (const char* env = std::getenv("QCBIND_THREADS")) {
      const int v = std::atoi(env);
      if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw != 0 ? static_cast<int>(hw) : 1;
  }();
  return n;
}

inline bool& inside_parallel_region() {
  thread_local bool flag = false;
  return flag;
}

// Runs body(begin, end) over a partition of [0, n). Chunks are disjoint, so
// results are identical for any thread count as long as the body only writes
// locations owned by its own range. Nested calls run inline rather than
// spawning threads-of-threads.
inline void parallel_for(
    std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
  if (workers <= 1 || inside_parallel_region()) {
    if (n != 0) body(0, n);
    return;
  }
  const std::size_t per = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t c = 0; c < workers; ++c) {
    const std::size_t b = c * per;
    const std::size_t e = std::min(n, b + per);
    if (b >= e) break;
    pool.emplace_back([&body, b, e] {
      inside_parallel_region() = true;
      body(b, e);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace detail
}  // namespace qcbind

#endif  // QCBIND_COMMON_HPP
