#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace campinc {

// Deterministic RNG with portable draw semantics. The standard
// distributions are implementation-defined, so index and real draws are
// derived from the raw engine output directly.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, n) by rejection, bias-free.
  std::size_t uniform_index(std::size_t n) {
    if (n == 0) {
      throw std::invalid_argument("uniform_index over empty range");
    }
    const std::uint64_t span = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= span);
    return static_cast<std::size_t>(x % n);
  }

  // Uniform in [lo, hi).
  double uniform_real(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }

  template <typename T>
  std::vector<T> sample_without_replacement(std::vector<T> pool, std::size_t k) {
    if (k > pool.size()) {
      throw std::invalid_argument("sample size exceeds pool");
    }
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + uniform_index(pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
  }

private:
  std::mt19937_64 engine_;
};

} // namespace campinc
