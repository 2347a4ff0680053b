#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "common/error.hpp"

namespace seam {

// Deterministic RNG used everywhere randomness is needed. mt19937_64's output
// sequence is fixed by the standard, and all derived draws below avoid
// std::*_distribution (whose algorithms are implementation-defined), so the
// same seed yields the same stream on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, n). Rejection-sampled to avoid modulo bias.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) raise(ErrorKind::Validate, "Rng::below called with n == 0");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

  // Uniform integer in [lo, hi] inclusive.
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  // True with probability num/den.
  bool chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }

  // Uniform in [0, 1) with 53 bits, deterministic bit recipe.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform in [-bound, bound].
  double symmetric(double bound) { return (unit() * 2.0 - 1.0) * bound; }

  template <typename T>
  const T& pick(const std::vector<T>& items) {
    if (items.empty()) raise(ErrorKind::Validate, "Rng::pick on empty vector");
    return items[below(items.size())];
  }

  // In-place Fisher-Yates shuffle (std::shuffle is implementation-defined).
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // Stable child stream: lets independent phases draw without interleaving.
  Rng fork(std::uint64_t tag) {
    std::uint64_t mixed = engine_() ^ (0x9e3779b97f4a7c15ULL * (tag + 1));
    return Rng(mixed);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace seam
