#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace aerm {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Key of child stream `index` under `parent`. Keys form a tree, so every
/// replicate, trial or grid point gets its own stream no matter which worker
/// runs it.
constexpr std::uint64_t derive_key(std::uint64_t parent, std::uint64_t index) noexcept {
  return mix64(parent ^ mix64(index ^ 0x632be59bd9b4e019ULL));
}

/// Counter-based SplitMix64 stream. Output is a pure function of (key, draw
/// count), and the bounded/real transforms below are fixed here rather than
/// delegated to <random> distributions, whose output differs between
/// standard library implementations.
class Stream {
public:
  explicit constexpr Stream(std::uint64_t key) noexcept : key_(key) {}

  constexpr std::uint64_t next() noexcept { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n), n > 0. Lemire's multiply-and-reject.
  std::uint64_t below(std::uint64_t n) noexcept {
    std::uint64_t x = next();
    __uint128_t product = static_cast<__uint128_t>(x) * n;
    auto low = static_cast<std::uint64_t>(product);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        x = next();
        product = static_cast<__uint128_t>(x) * n;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return static_cast<std::uint64_t>(product >> 64);
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Standard normal via Box-Muller (one output per call).
  double normal() noexcept {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t key() const noexcept { return key_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace aerm
