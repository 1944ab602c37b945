#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace hmrs {

/// Per-component seed: splitmix64(master XOR fnv1a64(component)).
///
/// Components are named by role and position, e.g. "folds" or
/// "som/male/fold2/rep7", so a component's stream does not depend on the
/// order in which work is scheduled.
std::uint64_t derive_seed(std::uint64_t master, std::string_view component) noexcept;

std::uint64_t fnv1a64(std::string_view text) noexcept;
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// mt19937_64 with distribution code written out, so streams are identical
/// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hmrs
