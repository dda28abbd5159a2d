#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace immunorec {

// Seeded generator whose derived draws are identical on every platform.
// std::uniform_*_distribution is implementation-defined, so bounded integers
// and unit reals are produced here directly from the 64-bit engine output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  // Uniform in [lo, hi] inclusive.
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi);

  // Uniform in [0, 1) with 53 random bits.
  double unit();

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  // Moves a uniform sample of min(count, items.size()) elements to the front
  // of `items` (partial Fisher-Yates) and returns that count.
  template <typename T>
  std::size_t sample_front(std::span<T> items, std::size_t count) {
    const std::size_t take = count < items.size() ? count : items.size();
    for (std::size_t i = 0; i < take; ++i) {
      const auto j = i + static_cast<std::size_t>(below(items.size() - i));
      std::swap(items[i], items[j]);
    }
    return take;
  }

  template <typename T>
  std::size_t sample_front(std::vector<T>& items, std::size_t count) {
    return sample_front(std::span<T>(items), count);
  }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Derives an independent sub-seed from a master seed and a tuple of keys,
// e.g. derive_seed({master, user_id, trial}).
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> keys) noexcept;

}  // namespace immunorec
