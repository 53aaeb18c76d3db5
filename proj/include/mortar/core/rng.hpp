#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace mortar {

// SplitMix64 finalizer. Every seed in the system is derived through this so
// that a run is reproducible from a single 64-bit run seed.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Hash-split a parent seed with an ordered list of stream labels.
//   h0 = mix64(parent); h_{k+1} = mix64(h_k ^ mix64(label_k + k + 1))
constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                    std::initializer_list<std::uint64_t> labels) noexcept {
  std::uint64_t h = mix64(parent);
  std::uint64_t k = 0;
  for (auto label : labels) {
    h = mix64(h ^ mix64(label + (++k)));
  }
  return h;
}

// Small, copyable generator (one 64-bit word of state). Bounded draws use a
// plain modulo so that other implementations (e.g. the web player) can
// reproduce the exact stream.
class Rng {
 public:
  constexpr explicit Rng(std::uint64_t seed = 0) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n). n must be > 0.
  constexpr std::uint64_t below(std::uint64_t n) noexcept { return next() % n; }

  // Uniform in [0, 1) with 53 bits of resolution.
  constexpr double unit() noexcept {
    return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0);
  }

  constexpr bool chance(double p) noexcept { return unit() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) noexcept {
    for (std::size_t i = v.size(); i > 1; --i) {
      auto j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  constexpr std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace mortar
