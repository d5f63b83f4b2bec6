#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace pairinfer {

/// SplitMix64 (Steele, Lea and Flood 2014), used for seeding and stream
/// derivation.
constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Per-stream seed: master XOR a SplitMix64 hash chained over the indices.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> indices) {
  std::uint64_t hash_state = 0x243f6a8885a308d3ULL;
  std::uint64_t h = splitmix64(hash_state);
  for (auto index : indices) {
    hash_state ^= index + 0x632be59bd9b4e019ULL;
    h = splitmix64(hash_state) ^ (h << 1);
  }
  return master ^ h;
}

/// xoshiro256** 1.0 (Blackman and Vigna 2018). The output sequence is fixed
/// by the algorithm; all variates below are derived without <random>
/// distributions so results do not depend on the standard library.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open_low() { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }

  /// Exponential waiting time; +inf for rate 0.
  double exponential(double rate) {
    if (!(rate > 0.0)) return INFINITY;
    return -std::log(uniform_open_low()) / rate;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t state_[4]{};
};

}  // namespace pairinfer
