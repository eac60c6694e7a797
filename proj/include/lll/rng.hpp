#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

namespace lll {

// Counter-based pseudo-random generator: output i is a bijective mix of
// (key, i), so a generator is just a key plus a position. Derived streams
// re-key with a stream id and are independent of the parent's draws.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix64(mix64(seed, 0x9e3779b97f4a7c15ull), stream)) {}

  std::uint64_t next_u64() { return mix64(key_, counter_++); }

  CounterRng derive(std::uint64_t stream_id) const {
    CounterRng r(*this);
    r.key_ = mix64(key_ ^ 0x6a09e667f3bcc909ull, stream_id);
    r.counter_ = 0;
    return r;
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n), unbiased via rejection.
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("next_below: n must be positive");
    const std::uint64_t lo = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      std::uint64_t x = next_u64();
      if (x >= lo) return x % n;
    }
  }

  bool bernoulli(double p) { return next_double() < p; }

  static std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + (b + 1) * 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Categorical draw from nonnegative weights summing to ~1.
inline int draw_weighted_index(std::span<const double> weights, CounterRng& rng) {
  double u = rng.next_double();
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

}  // namespace lll
