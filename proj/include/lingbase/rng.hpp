#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace lingbase::rng {

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic counter-addressed random stream. One master seed plus a
/// label and counter fully determine the sequence, so independent
/// substreams can be drawn in any order (or in parallel) with identical
/// results. All arithmetic is plain uint64, identical on every platform.
class Stream {
 public:
  Stream(std::uint64_t seed, std::string_view label, std::uint64_t counter = 0) {
    state_ = seed ^ fnv1a64(label);
    state_ ^= 0x632be59bd9b4e019ULL * (counter + 1);
    // burn a few outputs so nearby (seed, counter) pairs decorrelate
    splitmix64(state_);
    splitmix64(state_);
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  /// Uniform in [0, 1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Unbiased uniform integer in [0, n). n must be > 0.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace lingbase::rng
