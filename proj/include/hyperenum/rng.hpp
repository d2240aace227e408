#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace hyperenum {

/// SplitMix64, used only to expand a user seed into generator state.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

/// xoshiro256++ with a fixed, platform-independent seeding rule: the four
/// state words come from SplitMix64(seed). Worker w of a parallel run uses
/// seed XOR w, so the single-stream case is worker 0 verbatim.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    SplitMix64 sm(seed);
    s_[0] = sm.next();
    s_[1] = sm.next();
    s_[2] = sm.next();
    s_[3] = sm.next();
  }

  static Xoshiro256pp for_worker(std::uint64_t seed, std::uint64_t worker) {
    return Xoshiro256pp(seed ^ worker);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Unbiased integer in [0, n) by rejection; independent of any platform
  /// distribution implementation.
  std::uint64_t bounded(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t v = next();
      if (v >= threshold) return v % n;
    }
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4];
};

/// Fisher-Yates with the generator above, so shuffles are reproducible across
/// platforms and compilers.
template <typename T>
void shuffle(std::vector<T>& v, Xoshiro256pp& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.bounded(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace hyperenum
