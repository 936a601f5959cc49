#pragma once
#include <cmath>
#include <cstdint>

namespace qvcz {

/// SplitMix64; used to expand seeds into stream keys.
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

/// xoshiro256++ with explicit 64-bit seeding. Deterministic for a given
/// build; cross-platform bit identity is not guaranteed by the float path.
class Xoshiro256pp {
public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
  }

  std::uint64_t next_u64() {
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

  /// Uniform in (0,1]; never returns 0 so log() is safe.
  double next_unit() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal pair via Box-Muller.
  void next_normal_pair(double& a, double& b) {
    const double u = next_unit();
    const double v = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double phi = 6.283185307179586476925286766559 * v;
    a = r * std::cos(phi);
    b = r * std::sin(phi);
  }

  /// Circular complex normal CN(0,1) by the polar method: each quadrature
  /// is N(0, 1/2). Avoids trig in the sampling hot path.
  void next_cnormal(double& re, double& im) {
    double u, v, s;
    do {
      u = 2.0 * next_unit() - 1.0;
      v = 2.0 * next_unit() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-std::log(s) / s);
    re = u * f;
    im = v * f;
  }

private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

/// Derives an independent substream key from (seed, index), e.g. one per
/// Monte Carlo realization.
inline std::uint64_t substream_key(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 sm(seed ^ (0x6a09e667f3bcc909ULL + index * 0x9e3779b97f4a7c15ULL));
  sm.next();
  return sm.next();
}

} // namespace qvcz
