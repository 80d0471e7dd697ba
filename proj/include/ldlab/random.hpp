#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace ldlab {

/// Stafford "mix13" finalizer (the SplitMix64 output function).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// Combine two words into one key; not symmetric in its arguments.
constexpr std::uint64_t hash_pair(std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(mix64(a + kGolden) ^ (b * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

/// 53-bit uniform in [0,1).
constexpr double u64_to_unit(std::uint64_t x) noexcept {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// 53-bit uniform in (0,1); safe for log().
constexpr double u64_to_open_unit(std::uint64_t x) noexcept {
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

/**
 * @brief Sequential generator identified by (seed, stream_id).
 *
 * xoshiro256** seeded through SplitMix64 from a hash of the pair. All
 * distribution code is local so draws are bitwise identical across
 * standard libraries and thread counts.
 */
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id) {
    std::uint64_t sm = hash_pair(seed, stream_id);
    for (auto& w : s_) {
      sm += kGolden;
      w = mix64(sm);
    }
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Independent child stream; the parent's state is not advanced.
  RandomStream substream(std::uint64_t id) const {
    return RandomStream(hash_pair(seed_, stream_id_ ^ 0x5bd1e9955bd1e995ULL), id);
  }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  double uniform() noexcept { return u64_to_unit(next_u64()); }
  double uniform_open() noexcept { return u64_to_open_unit(next_u64()); }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Unbiased integer in [0, k) by rejection on the top bits.
  std::uint64_t uniform_int(std::uint64_t k) noexcept {
    if (k <= 1) return 0;
    const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % k);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % k;
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double sd) noexcept { return mean + sd * normal(); }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t s_[4]{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/**
 * @brief Counter-based draws: value depends only on (key, index, lane).
 *
 * Used where per-entry randomness must not depend on visiting order.
 */
class CounterRandom {
 public:
  explicit CounterRandom(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t key() const noexcept { return key_; }

  std::uint64_t bits(std::uint64_t index, std::uint64_t lane) const noexcept {
    return hash_pair(key_, index * 8 + lane);
  }
  double uniform(std::uint64_t index, std::uint64_t lane = 0) const noexcept {
    return u64_to_unit(bits(index, lane));
  }
  /// Two independent standard normals from lanes (2k, 2k+1).
  void normal_pair(std::uint64_t index, std::uint64_t k, double& z0, double& z1) const noexcept {
    const double u1 = u64_to_open_unit(bits(index, 2 * k));
    const double u2 = u64_to_unit(bits(index, 2 * k + 1));
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    z0 = r * std::cos(a);
    z1 = r * std::sin(a);
  }
  double normal(std::uint64_t index) const noexcept {
    double z0, z1;
    normal_pair(index, 0, z0, z1);
    return z0;
  }

 private:
  std::uint64_t key_;
};

}  // namespace ldlab
