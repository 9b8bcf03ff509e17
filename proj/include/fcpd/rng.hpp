#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <cstring>

namespace fcpd::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// xoshiro256++ (Blackman/Vigna). Small, fast, and good enough for Monte
/// Carlo; state is seeded through a splitmix64 chain so any 64-bit key works.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on (0,1); never returns 0 so log() is safe.
  double uniform01() {
    std::uint64_t bits = next() >> 11;
    while (bits == 0) bits = next() >> 11;
    return static_cast<double>(bits) * 0x1.0p-53;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> state_{};
};

/// Key for an independent stream identified by (seed, index). Streams are
/// order-independent: stream k never depends on whether streams < k were
/// drawn, which makes replicate-level parallelism deterministic.
inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  s = index ^ 0x6a09e667f3bcc909ULL;
  std::uint64_t b = splitmix64(s);
  s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  return splitmix64(s);
}

inline Xoshiro256pp keyed_stream(std::uint64_t seed, std::uint64_t index) {
  return Xoshiro256pp(stream_key(seed, index));
}

/// Standard normal draws via Box-Muller on a keyed stream.
class NormalStream {
 public:
  explicit NormalStream(Xoshiro256pp rng) : rng_(rng) {}
  NormalStream(std::uint64_t seed, std::uint64_t index)
      : rng_(keyed_stream(seed, index)) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = rng_.uniform01();
    const double u2 = rng_.uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  void fill(double* dst, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) dst[i] = next();
  }

 private:
  Xoshiro256pp rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Bulk standard-normal sampler for path simulation. Box-Muller evaluated
/// blockwise in a translation unit built so log/sin/cos vectorize, an order
/// of magnitude faster than the scalar stream. Draws appear in blocks of
/// [r*cos(angles)..., r*sin(angles)...]; the sequence is deterministic in
/// (seed, index) but differs from NormalStream's ordering.
class NormalBlockSampler {
 public:
  NormalBlockSampler(std::uint64_t seed, std::uint64_t index)
      : rng_(keyed_stream(seed, index)),
        u1_(kPairs), u2_(kPairs), radius_(kPairs), buf_(2 * kPairs) {}

  void fill(double* dst, Eigen::Index count) {
    while (count > 0) {
      if (pos_ == buf_.size()) refill();
      const Eigen::Index take = std::min<Eigen::Index>(count, buf_.size() - pos_);
      std::memcpy(dst, buf_.data() + pos_, static_cast<std::size_t>(take) * sizeof(double));
      pos_ += take;
      dst += take;
      count -= take;
    }
  }

 private:
  static constexpr Eigen::Index kPairs = 512;

  void refill();  // rng_block.cpp, compiled with vectorized libm

  Xoshiro256pp rng_;
  Eigen::ArrayXd u1_, u2_, radius_, buf_;
  Eigen::Index pos_ = 2 * kPairs;  // empty until first refill
};

}  // namespace fcpd::rng
