// Built with -ffast-math so the transcendentals below compile to libmvec
// SIMD calls. Only straight-line Box-Muller lives here; uniforms cannot be
// 0 or 1, so every intermediate is finite.
#include "fcpd/rng.hpp"

#include <cmath>

namespace fcpd::rng {

void NormalBlockSampler::refill() {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  double* u1 = u1_.data();
  double* u2 = u2_.data();
  double* radius = radius_.data();
  double* out = buf_.data();
  for (Eigen::Index j = 0; j < kPairs; ++j) u1[j] = rng_.uniform01();
  for (Eigen::Index j = 0; j < kPairs; ++j) u2[j] = rng_.uniform01();
  for (Eigen::Index j = 0; j < kPairs; ++j) {
    radius[j] = std::sqrt(-2.0 * std::log(u1[j]));
  }
  for (Eigen::Index j = 0; j < kPairs; ++j) {
    out[j] = radius[j] * std::cos(kTwoPi * u2[j]);
  }
  for (Eigen::Index j = 0; j < kPairs; ++j) {
    out[kPairs + j] = radius[j] * std::sin(kTwoPi * u2[j]);
  }
  pos_ = 0;
}

}  // namespace fcpd::rng
