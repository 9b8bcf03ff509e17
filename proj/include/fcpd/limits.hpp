#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "fcpd/stats_amoc.hpp"
#include "fcpd/weight.hpp"

namespace fcpd {

/// Standard Brownian bridge paths on the uniform time grid j/N, j = 0..N.
/// Column p of `values` is path p; every path is 0 at both ends exactly.
struct BridgePaths {
  int steps = 0;
  Eigen::MatrixXd values;  // (N+1) x P

  Eigen::Index path_count() const { return values.cols(); }
};

enum class LimitFamily { PC, FF, WF, PCGrad, FFGrad, WFGrad };

const char* limit_family_name(LimitFamily f);
LimitFamily limit_family_of(Method method, bool gradual);

/// Monte Carlo draws of a null limit distribution. Draws are stored on the
/// squared-statistic scale for every family (the natural scale for PC, the
/// square of the reported statistic for FF/WF); sqrt_draws() converts.
struct LimitSamples {
  std::vector<double> draws;
  LimitFamily family = LimitFamily::FF;
  std::vector<double> eigenvalues;
  Eigen::Index d = 0;
  std::optional<WeightFn> h;
  std::uint64_t seed = 0;
  int steps = 0;

  std::vector<double> sqrt_draws() const;
};

/// One family to simulate in a shared-bridge batch.
struct LimitSpec {
  Method family = Method::FF;
  bool gradual = false;
  Eigen::Index d = 0;  // PC only
};

BridgePaths simulate_bridges(Eigen::Index paths, int steps, std::uint64_t seed);

/// Limit processes G_p(t) = int_0^{1-t} B_p(1-t-y) dh(y) for every path,
/// evaluated on the same time grid by a left-endpoint Stieltjes sum. Step
/// and integer-power weights use exact O(N) cumulative-sum evaluation; other
/// weights fall back to the O(N^2) direct sum.
Eigen::MatrixXd gp_paths(const WeightFn& h, const BridgePaths& bridges);

/// Covariance of the limit process:
/// int_{s v t}^1 h(x-s)h(x-t) dx - int_s^1 h(x-s) dx * int_t^1 h(x-t) dx.
double gp_cov(const WeightFn& h, double s, double t);

/// Simulate several families from shared bridges. Draw r consumes the
/// normal stream keyed by (seed, r), so results are independent of thread
/// count and each entry is bit-identical to the matching single-family call.
std::vector<LimitSamples> limit_bundle(const std::vector<LimitSpec>& specs,
                                       const std::vector<double>& eigenvalues,
                                       const std::optional<WeightFn>& h,
                                       int replications, int steps,
                                       std::uint64_t seed, int threads = 1);

LimitSamples limit_amoc(Method family, const std::vector<double>& eigenvalues,
                        Eigen::Index d, int replications, int steps,
                        std::uint64_t seed, int threads = 1);

LimitSamples limit_gradual(Method family, const std::vector<double>& eigenvalues,
                           Eigen::Index d, const WeightFn& h, int replications,
                           int steps, std::uint64_t seed, int threads = 1);

/// Empirical (1-alpha) quantile of the draws, type-7 interpolation.
double crit_value(const LimitSamples& samples, double alpha);

/// p = (1 + #{draws >= observed}) / (R + 1); `observed` must be on the
/// stored (squared) scale.
double p_value(const LimitSamples& samples, double observed);

}  // namespace fcpd
