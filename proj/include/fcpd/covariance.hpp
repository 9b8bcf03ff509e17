#pragma once

#include <Eigen/Dense>
#include <string>

#include "fcpd/fseries.hpp"

namespace fcpd {

/// Discretized integral operator on the grid. The action on a curve f is
/// (Af)(s_j) = sum_l weights[l] * kernel(j,l) * f[l].
struct LinOp {
  Eigen::MatrixXd kernel;
  Grid grid;

  Curve apply(const Curve& f) const;
};

enum class KernelId { bartlett, parzen, flattop };

/// Lag-weight kernel for the long-run covariance estimator. `order` is the
/// characteristic exponent q governing 1-K(x) near 0 (infinite for the
/// flat-top taper); `support` is the c with K = 0 outside [-c,c].
struct KernelFn {
  KernelId id;
  double order;
  double support;

  double operator()(double x) const;

  static KernelFn bartlett();
  static KernelFn parzen();
  static KernelFn flattop();
  static KernelFn by_name(const std::string& name);
  const char* name() const;
};

struct Bandwidth {
  double value;
};

/// Empirical lagged autocovariance operator at lag r (divisor n, centered
/// rows). |r| >= n yields the zero operator.
LinOp lag_cov(const FSeries& xs, long r);

/// Kernel long-run covariance estimate: sum over |r| <= min(n-1, ceil(c*h))
/// of K(r/h) * lag_cov(r), symmetrized.
LinOp lrcov(const FSeries& xs, const KernelFn& k, Bandwidth h);

/// Rate-based default h = n^(1/(2q+1)), clamped into [1, n].
Bandwidth default_bandwidth(Eigen::Index n, const KernelFn& k);

/// Lag-0 covariance operator.
LinOp sample_cov(const FSeries& xs);

}  // namespace fcpd
