#include "fcpd/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fcpd {

Curve LinOp::apply(const Curve& f) const {
  if (f.size() != grid.size()) {
    throw std::invalid_argument("LinOp::apply: curve length does not match grid");
  }
  return kernel * grid.weights().asDiagonal() * f;
}

double KernelFn::operator()(double x) const {
  const double a = std::abs(x);
  switch (id) {
    case KernelId::bartlett:
      return a >= 1.0 ? 0.0 : 1.0 - a;
    case KernelId::parzen:
      if (a <= 0.5) return 1.0 - 6.0 * a * a + 6.0 * a * a * a;
      if (a <= 1.0) {
        const double b = 1.0 - a;
        return 2.0 * b * b * b;
      }
      return 0.0;
    case KernelId::flattop:
      if (a <= 0.5) return 1.0;
      if (a <= 1.0) return 2.0 * (1.0 - a);
      return 0.0;
  }
  return 0.0;
}

KernelFn KernelFn::bartlett() { return {KernelId::bartlett, 1.0, 1.0}; }
KernelFn KernelFn::parzen() { return {KernelId::parzen, 2.0, 1.0}; }
KernelFn KernelFn::flattop() {
  return {KernelId::flattop, std::numeric_limits<double>::infinity(), 1.0};
}

KernelFn KernelFn::by_name(const std::string& name) {
  if (name == "bartlett") return bartlett();
  if (name == "parzen") return parzen();
  if (name == "flattop") return flattop();
  throw std::invalid_argument("unknown kernel: " + name);
}

const char* KernelFn::name() const {
  switch (id) {
    case KernelId::bartlett: return "bartlett";
    case KernelId::parzen: return "parzen";
    case KernelId::flattop: return "flattop";
  }
  return "?";
}

LinOp lag_cov(const FSeries& xs, long r) {
  const Eigen::Index n = xs.n();
  const Eigen::Index m = xs.m();
  const long lag = std::abs(r);
  if (lag >= n) {
    return LinOp{Eigen::MatrixXd::Zero(m, m), xs.grid()};
  }
  Eigen::MatrixXd y = xs.data();
  y.rowwise() -= mean_curve(xs).transpose();
  const Eigen::Index cnt = n - lag;
  // kernel(s,t) = (1/n) sum_i Y_{i+lag}(s) Y_i(t); negative lags are adjoints.
  Eigen::MatrixXd k = (y.bottomRows(cnt).transpose() * y.topRows(cnt)) /
                      static_cast<double>(n);
  if (r < 0) k.transposeInPlace();
  return LinOp{std::move(k), xs.grid()};
}

LinOp lrcov(const FSeries& xs, const KernelFn& k, Bandwidth h) {
  if (!(h.value > 0.0)) {
    throw std::invalid_argument("lrcov: bandwidth must be positive");
  }
  const Eigen::Index n = xs.n();
  const Eigen::Index m = xs.m();
  Eigen::MatrixXd y = xs.data();
  y.rowwise() -= mean_curve(xs).transpose();

  const long max_lag = std::min<long>(
      n - 1, static_cast<long>(std::ceil(k.support * h.value)));
  Eigen::MatrixXd acc = (y.transpose() * y) / static_cast<double>(n);
  for (long r = 1; r <= max_lag; ++r) {
    const double w = k(static_cast<double>(r) / h.value);
    if (w == 0.0) continue;
    const Eigen::Index cnt = n - r;
    Eigen::MatrixXd cr = (y.bottomRows(cnt).transpose() * y.topRows(cnt)) /
                         static_cast<double>(n);
    acc.noalias() += w * cr;
    acc.noalias() += w * cr.transpose();
  }
  Eigen::MatrixXd sym = 0.5 * (acc + acc.transpose());
  return LinOp{std::move(sym), xs.grid()};
}

Bandwidth default_bandwidth(Eigen::Index n, const KernelFn& k) {
  if (n < 2) throw std::invalid_argument("default_bandwidth: need n >= 2");
  double h;
  if (std::isinf(k.order)) {
    h = 1.0;
  } else {
    h = std::pow(static_cast<double>(n), 1.0 / (2.0 * k.order + 1.0));
  }
  h = std::clamp(h, 1.0, static_cast<double>(n));
  return Bandwidth{h};
}

LinOp sample_cov(const FSeries& xs) { return lag_cov(xs, 0); }

}  // namespace fcpd
