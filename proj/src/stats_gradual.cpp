#include "fcpd/stats_gradual.hpp"

#include <cmath>
#include <stdexcept>

#include "fcpd/errors.hpp"

namespace fcpd {

namespace {

// h evaluated at j/n for j = 1..n-1; arguments <= 0 never contribute.
Eigen::VectorXd weight_table(const WeightFn& h, Eigen::Index n) {
  Eigen::VectorXd vals(n - 1);
  for (Eigen::Index j = 1; j < n; ++j) {
    vals[j - 1] = weight_eval(h, static_cast<double>(j) / static_cast<double>(n));
  }
  return vals;
}

TestReport max_report(const Eigen::VectorXd& values, Eigen::Index n, Method method) {
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < values.size(); ++k) {
    if (values[k] > values[best]) best = k;
  }
  TestReport rep;
  rep.statistic = values[best];
  rep.khat = best + 1;
  rep.theta_hat = static_cast<double>(rep.khat) / static_cast<double>(n);
  rep.method = method;
  return rep;
}

}  // namespace

Eigen::MatrixXd weighted_sum_process(const FSeries& xs, const WeightFn& h) {
  const Eigen::Index n = xs.n();
  const Eigen::Index m = xs.m();
  const Eigen::MatrixXd y = center(xs).data();
  const Eigen::VectorXd hv = weight_table(h, n);
  const double root = std::sqrt(static_cast<double>(n));
  Eigen::MatrixXd out(n - 1, m);
  for (Eigen::Index k = 1; k < n; ++k) {
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(m);
    for (Eigen::Index i = k + 1; i <= n; ++i) {
      acc += hv[i - k - 1] * y.row(i - 1);
    }
    out.row(k - 1) = acc / root;
  }
  return out;
}

TestReport t_ff_grad(const FSeries& xs, const WeightFn& h) {
  const Eigen::MatrixXd ws = weighted_sum_process(xs, h);
  const Eigen::VectorXd w = xs.grid().weights();
  Eigen::VectorXd norms(ws.rows());
  for (Eigen::Index k = 0; k < ws.rows(); ++k) {
    const double sq = (ws.row(k).array().square() * w.transpose().array()).sum();
    norms[k] = sq > 0.0 ? std::sqrt(sq) : 0.0;
  }
  return max_report(norms, xs.n(), Method::FF);
}

TestReport t_wf_grad(const FSeries& xs, const WeightFn& h, const Spectrum& lr) {
  if (!lr.grid.same_as(xs.grid())) {
    throw std::invalid_argument("t_wf_grad: spectrum grid does not match data grid");
  }
  const Eigen::MatrixXd ws = weighted_sum_process(xs, h);
  Eigen::VectorXd norms(ws.rows());
  for (Eigen::Index k = 0; k < ws.rows(); ++k) {
    const Curve whitened = ridge_inv_sqrt_apply(lr, ws.row(k).transpose());
    norms[k] = norm(whitened, xs.grid());
  }
  return max_report(norms, xs.n(), Method::WF);
}

TestReport t_pc_grad(const FSeries& xs, const WeightFn& h, const Spectrum& lr,
                     Eigen::Index d) {
  if (!lr.grid.same_as(xs.grid())) {
    throw std::invalid_argument("t_pc_grad: spectrum grid does not match data grid");
  }
  if (d < 1 || d > lr.count()) {
    throw std::invalid_argument("t_pc_grad: component count out of range");
  }
  if (!(lr.values[d - 1] > 0.0)) {
    throw degeneracy_error("t_pc_grad: eigenvalue at requested dimension is zero");
  }
  const Eigen::Index n = xs.n();
  const Eigen::MatrixXd scores =
      center(xs).data() * xs.grid().weights().asDiagonal() * lr.funcs.leftCols(d);
  const Eigen::VectorXd hv = weight_table(h, n);

  const Eigen::VectorXd inv_lambda =
      lr.values.head(d).array().inverse().matrix();
  Eigen::VectorXd stat(n - 1);
  for (Eigen::Index k = 1; k < n; ++k) {
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(d);
    for (Eigen::Index i = k + 1; i <= n; ++i) {
      acc += hv[i - k - 1] * scores.row(i - 1);
    }
    stat[k - 1] =
        (acc.array().square().matrix() * inv_lambda).value() / static_cast<double>(n);
  }
  TestReport rep = max_report(stat, n, Method::PC);
  rep.d_used = d;
  rep.eigen_tie_warning = eigen_gap_tied(lr, d);
  return rep;
}

namespace {

constexpr int kSignalQuadPoints = 400001;

// Composite trapezoid of f over [a,b].
template <typename F>
double trap(F&& f, double a, double b) {
  if (!(b > a)) return 0.0;
  const double step = (b - a) / (kSignalQuadPoints - 1);
  double acc = 0.5 * (f(a) + f(b));
  for (int j = 1; j + 1 < kSignalQuadPoints; ++j) acc += f(a + j * step);
  return acc * step;
}

}  // namespace

double detect_signal_at(const ChangeFn& g, const WeightFn& h, double t) {
  if (t < 0.0 || t > 1.0) {
    throw std::invalid_argument("detect_signal_at: t outside [0,1]");
  }
  const double hg = trap(
      [&](double x) { return weight_eval(h, x - t) * change_eval(g, x); }, 0.0, 1.0);
  const double gi = trap([&](double x) { return change_eval(g, x); }, 0.0, 1.0);
  const double hi = trap([&](double x) { return weight_eval(h, x - t); }, 0.0, 1.0);
  return std::abs(hg - gi * hi);
}

double detectability_signal(const ChangeFn& g, const WeightFn& h, int tgrid) {
  if (tgrid < 2) throw std::invalid_argument("detectability_signal: need tgrid >= 2");
  double best = 0.0;
  for (int j = 0; j < tgrid; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(tgrid - 1);
    best = std::max(best, detect_signal_at(g, h, t));
  }
  return best;
}

}  // namespace fcpd
