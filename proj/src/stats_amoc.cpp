#include "fcpd/stats_amoc.hpp"

#include <cmath>
#include <stdexcept>

#include "fcpd/errors.hpp"

namespace fcpd {

const char* method_name(Method m) {
  switch (m) {
    case Method::PC: return "pc";
    case Method::FF: return "ff";
    case Method::WF: return "wf";
  }
  return "?";
}

Method method_by_name(const std::string& name) {
  if (name == "pc") return Method::PC;
  if (name == "ff") return Method::FF;
  if (name == "wf") return Method::WF;
  throw std::invalid_argument("unknown method: " + name);
}

namespace {

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

Eigen::MatrixXd cusum_process(const FSeries& xs) {
  const Eigen::Index n = xs.n();
  const Eigen::Index m = xs.m();
  // Fixed-point centering makes constant series give exact zeros.
  const Eigen::MatrixXd y = center(xs).data();
  const double root = std::sqrt(static_cast<double>(n));
  Eigen::MatrixXd out(n - 1, m);
  Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(m);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    acc += y.row(k);
    out.row(k) = acc / root;
  }
  return out;
}

TestReport t_ff(const FSeries& xs) {
  const Eigen::MatrixXd cus = cusum_process(xs);
  const Eigen::VectorXd w = xs.grid().weights();
  Eigen::VectorXd norms(cus.rows());
  for (Eigen::Index k = 0; k < cus.rows(); ++k) {
    const double sq = (cus.row(k).array().square() * w.transpose().array()).sum();
    norms[k] = sq > 0.0 ? std::sqrt(sq) : 0.0;
  }
  return max_report(norms, xs.n(), Method::FF);
}

TestReport t_wf(const FSeries& xs, const Spectrum& lr) {
  if (!lr.grid.same_as(xs.grid())) {
    throw std::invalid_argument("t_wf: spectrum grid does not match data grid");
  }
  const Eigen::MatrixXd cus = cusum_process(xs);
  Eigen::VectorXd norms(cus.rows());
  for (Eigen::Index k = 0; k < cus.rows(); ++k) {
    const Curve whitened = ridge_inv_sqrt_apply(lr, cus.row(k).transpose());
    norms[k] = norm(whitened, xs.grid());
  }
  return max_report(norms, xs.n(), Method::WF);
}

TestReport t_pc(const FSeries& xs, const Spectrum& lr, Eigen::Index d) {
  if (!lr.grid.same_as(xs.grid())) {
    throw std::invalid_argument("t_pc: spectrum grid does not match data grid");
  }
  if (d < 1 || d > lr.count()) {
    throw std::invalid_argument("t_pc: component count out of range");
  }
  if (!(lr.values[d - 1] > 0.0)) {
    throw degeneracy_error("t_pc: eigenvalue at requested dimension is zero");
  }
  const Eigen::Index n = xs.n();
  Eigen::MatrixXd scores =
      center(xs).data() * xs.grid().weights().asDiagonal() * lr.funcs.leftCols(d);

  const Eigen::VectorXd inv_lambda =
      lr.values.head(d).array().inverse().matrix();
  Eigen::VectorXd stat(n - 1);
  Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(d);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    acc += scores.row(k);
    stat[k] = (acc.array().square().matrix() * inv_lambda).value() /
              static_cast<double>(n);
  }
  TestReport rep = max_report(stat, n, Method::PC);
  rep.d_used = d;
  rep.eigen_tie_warning = eigen_gap_tied(lr, d);
  return rep;
}

}  // namespace fcpd
