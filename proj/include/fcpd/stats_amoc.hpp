#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "fcpd/fseries.hpp"
#include "fcpd/spectral.hpp"

namespace fcpd {

enum class Method { PC, FF, WF };

const char* method_name(Method m);
Method method_by_name(const std::string& name);

/// Outcome of one test. `statistic` is the squared statistic for PC and the
/// unsquared statistic for FF/WF, matching how each is defined; khat is the
/// smallest maximizing index in [1, n-1].
struct TestReport {
  double statistic = 0.0;
  Eigen::Index khat = 1;
  double theta_hat = 0.0;
  Method method = Method::FF;
  std::optional<Eigen::Index> d_used;
  std::optional<double> pvalue;
  std::optional<double> critical_value;
  std::optional<double> alpha;
  bool eigen_tie_warning = false;
};

/// Centered partial-sum process: row k-1 holds
/// n^(-1/2) * sum_{i<=k} (X_i - mean), k = 1..n-1.
Eigen::MatrixXd cusum_process(const FSeries& xs);

/// Fully functional statistic: max_k of the CUSUM curve norms.
TestReport t_ff(const FSeries& xs);

/// Weighted functional statistic: max_k of the ridge-whitened CUSUM norms,
/// using the full spectrum `lr` of the long-run covariance estimate.
TestReport t_wf(const FSeries& xs, const Spectrum& lr);

/// Dimension-reduced statistic on the leading d eigenfunctions of `lr` with
/// diagonal 1/lambda_p weights; reports the squared statistic.
TestReport t_pc(const FSeries& xs, const Spectrum& lr, Eigen::Index d);

}  // namespace fcpd
