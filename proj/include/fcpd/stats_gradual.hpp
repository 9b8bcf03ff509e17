#pragma once

#include <Eigen/Dense>

#include "fcpd/dgp.hpp"
#include "fcpd/fseries.hpp"
#include "fcpd/spectral.hpp"
#include "fcpd/stats_amoc.hpp"
#include "fcpd/weight.hpp"

namespace fcpd {

/// Weighted-sum process for gradual changes: row k-1 holds
/// n^(-1/2) * sum_{i=1..n} h((i-k)/n) * (X_i - mean), k = 1..n-1.
/// With the step weight this is the negated CUSUM process.
Eigen::MatrixXd weighted_sum_process(const FSeries& xs, const WeightFn& h);

TestReport t_ff_grad(const FSeries& xs, const WeightFn& h);
TestReport t_wf_grad(const FSeries& xs, const WeightFn& h, const Spectrum& lr);
TestReport t_pc_grad(const FSeries& xs, const WeightFn& h, const Spectrum& lr,
                     Eigen::Index d);

/// Signal functional at one offset t:
/// | int h(x-t) g(x) dx - int g dx * int h(x-t) dx |.
double detect_signal_at(const ChangeFn& g, const WeightFn& h, double t);

/// Supremum of detect_signal_at over a uniform t-grid in [0,1]; positive
/// values mean the change profile g is detectable with weight h.
double detectability_signal(const ChangeFn& g, const WeightFn& h, int tgrid);

}  // namespace fcpd
