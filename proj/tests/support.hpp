#pragma once

// Shared helpers for the unit and acceptance suites: random data, closed-form
// operator kernels for the synthetic noise models, the Kolmogorov distribution
// oracle, and plain-loop reference implementations of all six statistics that
// stay deliberately independent of the library's Eigen-based code paths.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "fcpd/covariance.hpp"
#include "fcpd/dgp.hpp"
#include "fcpd/fseries.hpp"
#include "fcpd/rng.hpp"
#include "fcpd/spectral.hpp"
#include "fcpd/weight.hpp"

namespace testsupport {

inline fcpd::FSeries random_series(Eigen::Index n, Eigen::Index m,
                                   std::uint64_t seed, double scale = 1.0) {
  fcpd::rng::NormalStream ns(seed, 0);
  Eigen::MatrixXd data(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) data(i, j) = scale * ns.next();
  }
  return fcpd::FSeries(std::move(data), fcpd::Grid::equispaced01(m));
}

inline fcpd::Curve random_curve(Eigen::Index m, std::uint64_t seed) {
  fcpd::rng::NormalStream ns(seed, 1);
  fcpd::Curve c(m);
  for (Eigen::Index j = 0; j < m; ++j) c[j] = ns.next();
  return c;
}

// Kernel of sum_p lambda_p e_p (x) e_p for given basis curves.
inline Eigen::MatrixXd basis_operator_kernel(const std::vector<fcpd::Curve>& basis,
                                             const std::vector<double>& lambdas) {
  const Eigen::Index m = basis.front().size();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t p = 0; p < lambdas.size(); ++p) {
    k += lambdas[p] * basis[p] * basis[p].transpose();
  }
  return k;
}

// True covariance operator of the KL noise (lag 0).
inline fcpd::LinOp true_cov_operator(const fcpd::NoiseSpec& spec,
                                     const fcpd::Grid& grid) {
  const auto basis = fcpd::fourier_basis(grid, spec.num_terms);
  auto lambdas = fcpd::kl_eigenvalues(spec);
  if (spec.kind == fcpd::NoiseSpec::Kind::far1) {
    const double psi = spec.far1_coeff;
    for (auto& l : lambdas) l /= 1.0 - psi * psi;
  }
  return fcpd::LinOp{basis_operator_kernel(basis, lambdas), grid};
}

// True long-run covariance operator: lambda_p / (1-psi)^2 per component.
inline fcpd::LinOp true_lr_operator(const fcpd::NoiseSpec& spec,
                                    const fcpd::Grid& grid) {
  const auto basis = fcpd::fourier_basis(grid, spec.num_terms);
  auto lambdas = fcpd::kl_eigenvalues(spec);
  if (spec.kind == fcpd::NoiseSpec::Kind::far1) {
    const double psi = spec.far1_coeff;
    for (auto& l : lambdas) l /= (1.0 - psi) * (1.0 - psi);
  }
  return fcpd::LinOp{basis_operator_kernel(basis, lambdas), grid};
}

// Operator norm of a possibly indefinite symmetric kernel in the weighted
// geometry; independent of fcpd::eig (no clamping, no sign fixing).
inline double sym_op_norm(const Eigen::MatrixXd& kernel, const fcpd::Grid& grid) {
  Eigen::VectorXd sq = grid.weights().array().sqrt();
  Eigen::MatrixXd b = sq.asDiagonal() * kernel * sq.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (b + b.transpose()));
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// P(sup |B| <= x) = 1 - 2 sum_{k>=1} (-1)^(k+1) exp(-2 k^2 x^2).
inline double kolmogorov_cdf(double x) {
  if (x <= 0.0) return 0.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-18) break;
  }
  return 1.0 - 2.0 * sum;
}

inline double kolmogorov_quantile(double p) {
  double lo = 0.1, hi = 5.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (kolmogorov_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double quantile_type7(std::vector<double> xs, double q) {
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= xs.size()) return xs.back();
  return xs[lo] + (pos - lo) * (xs[lo + 1] - xs[lo]);
}

// ---------------------------------------------------------------------------
// Brute-force reference statistics: plain std::vector loops over the defining
// sums. They share only the raw data, grid and spectrum with the library.
// ---------------------------------------------------------------------------

struct BruteSpectrum {
  std::vector<double> lambda;                // descending
  std::vector<std::vector<double>> funcs;    // funcs[p][j]
};

inline BruteSpectrum brute_spectrum(const fcpd::Spectrum& spec) {
  BruteSpectrum out;
  for (Eigen::Index p = 0; p < spec.count(); ++p) {
    out.lambda.push_back(spec.values[p]);
    std::vector<double> f(static_cast<std::size_t>(spec.funcs.rows()));
    for (Eigen::Index j = 0; j < spec.funcs.rows(); ++j) {
      f[static_cast<std::size_t>(j)] = spec.funcs(j, p);
    }
    out.funcs.push_back(std::move(f));
  }
  return out;
}

inline double brute_inner(const std::vector<double>& f, const std::vector<double>& g,
                          const fcpd::Grid& grid) {
  double acc = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) acc += grid.weights()[static_cast<Eigen::Index>(j)] * f[j] * g[j];
  return acc;
}

// Weight applied to index i for cut k: AMOC uses the indicator i <= k (the
// CUSUM sum), gradual uses h((i-k)/n) over all i.
struct BruteStat {
  double value = 0.0;  // squared for PC, unsquared for FF/WF
  int khat = 0;
};

enum class BruteKind { ff, wf, pc };

// FF resums centered curves per cut and takes the quadrature norm; WF and PC
// go through per-observation scores and the spectral-form sums, so every
// route differs from the library's prefix-sum / operator-application path.
inline BruteStat brute_statistic(const fcpd::FSeries& xs, BruteKind kind,
                                 const BruteSpectrum& sp, int d,
                                 const fcpd::WeightFn* h) {
  const auto n = static_cast<std::size_t>(xs.n());
  const auto m = static_cast<std::size_t>(xs.m());
  const fcpd::Grid& grid = xs.grid();
  std::vector<std::vector<double>> rows(n, std::vector<double>(m));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      rows[i][j] = xs.data()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  std::vector<double> mean(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) mean[j] += rows[i][j];
    mean[j] /= static_cast<double>(n);
  }
  const auto cut_weight = [&](std::size_t i, std::size_t k) {
    if (h != nullptr) {
      const double x = (static_cast<double>(i) - static_cast<double>(k)) /
                       static_cast<double>(n);
      return fcpd::weight_eval(*h, x);
    }
    return i <= k ? 1.0 : 0.0;
  };

  const std::size_t np = kind == BruteKind::pc ? static_cast<std::size_t>(d)
                                               : sp.lambda.size();
  std::vector<std::vector<double>> scores;  // scores[i][p]
  std::vector<double> score_mean;
  if (kind != BruteKind::ff) {
    scores.assign(n, std::vector<double>(np, 0.0));
    score_mean.assign(np, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t p = 0; p < np; ++p) {
        scores[i][p] = brute_inner(rows[i], sp.funcs[p], grid);
        score_mean[p] += scores[i][p];
      }
    }
    for (double& v : score_mean) v /= static_cast<double>(n);
  }

  BruteStat best;
  for (std::size_t k = 1; k < n; ++k) {
    double value = 0.0;
    if (kind == BruteKind::ff) {
      std::vector<double> s(m, 0.0);
      for (std::size_t i = 1; i <= n; ++i) {
        const double w = cut_weight(i, k);
        if (w == 0.0) continue;
        for (std::size_t j = 0; j < m; ++j) s[j] += w * (rows[i - 1][j] - mean[j]);
      }
      value = std::sqrt(brute_inner(s, s, grid) / static_cast<double>(n));
    } else {
      const double lam1 = sp.lambda.front();
      double acc = 0.0;
      for (std::size_t p = 0; p < np; ++p) {
        double sum = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
          const double w = cut_weight(i, k);
          if (w != 0.0) sum += w * (scores[i - 1][p] - score_mean[p]);
        }
        const double coef = kind == BruteKind::wf ? 1.0 / (sp.lambda[p] + lam1)
                                                  : 1.0 / sp.lambda[p];
        acc += coef * sum * sum / static_cast<double>(n);
      }
      value = kind == BruteKind::wf ? std::sqrt(acc) : acc;
    }
    if (value > best.value) {
      best.value = value;
      best.khat = static_cast<int>(k);
    }
  }
  if (best.khat == 0) best.khat = 1;
  return best;
}

}  // namespace testsupport
