#include "fcpd/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "fcpd/errors.hpp"

namespace fcpd {

Spectrum eig(const LinOp& op) {
  const Eigen::Index m = op.kernel.rows();
  if (op.kernel.cols() != m || m != op.grid.size()) {
    throw std::invalid_argument("eig: kernel must be m x m on the grid");
  }
  const double scale = std::max(1.0, op.kernel.cwiseAbs().maxCoeff());
  const double asym = (op.kernel - op.kernel.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * scale) {
    throw std::invalid_argument("eig: operator is not self-adjoint within tolerance");
  }
  const Eigen::MatrixXd sym = 0.5 * (op.kernel + op.kernel.transpose());

  // D^(1/2) K D^(1/2) is symmetric; its eigenvectors u map back to curves
  // v = D^(-1/2) u that are orthonormal in the quadrature inner product.
  const Eigen::VectorXd w = op.grid.weights();
  Eigen::VectorXd sq(m), invsq(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    sq[j] = std::sqrt(w[j]);
    invsq[j] = w[j] > 0.0 ? 1.0 / sq[j] : 0.0;
  }
  Eigen::MatrixXd b = sq.asDiagonal() * sym * sq.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b);
  if (solver.info() != Eigen::Success) {
    throw degeneracy_error("eig: eigensolver failed to converge");
  }

  // Eigen returns ascending order; re-sort descending, stable in the
  // solver's index so exact ties keep a reproducible order.
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(m));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index c) {
    return solver.eigenvalues()[a] > solver.eigenvalues()[c];
  });

  Eigen::VectorXd values(m);
  Eigen::MatrixXd funcs(m, m);
  for (Eigen::Index p = 0; p < m; ++p) {
    values[p] = solver.eigenvalues()[idx[static_cast<std::size_t>(p)]];
    funcs.col(p) =
        invsq.asDiagonal() * solver.eigenvectors().col(idx[static_cast<std::size_t>(p)]);
  }

  const double lam_max = std::max(values[0], 0.0);
  const double abs_max = values.cwiseAbs().maxCoeff();
  const double zero_tol =
      64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, abs_max);
  const double clamp_tol = 1e-6 * lam_max + zero_tol;
  for (Eigen::Index p = 0; p < m; ++p) {
    if (values[p] < -clamp_tol) {
      throw degeneracy_error("eig: eigenvalue far below zero; operator is not covariance-like");
    }
    // Mild negatives and rank-deficiency noise both flush to exact zero.
    if (values[p] < zero_tol) values[p] = 0.0;
  }

  for (Eigen::Index p = 0; p < m; ++p) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      const double a = std::abs(funcs(j, p));
      if (a > best) {
        best = a;
        arg = j;
      }
    }
    if (funcs(arg, p) < 0.0) funcs.col(p) = -funcs.col(p);
  }

  return Spectrum{std::move(values), std::move(funcs), op.grid};
}

double op_norm(const Spectrum& spec) {
  if (spec.count() == 0) throw std::invalid_argument("op_norm: empty spectrum");
  return spec.values[0];
}

Curve ridge_inv_sqrt_apply(const Spectrum& spec, const Curve& f) {
  if (spec.count() == 0) throw std::invalid_argument("ridge_inv_sqrt_apply: empty spectrum");
  if (f.size() != spec.grid.size()) {
    throw std::invalid_argument("ridge_inv_sqrt_apply: curve length does not match grid");
  }
  const double lam1 = spec.values[0];
  if (!(lam1 > 0.0)) {
    throw degeneracy_error("ridge_inv_sqrt_apply: top eigenvalue is zero");
  }
  const Eigen::VectorXd scores =
      spec.funcs.transpose() * (spec.grid.weights().asDiagonal() * f);
  const Eigen::VectorXd scaled =
      scores.array() / (spec.values.array() + lam1).sqrt();
  return spec.funcs * scaled;
}

Spectrum truncate(const Spectrum& spec, const Truncation& policy) {
  const Eigen::Index k = spec.count();
  Eigen::Index keep = 1;
  if (policy.kind == Truncation::Kind::count) {
    if (policy.d < 1 || policy.d > k) {
      throw std::invalid_argument("truncate: component count out of range");
    }
    keep = policy.d;
  } else {
    if (!(policy.tau > 0.0) || policy.tau > 1.0) {
      throw std::invalid_argument("truncate: energy share must be in (0,1]");
    }
    const double total = spec.values.sum();
    if (total > 0.0) {
      const double target = policy.tau * total * (1.0 - 1e-12);
      double cum = 0.0;
      for (keep = 0; keep < k;) {
        cum += spec.values[keep];
        ++keep;
        if (cum >= target) break;
      }
    }
    keep = std::max<Eigen::Index>(keep, 1);
  }
  return Spectrum{spec.values.head(keep), spec.funcs.leftCols(keep), spec.grid};
}

bool eigen_gap_tied(const Spectrum& spec, Eigen::Index d) {
  if (d < 1 || d >= spec.count()) return false;
  const double lead = spec.values[d - 1];
  const double next = spec.values[d];
  if (lead <= 0.0) return true;
  return (lead - next) <= 1e-6 * lead;
}

}  // namespace fcpd
