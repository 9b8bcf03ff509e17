#pragma once

#include <Eigen/Dense>

#include "fcpd/covariance.hpp"
#include "fcpd/fseries.hpp"

namespace fcpd {

/// Eigenpairs of a self-adjoint LinOp, descending eigenvalues.
/// Eigenfunctions (columns of `funcs`) are orthonormal in the quadrature
/// inner product of `grid` and carry a deterministic sign: the entry of
/// largest absolute value is positive.
struct Spectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXd funcs;  // m x K, column p = eigenfunction p
  Grid grid;

  Eigen::Index count() const { return values.size(); }
  Curve eigenfunction(Eigen::Index p) const { return funcs.col(p); }
};

/// Truncation policy: keep a fixed count, or the smallest prefix holding at
/// least a `tau` share of the total eigenvalue mass.
struct Truncation {
  enum class Kind { count, energy };
  Kind kind;
  Eigen::Index d = 0;
  double tau = 1.0;

  static Truncation count(Eigen::Index d) {
    return {Kind::count, d, 1.0};
  }
  static Truncation energy(double tau) {
    return {Kind::energy, 0, tau};
  }
};

/// Solve the weighted symmetric eigenproblem so eigenfunctions are
/// orthonormal under the grid measure. Mildly negative eigenvalues (within
/// 1e-6 of the top eigenvalue) are clamped to zero; anything below that
/// raises degeneracy_error.
Spectrum eig(const LinOp& op);

/// Operator norm = largest eigenvalue.
double op_norm(const Spectrum& spec);

/// Apply (C + lambda1*Id)^(-1/2) via spectral calculus over all eigenpairs
/// present; components at zero eigenvalues get weight lambda1^(-1/2).
Curve ridge_inv_sqrt_apply(const Spectrum& spec, const Curve& f);

Spectrum truncate(const Spectrum& spec, const Truncation& policy);

/// True when eigenvalues d and d+1 coincide within 1e-6 relative, meaning a
/// d-dimensional projection would split an eigenspace.
bool eigen_gap_tied(const Spectrum& spec, Eigen::Index d);

}  // namespace fcpd
