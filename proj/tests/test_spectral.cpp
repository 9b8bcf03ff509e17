#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fcpd/covariance.hpp"
#include "fcpd/dgp.hpp"
#include "fcpd/errors.hpp"
#include "fcpd/spectral.hpp"
#include "support.hpp"

using namespace fcpd;
using Catch::Approx;

namespace {

LinOp random_psd_op(const Grid& g, std::uint64_t seed) {
  const auto xs = testsupport::random_series(12, g.size(), seed);
  return lrcov(xs, KernelFn::bartlett(), Bandwidth{2.0});
}

}  // namespace

TEST_CASE("eig of a rank one operator") {
  const Grid g = Grid::equispaced01(21);
  const Curve c = testsupport::random_curve(21, 11);
  const double c_norm_sq = inner(c, c, g);
  const LinOp op{c * c.transpose(), g};
  const Spectrum sp = eig(op);

  REQUIRE(sp.values[0] == Approx(c_norm_sq).margin(1e-10));
  for (Eigen::Index p = 1; p < sp.count(); ++p) {
    REQUIRE(sp.values[p] == Approx(0.0).margin(1e-10));
  }
  // v1 = +- c/||c||; compare up to the deterministic sign.
  Curve v1 = sp.eigenfunction(0);
  const double align = inner(v1, c, g);
  const Curve want = c / std::sqrt(c_norm_sq);
  REQUIRE((v1 * (align < 0 ? -1.0 : 1.0) - want).cwiseAbs().maxCoeff() < 1e-8);
  REQUIRE(op_norm(sp) == sp.values[0]);
}

TEST_CASE("eig of the zero operator") {
  const Grid g = Grid::equispaced01(7);
  const Spectrum sp = eig(LinOp{Eigen::MatrixXd::Zero(7, 7), g});
  REQUIRE(sp.values.cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(op_norm(sp) == 0.0);
}

TEST_CASE("eig recovers a constructed spectrum") {
  const Grid g = Grid::equispaced01(33);
  const auto basis = fourier_basis(g, 3);
  const std::vector<double> lambdas{1.0, 0.5, 1.0 / 3.0};
  const LinOp op{testsupport::basis_operator_kernel(basis, lambdas), g};
  const Spectrum sp = eig(op);
  REQUIRE(sp.values[0] == Approx(1.0).margin(1e-8));
  REQUIRE(sp.values[1] == Approx(0.5).margin(1e-8));
  REQUIRE(sp.values[2] == Approx(1.0 / 3.0).margin(1e-8));
  REQUIRE(sp.values[3] == Approx(0.0).margin(1e-8));
}

TEST_CASE("eigenfunctions are orthonormal; the kernel reconstructs") {
  const Grid g = Grid::equispaced01(15);
  const LinOp op = random_psd_op(g, 21);
  const Spectrum sp = eig(op);
  for (Eigen::Index p = 0; p < sp.count(); ++p) {
    for (Eigen::Index q = p; q < sp.count(); ++q) {
      const double want = p == q ? 1.0 : 0.0;
      REQUIRE(inner(sp.eigenfunction(p), sp.eigenfunction(q), g) ==
              Approx(want).margin(1e-8));
    }
  }
  Eigen::MatrixXd rebuilt = Eigen::MatrixXd::Zero(15, 15);
  for (Eigen::Index p = 0; p < sp.count(); ++p) {
    rebuilt += sp.values[p] * sp.eigenfunction(p) * sp.eigenfunction(p).transpose();
  }
  const Eigen::MatrixXd sym = 0.5 * (op.kernel + op.kernel.transpose());
  REQUIRE((rebuilt - sym).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("eig rejects asymmetric kernels and enforces the sign convention") {
  const Grid g = Grid::equispaced01(6);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(6, 6);
  bad(0, 5) = 1.0;  // grossly asymmetric
  REQUIRE_THROWS_AS(eig(LinOp{bad, g}), std::invalid_argument);

  const LinOp op = random_psd_op(g, 5);
  const Spectrum sp = eig(op);
  for (Eigen::Index p = 0; p < sp.count(); ++p) {
    const Curve v = sp.eigenfunction(p);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    REQUIRE(v[arg] > 0.0);
  }
}

TEST_CASE("eig rejects strongly negative operators") {
  const Grid g = Grid::equispaced01(9);
  const Curve c = testsupport::random_curve(9, 3);
  Eigen::MatrixXd k = Curve::Ones(9) * Curve::Ones(9).transpose() - c * c.transpose();
  REQUIRE_THROWS_AS(eig(LinOp{k, g}), degeneracy_error);
}

TEST_CASE("scaling the operator scales eigenvalues and keeps the spans") {
  const Grid g = Grid::equispaced01(13);
  const LinOp op = random_psd_op(g, 33);
  const Spectrum sp = eig(op);
  const Spectrum sp2 = eig(LinOp{3.5 * op.kernel, g});
  for (Eigen::Index p = 0; p < sp.count(); ++p) {
    REQUIRE(sp2.values[p] == Approx(3.5 * sp.values[p]).margin(1e-10));
  }
  // Leading 3-dim eigenprojector in the weighted geometry.
  const auto projector = [&](const Spectrum& s) {
    return (s.funcs.leftCols(3) * s.funcs.leftCols(3).transpose() *
            Eigen::MatrixXd(g.weights().asDiagonal()))
        .eval();
  };
  REQUIRE((projector(sp) - projector(sp2)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("ridge inverse square root") {
  const Grid g = Grid::equispaced01(25);
  const LinOp op = random_psd_op(g, 44);
  const Spectrum sp = eig(op);
  const double lam1 = sp.values[0];
  REQUIRE(lam1 > 0.0);

  // Eigenfunction relation at p = 1.
  const Curve r1 = ridge_inv_sqrt_apply(sp, sp.eigenfunction(0));
  REQUIRE((r1 - sp.eigenfunction(0) / std::sqrt(2.0 * lam1)).cwiseAbs().maxCoeff() < 1e-10);

  // Zero-eigenvalue components get weight lam1^(-1/2).
  Eigen::Index zero_p = sp.count() - 1;
  REQUIRE(sp.values[zero_p] == 0.0);
  const Curve rz = ridge_inv_sqrt_apply(sp, sp.eigenfunction(zero_p));
  REQUIRE((rz - sp.eigenfunction(zero_p) / std::sqrt(lam1)).cwiseAbs().maxCoeff() < 1e-8);

  for (std::uint64_t s = 0; s < 10; ++s) {
    const Curve f = testsupport::random_curve(25, 600 + s);
    // Operator-norm bound.
    REQUIRE(norm(ridge_inv_sqrt_apply(sp, f), g) <=
            norm(f, g) / std::sqrt(lam1) + 1e-12);
    // Applying twice equals the (lambda_p + lambda_1)^(-1) weights.
    const Curve twice = ridge_inv_sqrt_apply(sp, ridge_inv_sqrt_apply(sp, f));
    Curve direct = Curve::Zero(25);
    for (Eigen::Index p = 0; p < sp.count(); ++p) {
      direct += inner(f, sp.eigenfunction(p), g) / (sp.values[p] + lam1) *
                sp.eigenfunction(p);
    }
    REQUIRE((twice - direct).cwiseAbs().maxCoeff() < 1e-8);
  }

  const Spectrum zero = eig(LinOp{Eigen::MatrixXd::Zero(25, 25), g});
  REQUIRE_THROWS_AS(ridge_inv_sqrt_apply(zero, Curve::Ones(25)), degeneracy_error);
}

TEST_CASE("Parseval on the full eigenbasis of a random operator") {
  const Grid g = Grid::equispaced01(19);
  const Spectrum sp = eig(random_psd_op(g, 55));
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Curve f = testsupport::random_curve(19, 700 + s);
    double sum = 0.0;
    for (Eigen::Index p = 0; p < sp.count(); ++p) {
      const double score = inner(f, sp.eigenfunction(p), g);
      sum += score * score;
    }
    REQUIRE(sum == Approx(inner(f, f, g)).margin(1e-8));
  }
}

TEST_CASE("truncate by count and by energy") {
  const Grid g = Grid::equispaced01(33);
  const auto basis = fourier_basis(g, 3);
  const std::vector<double> lambdas{1.0, 0.5, 1.0 / 3.0};
  const Spectrum sp = eig(LinOp{testsupport::basis_operator_kernel(basis, lambdas), g});

  REQUIRE(truncate(sp, Truncation::count(1)).count() == 1);
  REQUIRE(truncate(sp, Truncation::count(1)).values[0] == Approx(1.0).margin(1e-8));
  // total 11/6; 1/(11/6) = 0.545 < 0.6 <= (3/2)/(11/6) = 0.818 keeps two.
  REQUIRE(truncate(sp, Truncation::energy(0.6)).count() == 2);

  // On a full-rank spectrum, tau = 1 keeps everything.
  const Spectrum full = eig(lrcov(testsupport::random_series(60, 9, 123),
                                  KernelFn::bartlett(), Bandwidth{3.0}));
  REQUIRE(full.values.minCoeff() > 0.0);
  REQUIRE(truncate(full, Truncation::energy(1.0)).count() == full.count());
  REQUIRE(truncate(sp, Truncation::energy(1e-9)).count() == 1);
  REQUIRE_THROWS_AS(truncate(sp, Truncation::count(0)), std::invalid_argument);
  REQUIRE_THROWS_AS(truncate(sp, Truncation::energy(1.5)), std::invalid_argument);

  REQUIRE(eigen_gap_tied(sp, 1) == false);
  const std::vector<double> tied{1.0, 1.0, 0.5};
  const Spectrum sp_tied = eig(LinOp{testsupport::basis_operator_kernel(basis, tied), g});
  REQUIRE(eigen_gap_tied(sp_tied, 1) == true);
  REQUIRE(eigen_gap_tied(sp_tied, 2) == false);
}
