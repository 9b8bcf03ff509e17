#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "fcpd/fseries.hpp"
#include "fcpd/weight.hpp"

namespace fcpd {

/// Synthetic noise model: Karhunen-Loeve Gaussian noise on a Fourier basis,
/// either i.i.d. or passed through a first-order functional autoregression
/// whose operator is diagonal in the same basis (so the long-run covariance
/// has the closed form lambda_p / (1 - psi)^2 per component).
struct NoiseSpec {
  enum class Kind { iid_kl, far1 };
  enum class Decay { polynomial, exponential };

  Kind kind = Kind::iid_kl;
  Decay decay = Decay::polynomial;
  double kappa = 2.0;      // lambda_p = p^(-kappa)
  double rho = 0.5;        // lambda_p = rho^p
  int num_terms = 21;
  double far1_coeff = 0.0; // operator norm of the AR operator, in [0,1)
};

/// Time profile g of the mean change; evaluated at i/n and scaled by a
/// fixed curve delta.
struct ChangeFn {
  enum class Kind { amoc, epidemic, multiple, delayed_gradual, clc };

  Kind kind = Kind::amoc;
  double theta1 = 0.5;  // amoc/delayed_gradual onset, or left edge
  double theta2 = 0.0;  // right edge for epidemic/clc
  std::vector<double> thetas;     // multiple: change locations
  std::vector<double> jump_sizes; // multiple: segment levels, summing to 1
  WeightFn h;                     // delayed_gradual shape

  static ChangeFn amoc(double theta);
  static ChangeFn epidemic(double theta1, double theta2);
  static ChangeFn multiple(std::vector<double> thetas, std::vector<double> jump_sizes);
  static ChangeFn delayed_gradual(double theta, WeightFn h);
  static ChangeFn clc(double theta1, double theta2);
};

/// KL eigenvalues lambda_1..lambda_P for a noise spec.
std::vector<double> kl_eigenvalues(const NoiseSpec& spec);

/// {1, sqrt(2)cos(2 pi t), sqrt(2)sin(2 pi t), sqrt(2)cos(4 pi t), ...}
/// truncated to P curves; orthonormal on [0,1] up to quadrature error.
std::vector<Curve> fourier_basis(const Grid& grid, int P);

/// n noise curves; deterministic in (spec, seed). FAR(1) burns in 200 steps
/// from zero, and with far1_coeff = 0 reproduces iid_kl bit for bit.
FSeries gen_noise(const NoiseSpec& spec, Eigen::Index n, const Grid& grid,
                  std::uint64_t seed);

double change_eval(const ChangeFn& g, double x);

/// Row i of the result is noise_i + scale * g(i/n) * delta (1-based i).
FSeries inject(const FSeries& noise, const Curve& delta, const ChangeFn& g,
               double scale);

/// G0(theta) = integral_0^theta g - theta * integral_0^1 g, by dense
/// composite trapezoid quadrature.
double g0_functional(const ChangeFn& g, double theta);

}  // namespace fcpd
