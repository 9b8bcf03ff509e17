#pragma once

#include <string>
#include <vector>

namespace fcpd {

/// Weight h:[-1,1] -> R for gradual-change statistics, with h(x) = 0 for
/// x <= 0. Carries its total variation and a Hoelder bound (exponent,
/// constant) on [0,1].
///
/// The step weight h(x) = 1[x>0] is the bridge back to the AMOC statistics.
/// It fails the Hoelder condition of the gradual theory and is provided for
/// that algebraic reduction only.
struct WeightFn {
  enum class Kind { power_plus, step, tabulated };

  Kind kind = Kind::power_plus;
  double alpha = 1.0;  // exponent for power_plus
  std::vector<double> knots_x;  // tabulated: strictly increasing in (0,1]
  std::vector<double> knots_y;

  double holder_alpha = 1.0;
  double holder_beta = 1.0;
  double tv = 1.0;

  static WeightFn power(double alpha);
  static WeightFn step();
  static WeightFn tabulated(std::vector<double> xs, std::vector<double> ys);

  /// Parse "power:<alpha>" or "step" (CLI syntax).
  static WeightFn parse(const std::string& text);
  std::string describe() const;
};

/// h(x) for x in [-1,1]; out-of-domain arguments are rejected.
double weight_eval(const WeightFn& h, double x);

}  // namespace fcpd
