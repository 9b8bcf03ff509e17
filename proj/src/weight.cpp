#include "fcpd/weight.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fcpd {

WeightFn WeightFn::power(double alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("WeightFn::power: alpha must be positive");
  }
  WeightFn h;
  h.kind = Kind::power_plus;
  h.alpha = alpha;
  // x^alpha is Lipschitz on [0,1] for alpha >= 1, alpha-Hoelder otherwise;
  // monotone 0 -> 1, so TV over [-1,1] is 1.
  h.holder_alpha = std::min(alpha, 1.0);
  h.holder_beta = alpha >= 1.0 ? alpha : 1.0;
  h.tv = 1.0;
  return h;
}

WeightFn WeightFn::step() {
  WeightFn h;
  h.kind = Kind::step;
  h.holder_alpha = 0.0;
  h.holder_beta = std::numeric_limits<double>::infinity();
  h.tv = 1.0;
  return h;
}

WeightFn WeightFn::tabulated(std::vector<double> xs, std::vector<double> ys) {
  if (xs.empty() || xs.size() != ys.size()) {
    throw std::invalid_argument("WeightFn::tabulated: need matching nonempty knots");
  }
  double prev = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > prev) || xs[i] > 1.0 || !std::isfinite(ys[i])) {
      throw std::invalid_argument(
          "WeightFn::tabulated: knots must be strictly increasing in (0,1]");
    }
    prev = xs[i];
  }
  WeightFn h;
  h.kind = Kind::tabulated;
  h.knots_x = std::move(xs);
  h.knots_y = std::move(ys);
  // TV and slopes from the polyline through (0,0) and the knots.
  double tv = 0.0;
  double max_slope = 0.0;
  double px = 0.0, py = 0.0;
  for (std::size_t i = 0; i < h.knots_x.size(); ++i) {
    tv += std::abs(h.knots_y[i] - py);
    max_slope = std::max(max_slope,
                         std::abs(h.knots_y[i] - py) / (h.knots_x[i] - px));
    px = h.knots_x[i];
    py = h.knots_y[i];
  }
  h.tv = tv;
  h.holder_alpha = 1.0;
  h.holder_beta = max_slope;
  return h;
}

WeightFn WeightFn::parse(const std::string& text) {
  if (text == "step") return step();
  const std::string prefix = "power:";
  if (text.rfind(prefix, 0) == 0) {
    std::size_t used = 0;
    double a = 0.0;
    try {
      a = std::stod(text.substr(prefix.size()), &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("weight spec: bad alpha in '" + text + "'");
    }
    if (used != text.size() - prefix.size()) {
      throw std::invalid_argument("weight spec: trailing junk in '" + text + "'");
    }
    return power(a);
  }
  throw std::invalid_argument("weight spec must be 'power:<alpha>' or 'step', got '" +
                              text + "'");
}

std::string WeightFn::describe() const {
  switch (kind) {
    case Kind::step:
      return "step";
    case Kind::power_plus: {
      std::ostringstream os;
      os << "power:" << alpha;
      return os.str();
    }
    case Kind::tabulated:
      return "tabulated[" + std::to_string(knots_x.size()) + "]";
  }
  return "?";
}

double weight_eval(const WeightFn& h, double x) {
  if (x < -1.0 || x > 1.0) {
    throw std::invalid_argument("weight_eval: argument outside [-1,1]");
  }
  if (x <= 0.0) return 0.0;
  switch (h.kind) {
    case WeightFn::Kind::power_plus:
      return std::pow(x, h.alpha);
    case WeightFn::Kind::step:
      return 1.0;
    case WeightFn::Kind::tabulated: {
      double px = 0.0, py = 0.0;
      for (std::size_t i = 0; i < h.knots_x.size(); ++i) {
        if (x <= h.knots_x[i]) {
          const double t = (x - px) / (h.knots_x[i] - px);
          return py + t * (h.knots_y[i] - py);
        }
        px = h.knots_x[i];
        py = h.knots_y[i];
      }
      return h.knots_y.back();  // flat beyond the last knot
    }
  }
  return 0.0;
}

}  // namespace fcpd
