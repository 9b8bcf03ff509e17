#include "fcpd/fseries.hpp"

#include <cmath>
#include <stdexcept>

namespace fcpd {

namespace {

void check_finite(const Eigen::MatrixXd& a, const char* what) {
  if (!a.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entries");
  }
}

}  // namespace

Grid::Grid(Eigen::VectorXd points, Eigen::VectorXd weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  const Eigen::Index m = points_.size();
  if (m < 2) throw std::invalid_argument("Grid: need at least 2 points");
  if (weights_.size() != m) {
    throw std::invalid_argument("Grid: points/weights length mismatch");
  }
  check_finite(points_, "Grid points");
  check_finite(weights_, "Grid weights");
  for (Eigen::Index j = 1; j < m; ++j) {
    if (!(points_[j] > points_[j - 1])) {
      throw std::invalid_argument("Grid: points must be strictly increasing");
    }
  }
  if ((weights_.array() < 0.0).any()) {
    throw std::invalid_argument("Grid: weights must be nonnegative");
  }
  if (!(weights_.sum() > 0.0)) {
    throw std::invalid_argument("Grid: weights must have positive total mass");
  }
}

Grid Grid::trapezoid(Eigen::VectorXd points) {
  const Eigen::Index m = points.size();
  if (m < 2) throw std::invalid_argument("Grid: need at least 2 points");
  Eigen::VectorXd w(m);
  w[0] = 0.5 * (points[1] - points[0]);
  for (Eigen::Index j = 1; j + 1 < m; ++j) {
    w[j] = 0.5 * (points[j + 1] - points[j - 1]);
  }
  w[m - 1] = 0.5 * (points[m - 1] - points[m - 2]);
  return Grid(std::move(points), std::move(w));
}

Grid Grid::equispaced01(Eigen::Index m) {
  if (m < 2) throw std::invalid_argument("Grid: need at least 2 points");
  Eigen::VectorXd pts(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    pts[j] = static_cast<double>(j) / static_cast<double>(m - 1);
  }
  const double step = 1.0 / static_cast<double>(m - 1);
  Eigen::VectorXd w = Eigen::VectorXd::Constant(m, step);
  w[0] = 0.5 * step;
  w[m - 1] = 0.5 * step;
  // Nudge the last weight so the total mass is exactly 1.
  for (int pass = 0; pass < 4; ++pass) {
    const double total = w.sum();
    if (total == 1.0) break;
    w[m - 1] += 1.0 - total;
  }
  return Grid(std::move(pts), std::move(w));
}

bool Grid::same_as(const Grid& other) const {
  return points_.size() == other.points_.size() && points_ == other.points_ &&
         weights_ == other.weights_;
}

FSeries::FSeries(Eigen::MatrixXd data, Grid grid)
    : data_(std::move(data)), grid_(std::move(grid)) {
  if (data_.rows() < 2) {
    throw std::invalid_argument("FSeries: need at least 2 curves");
  }
  if (data_.cols() != grid_.size()) {
    throw std::invalid_argument("FSeries: data columns must match grid size");
  }
  check_finite(data_, "FSeries data");
}

double inner(const Curve& f, const Curve& g, const Grid& grid) {
  if (f.size() != grid.size() || g.size() != grid.size()) {
    throw std::invalid_argument("inner: curve length does not match grid");
  }
  return (f.array() * g.array() * grid.weights().array()).sum();
}

double norm(const Curve& f, const Grid& grid) {
  const double sq = inner(f, f, grid);
  return sq > 0.0 ? std::sqrt(sq) : 0.0;
}

Curve mean_curve(const FSeries& xs) {
  return xs.data().colwise().mean();
}

FSeries center(const FSeries& xs) {
  Eigen::MatrixXd centered = xs.data();
  // Iterate mean subtraction to a floating-point fixed point so centering an
  // already-centered sample is a bit-exact no-op.
  for (int pass = 0; pass < 64; ++pass) {
    const Eigen::RowVectorXd mean = centered.colwise().mean();
    Eigen::MatrixXd next = centered.rowwise() - mean;
    if (next == centered) break;
    centered.swap(next);
  }
  return FSeries(std::move(centered), xs.grid());
}

ScoreMatrix project_scores(const FSeries& xs, const std::vector<Curve>& basis,
                           const std::string& basis_id) {
  if (basis.empty()) throw std::invalid_argument("project_scores: empty basis");
  const Eigen::Index m = xs.m();
  Eigen::MatrixXd b(m, static_cast<Eigen::Index>(basis.size()));
  for (Eigen::Index p = 0; p < b.cols(); ++p) {
    if (basis[static_cast<std::size_t>(p)].size() != m) {
      throw std::invalid_argument("project_scores: basis curve off the grid");
    }
    b.col(p) = basis[static_cast<std::size_t>(p)];
  }
  ScoreMatrix out;
  out.scores = xs.data() * xs.grid().weights().asDiagonal() * b;
  out.basis_id = basis_id;
  return out;
}

}  // namespace fcpd
