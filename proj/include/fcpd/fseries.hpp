#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace fcpd {

/// A function observed on the grid; entry j is the value at points[j].
using Curve = Eigen::VectorXd;

/// Discretization of the domain [0,1] together with quadrature weights.
/// The weights carry the measure: inner products, norms and every operator
/// application below are sums weighted by `weights`.
class Grid {
 public:
  Grid(Eigen::VectorXd points, Eigen::VectorXd weights);

  /// m equispaced points on [0,1] with trapezoid weights; the weights sum
  /// to 1 exactly so constant functions have exact norms.
  static Grid equispaced01(Eigen::Index m);

  /// Trapezoid weights for arbitrary strictly increasing points.
  static Grid trapezoid(Eigen::VectorXd points);

  Eigen::Index size() const { return points_.size(); }
  const Eigen::VectorXd& points() const { return points_; }
  const Eigen::VectorXd& weights() const { return weights_; }

  bool same_as(const Grid& other) const;

 private:
  Eigen::VectorXd points_;
  Eigen::VectorXd weights_;
};

/// n curves sharing one grid; row i of data() is curve i.
class FSeries {
 public:
  FSeries(Eigen::MatrixXd data, Grid grid);

  Eigen::Index n() const { return data_.rows(); }
  Eigen::Index m() const { return data_.cols(); }
  const Eigen::MatrixXd& data() const { return data_; }
  const Grid& grid() const { return grid_; }

 private:
  Eigen::MatrixXd data_;
  Grid grid_;
};

/// Projection scores: scores(i,p) = <X_i, w_p> for a projection basis w.
struct ScoreMatrix {
  Eigen::MatrixXd scores;
  std::string basis_id;
};

double inner(const Curve& f, const Curve& g, const Grid& grid);
double norm(const Curve& f, const Grid& grid);

Curve mean_curve(const FSeries& xs);
FSeries center(const FSeries& xs);

ScoreMatrix project_scores(const FSeries& xs, const std::vector<Curve>& basis,
                           const std::string& basis_id = "custom");

}  // namespace fcpd
