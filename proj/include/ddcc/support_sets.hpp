#pragma once

// Support sets and the support radius r(z) = max over a1, a2 in the set of
// (a1 - a2)'z / 2.

#include <Eigen/Dense>

#include <nlohmann/json_fwd.hpp>

namespace ddcc {

class SupportSet {
 public:
  enum class Kind { Box, Polytope, Ellipsoid };

  /// Hyperbox lower <= a <= upper.
  static SupportSet box(Eigen::VectorXd lower, Eigen::VectorXd upper);
  /// Convex hull of the columns of `vertices` (dim x m).
  static SupportSet polytope(Eigen::MatrixXd vertices);
  /// {a : (a - center)' shape (a - center) <= 1}; shape must be symmetric PD.
  static SupportSet ellipsoid(Eigen::VectorXd center, Eigen::MatrixXd shape);

  static SupportSet from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }

  double radius(const Eigen::Ref<const Eigen::VectorXd>& z) const;
  bool contains(const Eigen::Ref<const Eigen::VectorXd>& a) const;

  // Box accessors.
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  /// Diagonal of S = diag(upper - lower).
  const Eigen::VectorXd& widths() const { return widths_; }

  const Eigen::MatrixXd& vertices() const { return vertices_; }

  const Eigen::VectorXd& center() const { return center_; }
  const Eigen::MatrixXd& shape() const { return shape_; }
  /// Lower-triangular L with shape = L L'; radius(z) = ||L^{-1} z||.
  const Eigen::MatrixXd& shape_factor() const { return factor_; }
  /// L^{-1}, materialized for constraint assembly.
  const Eigen::MatrixXd& inverse_factor() const { return inv_factor_; }

 private:
  SupportSet() = default;
  void check_dim(Eigen::Index n) const;

  Kind kind_ = Kind::Box;
  int dim_ = 0;
  Eigen::VectorXd lower_, upper_, widths_;
  Eigen::MatrixXd vertices_;
  Eigen::VectorXd center_;
  Eigen::MatrixXd shape_, factor_, inv_factor_;
};

}  // namespace ddcc
