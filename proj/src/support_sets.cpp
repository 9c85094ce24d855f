#include "ddcc/support_sets.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ddcc/conic.hpp"
#include "ddcc/errors.hpp"

namespace ddcc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

SupportSet SupportSet::box(VectorXd lower, VectorXd upper) {
  if (lower.size() == 0 || lower.size() != upper.size()) {
    throw InvalidArgument("box bounds must be nonempty and of equal length");
  }
  if (!lower.allFinite() || !upper.allFinite()) {
    throw InvalidArgument("box bounds must be finite");
  }
  if ((lower.array() > upper.array()).any()) {
    throw InvalidArgument("box lower bound exceeds upper bound");
  }
  SupportSet s;
  s.kind_ = Kind::Box;
  s.dim_ = static_cast<int>(lower.size());
  s.widths_ = upper - lower;
  s.lower_ = std::move(lower);
  s.upper_ = std::move(upper);
  return s;
}

SupportSet SupportSet::polytope(MatrixXd vertices) {
  if (vertices.rows() == 0 || vertices.cols() == 0) {
    throw InvalidArgument("polytope needs at least one vertex");
  }
  if (!vertices.allFinite()) {
    throw InvalidArgument("polytope vertices must be finite");
  }
  SupportSet s;
  s.kind_ = Kind::Polytope;
  s.dim_ = static_cast<int>(vertices.rows());
  s.vertices_ = std::move(vertices);
  return s;
}

SupportSet SupportSet::ellipsoid(VectorXd center, MatrixXd shape) {
  const auto n = center.size();
  if (n == 0 || shape.rows() != n || shape.cols() != n) {
    throw InvalidArgument("ellipsoid center and shape dimensions disagree");
  }
  if (!center.allFinite() || !shape.allFinite()) {
    throw InvalidArgument("ellipsoid data must be finite");
  }
  const double scale = std::max(1.0, shape.cwiseAbs().maxCoeff());
  if ((shape - shape.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArgument("ellipsoid shape matrix is not symmetric");
  }
  Eigen::LLT<MatrixXd> llt(0.5 * (shape + shape.transpose()));
  if (llt.info() != Eigen::Success) {
    throw InvalidArgument("ellipsoid shape matrix is not positive definite");
  }
  MatrixXd L = llt.matrixL();
  if (!(L.diagonal().minCoeff() > 0.0)) {
    throw InvalidArgument("ellipsoid shape matrix is not positive definite");
  }
  SupportSet s;
  s.kind_ = Kind::Ellipsoid;
  s.dim_ = static_cast<int>(n);
  s.center_ = std::move(center);
  s.shape_ = std::move(shape);
  s.inv_factor_ =
      L.triangularView<Eigen::Lower>().solve(MatrixXd::Identity(n, n));
  s.factor_ = std::move(L);
  return s;
}

void SupportSet::check_dim(Eigen::Index n) const {
  if (n != dim_) {
    throw InvalidArgument("vector length " + std::to_string(n) +
                          " does not match support dimension " +
                          std::to_string(dim_));
  }
}

double SupportSet::radius(const Eigen::Ref<const VectorXd>& z) const {
  check_dim(z.size());
  switch (kind_) {
    case Kind::Box:
      return 0.5 * widths_.cwiseProduct(z).lpNorm<1>();
    case Kind::Polytope: {
      const VectorXd proj = vertices_.transpose() * z;
      return 0.5 * (proj.maxCoeff() - proj.minCoeff());
    }
    case Kind::Ellipsoid:
      return factor_.triangularView<Eigen::Lower>().solve(z).norm();
  }
  return 0.0;
}

namespace {

// Minimal infinity-norm distance from `a` to the convex hull of the columns
// of V, via  min t  s.t.  |V lambda - a| <= t, lambda >= 0, sum lambda = 1.
double hull_distance(const MatrixXd& V, const VectorXd& a) {
  const auto n = V.rows();
  const auto m = V.cols();
  const int nv = static_cast<int>(m) + 1;
  conic::ConicProgram prog(nv);
  VectorXd obj = VectorXd::Zero(nv);
  obj(m) = 1.0;
  prog.set_objective(obj, conic::Sense::Minimize);
  for (Eigen::Index i = 0; i < n; ++i) {
    VectorXd row = VectorXd::Zero(nv);
    row.head(m) = V.row(i).transpose();
    row(m) = -1.0;
    prog.add_linear_le(row, -a(i));
    row.head(m) *= -1.0;
    prog.add_linear_le(row, a(i));
  }
  VectorXd sum = VectorXd::Zero(nv);
  sum.head(m).setOnes();
  prog.add_linear_eq(sum, -1.0);
  for (int k = 0; k < static_cast<int>(m); ++k) prog.set_lower_bound(k, 0.0);
  conic::ToleranceSettings tol;
  tol.feasibility = 1e-12;
  tol.optimality = 1e-12;
  const conic::Solution sol = conic::solve(prog, tol);
  // Evaluate the distance at the returned weights directly, after projecting
  // them back onto the simplex, so the answer does not rely on solver
  // tolerances.
  VectorXd lambda = sol.x.head(m).cwiseMax(0.0);
  const double total = lambda.sum();
  if (!(total > 0.0) || !lambda.allFinite()) {
    lambda = VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  } else {
    lambda /= total;
  }
  return (V * lambda - a).lpNorm<Eigen::Infinity>();
}

}  // namespace

bool SupportSet::contains(const Eigen::Ref<const VectorXd>& a) const {
  check_dim(a.size());
  switch (kind_) {
    case Kind::Box:
      return (a.array() >= lower_.array()).all() &&
             (a.array() <= upper_.array()).all();
    case Kind::Polytope: {
      const double scale =
          std::max(1.0, std::max(vertices_.cwiseAbs().maxCoeff(),
                                 a.cwiseAbs().maxCoeff()));
      return hull_distance(vertices_, a) <= 1e-9 * scale;
    }
    case Kind::Ellipsoid: {
      const VectorXd d = a - center_;
      return d.dot(shape_ * d) <= 1.0 + 1e-12;
    }
  }
  return false;
}

namespace {

VectorXd to_vec(const nlohmann::json& j) {
  auto v = j.get<std::vector<double>>();
  return Eigen::Map<VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> from_vec(const VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

// Rows of the JSON array become rows of the matrix.
MatrixXd to_mat(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) {
    throw InvalidArgument("expected a nonempty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.at(0).size());
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const VectorXd r = to_vec(j.at(static_cast<std::size_t>(i)));
    if (r.size() != cols) throw InvalidArgument("ragged matrix");
    m.row(i) = r.transpose();
  }
  return m;
}

nlohmann::json rows_json(const MatrixXd& m) {
  auto out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out.push_back(from_vec(m.row(i).transpose()));
  }
  return out;
}

}  // namespace

SupportSet SupportSet::from_json(const nlohmann::json& j) {
  try {
    if (j.contains("box")) {
      const auto& b = j.at("box");
      return box(to_vec(b.at("lower")), to_vec(b.at("upper")));
    }
    if (j.contains("polytope")) {
      // One vertex per JSON row; stored one per column.
      return polytope(to_mat(j.at("polytope").at("vertices")).transpose());
    }
    if (j.contains("ellipsoid")) {
      const auto& e = j.at("ellipsoid");
      return ellipsoid(to_vec(e.at("center")), to_mat(e.at("shape")));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidArgument(std::string("malformed support JSON: ") + ex.what());
  }
  throw InvalidArgument("support JSON needs one of box, polytope, ellipsoid");
}

nlohmann::json SupportSet::to_json() const {
  switch (kind_) {
    case Kind::Box:
      return {{"box", {{"lower", from_vec(lower_)}, {"upper", from_vec(upper_)}}}};
    case Kind::Polytope:
      return {{"polytope", {{"vertices", rows_json(vertices_.transpose())}}}};
    case Kind::Ellipsoid:
      return {{"ellipsoid",
               {{"center", from_vec(center_)}, {"shape", rows_json(shape_)}}}};
  }
  return {};
}

}  // namespace ddcc
