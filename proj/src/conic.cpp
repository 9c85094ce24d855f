#include "ddcc/conic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <utility>

#include <nlohmann/json.hpp>

#include "ddcc/errors.hpp"

namespace ddcc::conic {

using Eigen::MatrixXd;
using Eigen::VectorXd;

ConicProgram::ConicProgram(int num_vars)
    : num_vars_(num_vars),
      objective_(VectorXd::Zero(std::max(num_vars, 0))),
      lower_(static_cast<std::size_t>(std::max(num_vars, 0))) {
  if (num_vars < 1) {
    throw InvalidArgument("ConicProgram needs at least one variable");
  }
}

void ConicProgram::set_objective(VectorXd coeffs, Sense sense) {
  if (coeffs.size() != num_vars_) {
    throw InvalidArgument("objective length does not match variable count");
  }
  objective_ = std::move(coeffs);
  sense_ = sense;
}

void ConicProgram::add_linear(LinearRow row) {
  if (row.coeffs.size() != num_vars_) {
    throw InvalidArgument("linear row length does not match variable count");
  }
  linear_.push_back(std::move(row));
}

void ConicProgram::add_linear_le(VectorXd coeffs, double constant) {
  add_linear({std::move(coeffs), constant, Relation::LessEqual});
}

void ConicProgram::add_linear_eq(VectorXd coeffs, double constant) {
  add_linear({std::move(coeffs), constant, Relation::Equal});
}

void ConicProgram::add_soc(SocRow row) {
  if (row.A.cols() != num_vars_ || row.c.size() != num_vars_ ||
      row.A.rows() != row.b.size()) {
    throw InvalidArgument("SOC row dimensions are inconsistent");
  }
  soc_.push_back(std::move(row));
}

void ConicProgram::set_lower_bound(int var, double lower) {
  if (var < 0 || var >= num_vars_) {
    throw InvalidArgument("lower bound index out of range");
  }
  lower_[static_cast<std::size_t>(var)] = lower;
}

void ConicProgram::validate() const {
  if (!objective_.allFinite()) {
    throw InvalidArgument("objective has non-finite entries");
  }
  for (const auto& r : linear_) {
    if (r.coeffs.size() != num_vars_ || !r.coeffs.allFinite() ||
        !std::isfinite(r.constant)) {
      throw InvalidArgument("malformed linear row");
    }
  }
  for (const auto& r : soc_) {
    if (r.A.cols() != num_vars_ || r.c.size() != num_vars_ ||
        r.A.rows() != r.b.size() || !r.A.allFinite() || !r.b.allFinite() ||
        !r.c.allFinite() || !std::isfinite(r.e)) {
      throw InvalidArgument("malformed SOC row");
    }
  }
  for (const auto& lb : lower_) {
    if (lb && !std::isfinite(*lb)) {
      throw InvalidArgument("non-finite lower bound");
    }
  }
}

namespace {

nlohmann::json vec_to_json(const VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

VectorXd vec_from_json(const nlohmann::json& j) {
  auto v = j.get<std::vector<double>>();
  return Eigen::Map<VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

nlohmann::json mat_to_json(const MatrixXd& m) {
  auto out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out.push_back(vec_to_json(m.row(i).transpose()));
  }
  return out;
}

MatrixXd mat_from_json(const nlohmann::json& j, Eigen::Index cols) {
  MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    VectorXd row = vec_from_json(j.at(static_cast<std::size_t>(i)));
    if (row.size() != cols) throw InvalidArgument("ragged matrix in JSON");
    m.row(i) = row.transpose();
  }
  return m;
}

}  // namespace

nlohmann::json ConicProgram::to_json() const {
  nlohmann::json j;
  j["num_vars"] = num_vars_;
  j["sense"] = sense_ == Sense::Minimize ? "min" : "max";
  j["objective"] = vec_to_json(objective_);
  auto lin = nlohmann::json::array();
  for (const auto& r : linear_) {
    lin.push_back({{"coeffs", vec_to_json(r.coeffs)},
                   {"constant", r.constant},
                   {"relation", r.relation == Relation::Equal ? "eq" : "le"}});
  }
  j["linear"] = lin;
  auto socs = nlohmann::json::array();
  for (const auto& r : soc_) {
    socs.push_back({{"A", mat_to_json(r.A)},
                    {"b", vec_to_json(r.b)},
                    {"c", vec_to_json(r.c)},
                    {"e", r.e}});
  }
  j["soc"] = socs;
  auto lbs = nlohmann::json::array();
  for (const auto& lb : lower_) {
    lbs.push_back(lb ? nlohmann::json(*lb) : nlohmann::json(nullptr));
  }
  j["lower_bounds"] = lbs;
  return j;
}

ConicProgram ConicProgram::from_json(const nlohmann::json& j) {
  ConicProgram p(j.at("num_vars").get<int>());
  p.set_objective(vec_from_json(j.at("objective")),
                  j.at("sense").get<std::string>() == "max" ? Sense::Maximize
                                                             : Sense::Minimize);
  for (const auto& r : j.at("linear")) {
    p.add_linear({vec_from_json(r.at("coeffs")), r.at("constant").get<double>(),
                  r.at("relation").get<std::string>() == "eq"
                      ? Relation::Equal
                      : Relation::LessEqual});
  }
  for (const auto& r : j.at("soc")) {
    p.add_soc({mat_from_json(r.at("A"), p.num_vars()), vec_from_json(r.at("b")),
               vec_from_json(r.at("c")), r.at("e").get<double>()});
  }
  if (j.contains("lower_bounds")) {
    const auto& lbs = j.at("lower_bounds");
    for (std::size_t i = 0; i < lbs.size(); ++i) {
      if (!lbs[i].is_null()) {
        p.set_lower_bound(static_cast<int>(i), lbs[i].get<double>());
      }
    }
  }
  return p;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal:
      return "optimal";
    case Status::Infeasible:
      return "infeasible";
    case Status::IterationLimit:
      return "iteration_limit";
    case Status::NumericalFailure:
      return "numerical_failure";
  }
  return "unknown";
}

std::ostream& operator<<(std::ostream& os, Status s) {
  return os << to_string(s);
}

CheckResult check(const ConicProgram& prog, const VectorXd& candidate,
                  double feas_tol) {
  if (candidate.size() != prog.num_vars()) {
    throw InvalidArgument("candidate length does not match variable count");
  }
  double worst = 0.0;
  for (const auto& r : prog.linear_rows()) {
    const double v = r.coeffs.dot(candidate) + r.constant;
    worst = std::max(worst, r.relation == Relation::Equal ? std::abs(v) : v);
  }
  for (const auto& r : prog.soc_rows()) {
    const double lhs = (r.A * candidate + r.b).norm();
    worst = std::max(worst, lhs - (r.c.dot(candidate) + r.e));
  }
  const auto& lbs = prog.lower_bounds();
  for (std::size_t i = 0; i < lbs.size(); ++i) {
    if (lbs[i]) {
      worst = std::max(worst, *lbs[i] - candidate(static_cast<Eigen::Index>(i)));
    }
  }
  return {worst <= feas_tol, worst};
}

// ---------------------------------------------------------------------------
// Interior-point core.
//
// Standard form:  min c'x  s.t.  A x = b,  h - G x = s in K,
// K = R_+^l x Q^{q_1} x ... x Q^{q_k}.  Rows of G are ordered orthant first,
// then each cone block. Primal-dual path following with Nesterov-Todd scaling
// and Mehrotra predictor-corrector steps; infeasible start.
// ---------------------------------------------------------------------------

namespace {

struct StandardForm {
  VectorXd c;
  MatrixXd G;
  VectorXd h;
  MatrixXd A;
  VectorXd b;
  int l = 0;
  std::vector<int> soc;

  int n() const { return static_cast<int>(c.size()); }
  int m() const { return static_cast<int>(h.size()); }
  int p() const { return static_cast<int>(b.size()); }
  int degree() const { return l + static_cast<int>(soc.size()); }
};

StandardForm to_standard_form(const ConicProgram& prog) {
  const int n = prog.num_vars();
  std::vector<VectorXd> g_rows;
  std::vector<double> h_vals;
  std::vector<VectorXd> a_rows;
  std::vector<double> b_vals;

  for (const auto& r : prog.linear_rows()) {
    if (r.relation == Relation::Equal) {
      a_rows.push_back(r.coeffs);
      b_vals.push_back(-r.constant);
    } else {
      g_rows.push_back(r.coeffs);
      h_vals.push_back(-r.constant);
    }
  }
  const auto& lbs = prog.lower_bounds();
  for (int i = 0; i < n; ++i) {
    if (lbs[static_cast<std::size_t>(i)]) {
      VectorXd row = VectorXd::Zero(n);
      row(i) = -1.0;
      g_rows.push_back(row);
      h_vals.push_back(-*lbs[static_cast<std::size_t>(i)]);
    }
  }

  StandardForm sf;
  sf.l = static_cast<int>(g_rows.size());
  int m = sf.l;
  for (const auto& r : prog.soc_rows()) {
    m += 1 + static_cast<int>(r.A.rows());
    sf.soc.push_back(1 + static_cast<int>(r.A.rows()));
  }

  sf.c = prog.sense() == Sense::Minimize ? VectorXd(prog.objective())
                                         : VectorXd(-prog.objective());
  sf.G = MatrixXd::Zero(m, n);
  sf.h = VectorXd::Zero(m);
  for (int i = 0; i < sf.l; ++i) {
    sf.G.row(i) = g_rows[static_cast<std::size_t>(i)].transpose();
    sf.h(i) = h_vals[static_cast<std::size_t>(i)];
  }
  int off = sf.l;
  for (const auto& r : prog.soc_rows()) {
    const auto k = r.A.rows();
    sf.G.row(off) = -r.c.transpose();
    sf.h(off) = r.e;
    sf.G.block(off + 1, 0, k, n) = -r.A;
    sf.h.segment(off + 1, k) = r.b;
    off += 1 + static_cast<int>(k);
  }

  sf.A = MatrixXd::Zero(static_cast<Eigen::Index>(a_rows.size()), n);
  sf.b = VectorXd::Zero(static_cast<Eigen::Index>(b_vals.size()));
  for (std::size_t i = 0; i < a_rows.size(); ++i) {
    sf.A.row(static_cast<Eigen::Index>(i)) = a_rows[i].transpose();
    sf.b(static_cast<Eigen::Index>(i)) = b_vals[i];
  }
  return sf;
}

// Cone arithmetic. All helpers walk the orthant block then each SOC block.

template <typename F>
void for_each_soc(const StandardForm& sf, F&& f) {
  int off = sf.l;
  for (int q : sf.soc) {
    f(off, q);
    off += q;
  }
}

VectorXd cone_identity(const StandardForm& sf) {
  VectorXd e = VectorXd::Zero(sf.m());
  e.head(sf.l).setOnes();
  for_each_soc(sf, [&](int off, int) { e(off) = 1.0; });
  return e;
}

// u o v
VectorXd jordan_product(const StandardForm& sf, const VectorXd& u,
                        const VectorXd& v) {
  VectorXd w(sf.m());
  w.head(sf.l) = u.head(sf.l).cwiseProduct(v.head(sf.l));
  for_each_soc(sf, [&](int off, int q) {
    w(off) = u.segment(off, q).dot(v.segment(off, q));
    w.segment(off + 1, q - 1) = u(off) * v.segment(off + 1, q - 1) +
                                v(off) * u.segment(off + 1, q - 1);
  });
  return w;
}

// Solves lambda o w = v for w.
VectorXd jordan_divide(const StandardForm& sf, const VectorXd& lambda,
                       const VectorXd& v) {
  VectorXd w(sf.m());
  w.head(sf.l) = v.head(sf.l).cwiseQuotient(lambda.head(sf.l));
  for_each_soc(sf, [&](int off, int q) {
    const double l0 = lambda(off);
    const auto l1 = lambda.segment(off + 1, q - 1);
    const double v0 = v(off);
    const auto v1 = v.segment(off + 1, q - 1);
    const double det = l0 * l0 - l1.squaredNorm();
    const double l1v1 = l1.dot(v1);
    w(off) = (l0 * v0 - l1v1) / det;
    w.segment(off + 1, q - 1) = v1 / l0 + ((l1v1 / l0 - v0) / det) * l1;
  });
  return w;
}

// Largest step alpha with u + alpha d in K (may be +inf).
double max_step(const StandardForm& sf, const VectorXd& u, const VectorXd& d) {
  double alpha = std::numeric_limits<double>::infinity();
  for (int i = 0; i < sf.l; ++i) {
    if (d(i) < 0.0) alpha = std::min(alpha, -u(i) / d(i));
  }
  for_each_soc(sf, [&](int off, int q) {
    const double u0 = u(off);
    const double d0 = d(off);
    const auto u1 = u.segment(off + 1, q - 1);
    const auto d1 = d.segment(off + 1, q - 1);
    const double qa = d0 * d0 - d1.squaredNorm();
    const double qb = 2.0 * (u0 * d0 - u1.dot(d1));
    const double qc = std::max(u0 * u0 - u1.squaredNorm(), 0.0);
    double root = std::numeric_limits<double>::infinity();
    if (std::abs(qa) < 1e-300) {
      if (qb < 0.0) root = -qc / qb;
    } else {
      const double disc = qb * qb - 4.0 * qa * qc;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        const double t = -0.5 * (qb + (qb >= 0.0 ? sq : -sq));
        const double r1 = t / qa;
        const double r2 = t != 0.0 ? qc / t : std::numeric_limits<double>::infinity();
        for (double r : {r1, r2}) {
          if (r >= 0.0) root = std::min(root, r);
        }
      }
    }
    if (d0 < 0.0) root = std::min(root, -u0 / d0);
    alpha = std::min(alpha, root);
  });
  return alpha;
}

// Distance by which u falls outside K (<= 0 when u is inside).
double max_infeasibility(const StandardForm& sf, const VectorXd& u) {
  double t = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < sf.l; ++i) t = std::max(t, -u(i));
  for_each_soc(sf, [&](int off, int q) {
    t = std::max(t, u.segment(off + 1, q - 1).norm() - u(off));
  });
  return t;
}

// sqrt(u0^2 - |u1|^2), factored to limit cancellation near the boundary.
double soc_norm(const Eigen::Ref<const VectorXd>& u) {
  const double r = u.tail(u.size() - 1).norm();
  return std::sqrt(std::max((u(0) - r) * (u(0) + r), 1e-300));
}

struct Scaling {
  MatrixXd W;
  MatrixXd Winv;
  VectorXd lambda;
};

Scaling nesterov_todd(const StandardForm& sf, const VectorXd& s,
                      const VectorXd& z) {
  const int m = sf.m();
  Scaling sc;
  sc.W = MatrixXd::Zero(m, m);
  sc.Winv = MatrixXd::Zero(m, m);
  for (int i = 0; i < sf.l; ++i) {
    const double d = std::sqrt(s(i) / z(i));
    sc.W(i, i) = d;
    sc.Winv(i, i) = 1.0 / d;
  }
  for_each_soc(sf, [&](int off, int q) {
    const auto ss = s.segment(off, q);
    const auto zz = z.segment(off, q);
    const double snorm = soc_norm(ss);
    const double znorm = soc_norm(zz);
    const VectorXd sb = ss / snorm;
    const VectorXd zb = zz / znorm;
    const double gamma = std::sqrt(std::max(0.5 * (1.0 + sb.dot(zb)), 1e-300));
    VectorXd w(q);
    w(0) = (sb(0) + zb(0)) / (2.0 * gamma);
    w.tail(q - 1) = (sb.tail(q - 1) - zb.tail(q - 1)) / (2.0 * gamma);
    const double eta = std::sqrt(snorm / znorm);
    const auto w1 = w.tail(q - 1);
    MatrixXd blk(q, q);
    blk(0, 0) = w(0);
    blk.block(0, 1, 1, q - 1) = w1.transpose();
    blk.block(1, 0, q - 1, 1) = w1;
    blk.block(1, 1, q - 1, q - 1) =
        MatrixXd::Identity(q - 1, q - 1) + w1 * w1.transpose() / (1.0 + w(0));
    sc.W.block(off, off, q, q) = eta * blk;
    blk.block(0, 1, 1, q - 1) *= -1.0;
    blk.block(1, 0, q - 1, 1) *= -1.0;
    sc.Winv.block(off, off, q, q) = blk / eta;
  });
  sc.lambda = sc.W * z;
  return sc;
}

// Factorization of the scaled KKT matrix
//   [ 0   A'  Gs' ]
//   [ A   0   0   ]      Gs = W^{-1} G
//   [ Gs  0   -I  ]
// with a tiny static regularization removed again by iterative refinement.
class KktSolver {
 public:
  KktSolver(const StandardForm& sf, const MatrixXd& Winv)
      : n_(sf.n()), p_(sf.p()), m_(sf.m()), Winv_(Winv) {
    const int dim = n_ + p_ + m_;
    K_ = MatrixXd::Zero(dim, dim);
    const MatrixXd Gs = Winv * sf.G;
    K_.block(0, n_, n_, p_) = sf.A.transpose();
    K_.block(n_, 0, p_, n_) = sf.A;
    K_.block(0, n_ + p_, n_, m_) = Gs.transpose();
    K_.block(n_ + p_, 0, m_, n_) = Gs;
    K_.block(n_ + p_, n_ + p_, m_, m_) = -MatrixXd::Identity(m_, m_);
    MatrixXd reg = K_;
    constexpr double delta = 1e-12;
    reg.diagonal().head(n_).array() += delta;
    reg.diagonal().segment(n_, p_).array() -= delta;
    lu_.compute(reg);
  }

  // Solves [0 A' G'; A 0 0; G 0 -W^2] (dx, dy, dz) = (bx, by, bz).
  void solve(const VectorXd& bx, const VectorXd& by, const VectorXd& bz,
             VectorXd& dx, VectorXd& dy, VectorXd& dz) const {
    VectorXd rhs(n_ + p_ + m_);
    rhs << bx, by, Winv_ * bz;
    VectorXd sol = lu_.solve(rhs);
    double res_norm = (rhs - K_ * sol).lpNorm<Eigen::Infinity>();
    for (int it = 0; it < 5 && res_norm > 0.0; ++it) {
      const VectorXd cand = sol + lu_.solve(rhs - K_ * sol);
      const double cand_norm = (rhs - K_ * cand).lpNorm<Eigen::Infinity>();
      if (!(cand_norm < res_norm)) break;
      sol = cand;
      res_norm = cand_norm;
    }
    dx = sol.head(n_);
    dy = sol.segment(n_, p_);
    dz = Winv_ * sol.tail(m_);
  }

 private:
  int n_, p_, m_;
  MatrixXd Winv_;
  MatrixXd K_;
  Eigen::PartialPivLU<MatrixXd> lu_;
};

struct CoreResult {
  Status status = Status::NumericalFailure;
  VectorXd x;
  int iterations = 0;
};

CoreResult interior_point(const StandardForm& sf, const ToleranceSettings& tol) {
  const int n = sf.n();
  const int m = sf.m();
  const int p = sf.p();
  const VectorXd e = cone_identity(sf);
  const double degree = std::max(sf.degree(), 1);

  CoreResult out;
  VectorXd x(n), y(p), z(m), s(m);
  {
    const KktSolver init(sf, MatrixXd::Identity(m, m));
    VectorXd dy, dz;
    init.solve(VectorXd::Zero(n), sf.b, sf.h, x, dy, dz);
    s = -dz;
    VectorXd dx;
    init.solve(-sf.c, VectorXd::Zero(p), VectorXd::Zero(m), dx, y, z);
  }
  if (m > 0) {
    const double ts = max_infeasibility(sf, s);
    if (ts >= -1e-8 * std::max(1.0, s.norm())) s += (1.0 + ts) * e;
    const double tz = max_infeasibility(sf, z);
    if (tz >= -1e-8 * std::max(1.0, z.norm())) z += (1.0 + tz) * e;
  }

  const double bh_scale = std::max(
      {1.0, sf.b.size() ? sf.b.lpNorm<Eigen::Infinity>() : 0.0,
       sf.h.size() ? sf.h.lpNorm<Eigen::Infinity>() : 0.0});
  const double c_scale = std::max(1.0, sf.c.lpNorm<Eigen::Infinity>());
  auto inf_norm = [](const VectorXd& v) {
    return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0;
  };

  out.x = x;
  for (int iter = 0; iter <= tol.max_iterations; ++iter) {
    out.iterations = iter;
    const VectorXd rx = sf.A.transpose() * y + sf.G.transpose() * z + sf.c;
    const VectorXd ry = sf.A * x - sf.b;
    const VectorXd rz = sf.G * x + s - sf.h;
    const double gap = s.dot(z);
    const double pcost = sf.c.dot(x);
    const double dcost = -sf.b.dot(y) - sf.h.dot(z);
    const double pres = std::max(inf_norm(ry), inf_norm(rz)) / bh_scale;
    const double dres = inf_norm(rx) / c_scale;

    if (!std::isfinite(gap) || !std::isfinite(pres) || !std::isfinite(dres) ||
        !x.allFinite()) {
      out.status = Status::NumericalFailure;
      return out;
    }
    out.x = x;

    double relgap = std::numeric_limits<double>::infinity();
    if (pcost < 0.0) {
      relgap = gap / -pcost;
    } else if (dcost > 0.0) {
      relgap = gap / dcost;
    }
    if (pres <= tol.feasibility && dres <= tol.feasibility &&
        (gap <= tol.optimality || relgap <= tol.optimality)) {
      out.status = Status::Optimal;
      return out;
    }
    if (iter == tol.max_iterations) break;
    if (x.lpNorm<Eigen::Infinity>() > 1e13 || z.lpNorm<Eigen::Infinity>() > 1e13) {
      out.status = Status::NumericalFailure;
      return out;
    }

    const Scaling sc = nesterov_todd(sf, s, z);
    const KktSolver kkt(sf, sc.Winv);
    const VectorXd& lam = sc.lambda;

    auto newton = [&](const VectorXd& ds_rhs, VectorXd& dx, VectorXd& dy,
                      VectorXd& dz, VectorXd& ds) {
      const VectorXd ld = jordan_divide(sf, lam, ds_rhs);
      kkt.solve(-rx, -ry, -rz - sc.W * ld, dx, dy, dz);
      ds = -rz - sf.G * dx;
    };

    VectorXd dx, dy, dz, ds;
    const VectorXd lam_sq = jordan_product(sf, lam, lam);
    newton(-lam_sq, dx, dy, dz, ds);
    double alpha_aff = 1.0;
    if (m > 0) {
      alpha_aff = std::min({1.0, max_step(sf, s, ds), max_step(sf, z, dz)});
    }
    const double mu = gap / degree;
    const double sigma = std::pow(1.0 - alpha_aff, 3.0);

    VectorXd corr = -lam_sq -
                    jordan_product(sf, sc.Winv * ds, sc.W * dz) +
                    (sigma * mu) * e;
    newton(corr, dx, dy, dz, ds);

    double alpha = 1.0;
    if (m > 0) {
      alpha = std::min(1.0, 0.99 * std::min(max_step(sf, s, ds),
                                            max_step(sf, z, dz)));
    }
    if (!(alpha > 1e-12)) {
      out.status = Status::NumericalFailure;
      return out;
    }
    x += alpha * dx;
    y += alpha * dy;
    z += alpha * dz;
    s += alpha * ds;
  }
  out.status = Status::IterationLimit;
  return out;
}

// min t  s.t.  h - G x + t e in K,  |A x - b| <= t,  t >= 0.
double phase_one_violation(const StandardForm& sf, const ToleranceSettings& tol,
                           bool& ok) {
  const int n = sf.n();
  const int p = sf.p();
  const int m_orth = sf.l + 2 * p + 1;
  const int m = m_orth + (sf.m() - sf.l);

  StandardForm ph;
  ph.c = VectorXd::Zero(n + 1);
  ph.c(n) = 1.0;
  ph.G = MatrixXd::Zero(m, n + 1);
  ph.h = VectorXd::Zero(m);
  ph.A = MatrixXd::Zero(0, n + 1);
  ph.b = VectorXd::Zero(0);
  ph.l = m_orth;
  ph.soc = sf.soc;

  int row = 0;
  for (int i = 0; i < sf.l; ++i, ++row) {
    ph.G.row(row).head(n) = sf.G.row(i);
    ph.G(row, n) = -1.0;
    ph.h(row) = sf.h(i);
  }
  for (int i = 0; i < p; ++i) {
    ph.G.row(row).head(n) = sf.A.row(i);
    ph.G(row, n) = -1.0;
    ph.h(row) = sf.b(i);
    ++row;
    ph.G.row(row).head(n) = -sf.A.row(i);
    ph.G(row, n) = -1.0;
    ph.h(row) = -sf.b(i);
    ++row;
  }
  ph.G(row, n) = -1.0;
  ++row;
  for_each_soc(sf, [&](int off, int q) {
    ph.G.block(row, 0, q, n) = sf.G.block(off, 0, q, n);
    ph.G(row, n) = -1.0;
    ph.h.segment(row, q) = sf.h.segment(off, q);
    row += q;
  });

  const CoreResult r = interior_point(ph, tol);
  ok = r.status == Status::Optimal;
  return r.x(n);
}

}  // namespace

Solution solve(const ConicProgram& prog, const ToleranceSettings& tol) {
  prog.validate();
  if (!(tol.feasibility > 0.0) || !(tol.optimality > 0.0) ||
      tol.max_iterations < 1) {
    throw InvalidArgument("tolerances must be positive");
  }
  const StandardForm sf = to_standard_form(prog);
  const CoreResult core = interior_point(sf, tol);

  Solution sol;
  sol.status = core.status;
  sol.iterations = core.iterations;
  sol.x = core.x;
  if (core.status != Status::Optimal) {
    bool ok = false;
    const double viol = phase_one_violation(sf, tol, ok);
    if (ok && viol > tol.infeasibility_threshold) {
      sol.status = Status::Infeasible;
    }
  }
  sol.objective = prog.objective().dot(sol.x);
  sol.max_primal_residual = check(prog, sol.x, 0.0).worst_violation;
  return sol;
}

}  // namespace ddcc::conic
