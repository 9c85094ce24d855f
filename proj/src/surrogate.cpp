#include "ddcc/surrogate.hpp"

#include <cmath>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "ddcc/errors.hpp"

namespace ddcc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

ChanceSpec ChanceSpec::identity(int dim, double alpha) {
  ChanceSpec s;
  s.map = MatrixXd::Identity(dim, dim);
  s.alpha = alpha;
  return s;
}

void ChanceSpec::validate() const {
  if (map.rows() == 0 || map.cols() == 0) {
    throw InvalidArgument("chance constraint map must be nonempty");
  }
  if (!map.allFinite() || !std::isfinite(offset)) {
    throw InvalidArgument("chance constraint data must be finite");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidArgument("alpha must lie in (0, 1)");
  }
}

// ---------------------------------------------------------------------------
// SurrogateBlocks

namespace {

VectorXd padded(const VectorXd& v, int n) {
  VectorXd out = VectorXd::Zero(n);
  out.head(v.size()) = v;
  return out;
}

MatrixXd padded_cols(const MatrixXd& m, int n) {
  MatrixXd out = MatrixXd::Zero(m.rows(), n);
  out.leftCols(m.cols()) = m;
  return out;
}

}  // namespace

VectorXd SurrogateBlocks::complete(const VectorXd& x) const {
  if (x.size() != decision_dim) {
    throw InvalidArgument("decision length does not match the surrogate");
  }
  VectorXd v = VectorXd::Zero(num_vars());
  v.head(decision_dim) = x;
  for (std::size_t j = 0; j < aux.size(); ++j) {
    const AuxVar& a = aux[j];
    const VectorXd w = a.W * v + a.b;
    double value = 0.0;
    switch (a.rule) {
      case AuxRule::Abs:
        value = std::abs(w(0));
        break;
      case AuxRule::Norm:
        value = w.norm();
        break;
      case AuxRule::Max:
        value = w.maxCoeff();
        break;
      case AuxRule::Min:
        value = w.minCoeff();
        break;
      case AuxRule::Linear:
        value = w(0);
        break;
    }
    v(decision_dim + static_cast<int>(j)) = value;
  }
  return v;
}

double SurrogateBlocks::main_value(const VectorXd& v) const {
  if (v.size() != num_vars()) {
    throw InvalidArgument("variable vector length does not match the surrogate");
  }
  if (main_kind == MainKind::Linear) {
    const auto& r = linear.at(static_cast<std::size_t>(main_index));
    return r.coeffs.dot(v) + r.constant;
  }
  const auto& r = soc.at(static_cast<std::size_t>(main_index));
  return (r.A * v + r.b).norm() - (r.c.dot(v) + r.e);
}

double SurrogateBlocks::value_at(const VectorXd& x) const {
  return main_value(complete(x));
}

conic::CheckResult SurrogateBlocks::check(const VectorXd& v, double tol) const {
  if (v.size() != num_vars()) {
    throw InvalidArgument("variable vector length does not match the surrogate");
  }
  double worst = 0.0;
  for (const auto& r : linear) {
    const double val = r.coeffs.dot(v) + r.constant;
    worst = std::max(worst, r.relation == conic::Relation::Equal ? std::abs(val) : val);
  }
  for (const auto& r : soc) {
    worst = std::max(worst, (r.A * v + r.b).norm() - (r.c.dot(v) + r.e));
  }
  return {worst <= tol, worst};
}

bool SurrogateBlocks::feasible(const VectorXd& x, double tol) const {
  return check(complete(x), tol).feasible;
}

conic::ConicProgram SurrogateBlocks::to_program() const {
  conic::ConicProgram prog(num_vars());
  for (const auto& r : linear) prog.add_linear(r);
  for (const auto& r : soc) prog.add_soc(r);
  return prog;
}

namespace {

const char* rule_name(AuxRule r) {
  switch (r) {
    case AuxRule::Abs:
      return "abs";
    case AuxRule::Norm:
      return "norm";
    case AuxRule::Max:
      return "max";
    case AuxRule::Min:
      return "min";
    case AuxRule::Linear:
      return "linear";
  }
  return "unknown";
}

}  // namespace

nlohmann::json SurrogateBlocks::to_json() const {
  conic::ConicProgram prog = to_program();
  nlohmann::json pj = prog.to_json();
  nlohmann::json j;
  j["method"] = method;
  j["decision_dim"] = decision_dim;
  j["num_vars"] = num_vars();
  auto aux_j = nlohmann::json::array();
  for (const auto& a : aux) {
    aux_j.push_back({{"role", a.role}, {"rule", rule_name(a.rule)}});
  }
  j["aux"] = aux_j;
  j["linear"] = pj["linear"];
  j["soc"] = pj["soc"];
  j["main"] = {{"kind", main_kind == MainKind::Linear ? "linear" : "soc"},
               {"index", main_index}};
  return j;
}

// ---------------------------------------------------------------------------
// Construction helpers

namespace {

double general_constant(double alpha) { return std::sqrt((1.0 - alpha) / alpha); }
double independent_constant(double alpha) {
  return std::sqrt(0.5 * std::log(1.0 / alpha));
}

// Accumulates variables and rows; vectors grow as aux variables are added and
// are padded to the final width in finish().
class Builder {
 public:
  Builder(std::string method, int decision_dim) {
    blocks_.method = std::move(method);
    blocks_.decision_dim = decision_dim;
  }

  int width() const { return blocks_.num_vars(); }

  int add_aux(std::string role, AuxRule rule, MatrixXd W, VectorXd b) {
    blocks_.aux.push_back({std::move(role), rule, std::move(W), std::move(b)});
    return width() - 1;
  }

  VectorXd unit(int idx) const {
    VectorXd e = VectorXd::Zero(width());
    e(idx) = 1.0;
    return e;
  }

  void add_le(VectorXd coeffs, double constant) {
    blocks_.linear.push_back({std::move(coeffs), constant, conic::Relation::LessEqual});
  }

  void add_soc(MatrixXd A, VectorXd b, VectorXd c, double e) {
    blocks_.soc.push_back({std::move(A), std::move(b), std::move(c), e});
  }

  void main_linear(VectorXd coeffs, double constant) {
    add_le(std::move(coeffs), constant);
    blocks_.main_kind = SurrogateBlocks::MainKind::Linear;
    blocks_.main_index = static_cast<int>(blocks_.linear.size()) - 1;
  }

  void main_soc(MatrixXd A, VectorXd b, VectorXd c, double e) {
    add_soc(std::move(A), std::move(b), std::move(c), e);
    blocks_.main_kind = SurrogateBlocks::MainKind::Soc;
    blocks_.main_index = static_cast<int>(blocks_.soc.size()) - 1;
  }

  SurrogateBlocks finish() {
    const int n = width();
    for (auto& a : blocks_.aux) a.W = padded_cols(a.W, n);
    for (auto& r : blocks_.linear) r.coeffs = padded(r.coeffs, n);
    for (auto& r : blocks_.soc) {
      r.A = padded_cols(r.A, n);
      r.c = padded(r.c, n);
    }
    return std::move(blocks_);
  }

 private:
  SurrogateBlocks blocks_;
};

// Adds the lifting variables of r(M x) and returns coefficients (over the
// variables so far) of a linear expression equal to r(M x) at tight aux values.
VectorXd lift_radius(Builder& bld, const SupportSet& support, const MatrixXd& M) {
  switch (support.kind()) {
    case SupportSet::Kind::Box: {
      const MatrixXd SM = support.widths().asDiagonal() * M;
      std::vector<int> t;
      for (Eigen::Index i = 0; i < SM.rows(); ++i) {
        const VectorXd row = SM.row(i).transpose();
        const int idx = bld.add_aux("abs_lift", AuxRule::Abs, row.transpose(),
                                    VectorXd::Zero(1));
        bld.add_le(padded(row, bld.width()) - bld.unit(idx), 0.0);
        bld.add_le(-padded(row, bld.width()) - bld.unit(idx), 0.0);
        t.push_back(idx);
      }
      VectorXd r = VectorXd::Zero(bld.width());
      for (int idx : t) r(idx) = 0.5;
      return r;
    }
    case SupportSet::Kind::Polytope: {
      const MatrixXd P = support.vertices().transpose() * M;
      const int u = bld.add_aux("envelope_upper", AuxRule::Max, P,
                                VectorXd::Zero(P.rows()));
      const int l = bld.add_aux("envelope_lower", AuxRule::Min, P,
                                VectorXd::Zero(P.rows()));
      for (Eigen::Index k = 0; k < P.rows(); ++k) {
        const VectorXd row = padded(P.row(k).transpose(), bld.width());
        bld.add_le(row - bld.unit(u), 0.0);
        bld.add_le(bld.unit(l) - row, 0.0);
      }
      VectorXd r = VectorXd::Zero(bld.width());
      r(u) = 0.5;
      r(l) = -0.5;
      return r;
    }
    case SupportSet::Kind::Ellipsoid: {
      const MatrixXd W = support.inverse_factor() * M;
      const int q = bld.add_aux("ellipsoid_norm", AuxRule::Norm, W,
                                VectorXd::Zero(W.rows()));
      bld.add_soc(W, VectorXd::Zero(W.rows()), bld.unit(q), 0.0);
      return bld.unit(q);
    }
  }
  return VectorXd();
}

// || g L' M x || <= -mu' M x - d, or the linear row when g L = 0.
SurrogateBlocks known_blocks(std::string method, const VectorXd& mu,
                             const MatrixXd& L, double g, const ChanceSpec& spec) {
  Builder bld(std::move(method), spec.decision_dim());
  const VectorXd mu_x = spec.map.transpose() * mu;
  const MatrixXd A = g * (L.transpose() * spec.map);
  if (A.isZero(0.0)) {
    bld.main_linear(mu_x, spec.offset);
  } else {
    bld.main_soc(A, VectorXd::Zero(A.rows()), -mu_x, -spec.offset);
  }
  return bld.finish();
}

void check_dims(const ChanceSpec& spec, Eigen::Index random_dim) {
  spec.validate();
  if (random_dim != spec.random_dim()) {
    throw InvalidArgument("moment dimension " + std::to_string(random_dim) +
                          " does not match the map's row count " +
                          std::to_string(spec.random_dim()));
  }
}

void check_support(const ChanceSpec& spec, const SupportSet& support) {
  if (support.dim() != spec.random_dim()) {
    throw InvalidArgument("support dimension does not match the map's row count");
  }
}

void check_box(const ChanceSpec& spec, const SupportSet& box) {
  if (box.kind() != SupportSet::Kind::Box) {
    throw InvalidArgument("the independent surrogates need a box support");
  }
  check_support(spec, box);
}

void check_schedule(const ScheduleResult& sched, const ChanceSpec& spec) {
  if (!sched.feasible) {
    throw NotEnoughSamples("schedule " + to_string(sched.method) +
                           " is not feasible at N=" + std::to_string(sched.n));
  }
  if (std::abs(sched.alpha - spec.alpha) > 1e-15) {
    throw InvalidArgument("schedule alpha differs from the constraint's alpha");
  }
  if (!(sched.phi >= 0.0) || !std::isfinite(sched.phi)) {
    throw InvalidArgument("schedule phi must be finite and nonnegative");
  }
}

double need_kappa(const ScheduleResult& sched) {
  if (!sched.kappa || !(*sched.kappa >= 1.0) || !std::isfinite(*sched.kappa)) {
    throw InvalidArgument("schedule lacks a finite kappa >= 1");
  }
  return *sched.kappa;
}

double need_nu(const ScheduleResult& sched) {
  if (!sched.nu || !(*sched.nu >= 0.0) || !std::isfinite(*sched.nu)) {
    throw InvalidArgument("schedule lacks a finite nu >= 0");
  }
  return *sched.nu;
}

void need_full(const MomentState& state) {
  if (state.mode() != MomentMode::Full) {
    throw InvalidArgument("this surrogate needs a full-covariance moment state");
  }
}

double quad(const MatrixXd& sigma, const VectorXd& z) {
  return std::max(0.0, z.dot(sigma * z));
}

}  // namespace

MatrixXd psd_factor(const MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0) {
    throw InvalidArgument("covariance must be a nonempty square matrix");
  }
  if (!sigma.allFinite()) throw InvalidArgument("covariance must be finite");
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArgument("covariance must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (sigma + sigma.transpose()));
  const VectorXd& lam = eig.eigenvalues();
  const double top = std::max(1.0, lam.cwiseAbs().maxCoeff());
  if (lam.minCoeff() < -1e-10 * top) {
    throw InvalidArgument("covariance is not positive semidefinite");
  }
  return eig.eigenvectors() * lam.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

// ---------------------------------------------------------------------------
// Builders

SurrogateBlocks build_known(const VectorXd& mu, const MatrixXd& sigma,
                            const ChanceSpec& spec) {
  check_dims(spec, mu.size());
  if (sigma.rows() != mu.size()) {
    throw InvalidArgument("covariance dimension does not match the mean");
  }
  return known_blocks("known", mu, psd_factor(sigma), general_constant(spec.alpha),
                      spec);
}

SurrogateBlocks build_known_ind(const VectorXd& mu, const SupportSet& box,
                                const ChanceSpec& spec, IndependentNorm norm) {
  check_dims(spec, mu.size());
  check_box(spec, box);
  const double g = independent_constant(spec.alpha);
  if (norm == IndependentNorm::L2) {
    return known_blocks("known_ind_l2", mu, box.widths().asDiagonal(), g, spec);
  }
  Builder bld("known_ind", spec.decision_dim());
  const VectorXd r = lift_radius(bld, box, spec.map);
  const VectorXd mu_x = padded(spec.map.transpose() * mu, bld.width());
  bld.main_linear(mu_x + (2.0 * g) * r, spec.offset);
  return bld.finish();
}

SurrogateBlocks build_known_ind_var(const VectorXd& mu, const VectorXd& variance,
                                    const ChanceSpec& spec) {
  check_dims(spec, mu.size());
  if (variance.size() != mu.size() || (variance.array() < 0.0).any() ||
      !variance.allFinite()) {
    throw InvalidArgument("variances must be finite, nonnegative, one per coordinate");
  }
  return known_blocks("known_ind_var", mu, variance.cwiseSqrt().asDiagonal(),
                      general_constant(spec.alpha), spec);
}

SurrogateBlocks build_plugin(const MomentState& state, const ChanceSpec& spec) {
  need_full(state);
  check_dims(spec, state.dim());
  const Moments m = state.extract();
  return known_blocks("plugin", m.mean, psd_factor(m.covariance),
                      general_constant(spec.alpha), spec);
}

SurrogateBlocks build_thm1(const MomentState& state, const SupportSet& support,
                           const ChanceSpec& spec, const ScheduleResult& sched) {
  need_full(state);
  check_dims(spec, state.dim());
  check_support(spec, support);
  check_schedule(sched, spec);
  const double kappa = need_kappa(sched);
  const double phi = sched.phi;
  const Moments m = state.extract();
  const MatrixXd L = psd_factor(m.covariance);
  const double g = general_constant(spec.alpha);
  if (phi == 0.0) {
    return known_blocks("thm1", m.mean, L, kappa * g, spec);
  }

  Builder bld("thm1", spec.decision_dim());
  const VectorXd r = lift_radius(bld, support, spec.map);
  const MatrixXd LM = L.transpose() * spec.map;
  const int y1 = bld.add_aux("y1", AuxRule::Norm, LM, VectorXd::Zero(LM.rows()));
  bld.add_soc(LM, VectorXd::Zero(LM.rows()), bld.unit(y1), 0.0);
  const VectorXd y2_def = std::sqrt(2.0 * phi) * padded(r, bld.width());
  const int y2 = bld.add_aux("y2", AuxRule::Linear, y2_def.transpose(),
                             VectorXd::Zero(1));
  bld.add_le(padded(y2_def, bld.width()) - bld.unit(y2), 0.0);

  MatrixXd A = MatrixXd::Zero(2, bld.width());
  A(0, y1) = kappa * g;
  A(1, y2) = kappa * g;
  const VectorXd c = -padded(spec.map.transpose() * m.mean, bld.width()) -
                     phi * padded(r, bld.width());
  bld.main_soc(A, VectorXd::Zero(2), c, -spec.offset);
  return bld.finish();
}

SurrogateBlocks build_fixed_delta(const MomentState& state, const SupportSet& support,
                                  const ChanceSpec& spec, double delta,
                                  FixedDeltaOptions opts) {
  need_full(state);
  check_dims(spec, state.dim());
  check_support(spec, support);
  if (!(delta > 0.0 && delta < spec.alpha)) {
    throw InvalidArgument("delta must lie in (0, alpha)");
  }
  if (state.count() == 0) throw EmptyState("no samples have been seen");
  if (!confidence_bounds(0.0, state.count(), delta).sample_condition) {
    throw NotEnoughSamples("too few samples for the fixed-delta confidence bounds");
  }
  const Moments m = state.extract();
  const double rn = std::sqrt(static_cast<double>(m.count));
  const double c1 = 2.0 + std::sqrt(2.0 * std::log((opts.widen_mean_term ? 4.0 : 2.0) / delta));
  const double c2 = 2.0 + std::sqrt(2.0 * std::log(4.0 / delta));
  const double g = std::sqrt((1.0 - spec.alpha) / (spec.alpha - delta));

  Builder bld("fixed_delta", spec.decision_dim());
  const VectorXd r = lift_radius(bld, support, spec.map);
  const MatrixXd LM = psd_factor(m.covariance).transpose() * spec.map;
  MatrixXd A = MatrixXd::Zero(LM.rows() + 1, bld.width());
  A.topLeftCorner(LM.rows(), LM.cols()) = g * LM;
  A.row(LM.rows()) = (g * std::sqrt(2.0 * c2 / rn)) * r.transpose();
  const VectorXd c = -padded(spec.map.transpose() * m.mean, bld.width()) - (c1 / rn) * r;
  bld.main_soc(A, VectorXd::Zero(A.rows()), c, -spec.offset);
  return bld.finish();
}

SurrogateBlocks build_ind_mean(const MomentState& state, const SupportSet& box,
                               const ChanceSpec& spec, const ScheduleResult& sched) {
  check_dims(spec, state.dim());
  check_box(spec, box);
  check_schedule(sched, spec);
  const double nu = need_nu(sched);
  const double k = 0.5 * sched.phi + std::sqrt(0.5 * std::log(1.0 / spec.alpha) + nu);
  if (state.count() == 0) throw EmptyState("no samples have been seen");

  Builder bld("ind_mean", spec.decision_dim());
  const VectorXd r = lift_radius(bld, box, spec.map);
  const VectorXd mu_x = padded(spec.map.transpose() * state.mean(), bld.width());
  // ||S M x||_1 = 2 r
  bld.main_linear(mu_x + (2.0 * k) * r, spec.offset);
  return bld.finish();
}

SurrogateBlocks build_ind_var(const MomentState& state, const SupportSet& box,
                              const ChanceSpec& spec, const ScheduleResult& sched) {
  check_dims(spec, state.dim());
  check_box(spec, box);
  check_schedule(sched, spec);
  const double kappa = need_kappa(sched);
  const double phi = sched.phi;
  const Moments m = state.extract();
  const MatrixXd D = m.variance.cwiseSqrt().asDiagonal();
  const double g = general_constant(spec.alpha);
  if (phi == 0.0) {
    return known_blocks("ind_var", m.mean, D, kappa * g, spec);
  }

  Builder bld("ind_var", spec.decision_dim());
  const VectorXd r = lift_radius(bld, box, spec.map);
  const MatrixXd DM = D * spec.map;
  const int y1 = bld.add_aux("y1", AuxRule::Norm, DM, VectorXd::Zero(DM.rows()));
  bld.add_soc(DM, VectorXd::Zero(DM.rows()), bld.unit(y1), 0.0);
  // sqrt(phi/2) ||S M x||_1 = sqrt(phi/2) 2 r
  const VectorXd y2_def = (2.0 * std::sqrt(0.5 * phi)) * padded(r, bld.width());
  const int y2 = bld.add_aux("y2", AuxRule::Linear, y2_def.transpose(),
                             VectorXd::Zero(1));
  bld.add_le(padded(y2_def, bld.width()) - bld.unit(y2), 0.0);

  MatrixXd A = MatrixXd::Zero(2, bld.width());
  A(0, y1) = kappa * g;
  A(1, y2) = kappa * g;
  // (phi/2) ||S M x||_1 = phi r
  const VectorXd c = -padded(spec.map.transpose() * m.mean, bld.width()) -
                     phi * padded(r, bld.width());
  bld.main_soc(A, VectorXd::Zero(2), c, -spec.offset);
  return bld.finish();
}

BestOfBoth best_of_both(const MomentState& state, const SupportSet& box,
                        const ChanceSpec& spec, const SurrogateObjective& objective,
                        conic::Sense sense) {
  spec.validate();
  const std::int64_t n = state.count();
  if (n < 2) {
    throw NotEnoughSamples("the independent surrogates need at least two samples");
  }
  BestOfBoth out{build_ind_mean(state, box, spec, schedule_cor2(n, spec.alpha)),
                 std::nullopt, std::nullopt, std::nullopt};
  out.ind_mean_objective = objective(out.blocks);
  out.objective = out.ind_mean_objective;

  const ScheduleResult var_sched = schedule_cor3(n, spec.alpha);
  if (!var_sched.feasible) return out;
  SurrogateBlocks var_blocks = build_ind_var(state, box, spec, var_sched);
  out.ind_var_objective = objective(var_blocks);
  if (!out.ind_var_objective) return out;
  const bool better =
      !out.objective ||
      (sense == conic::Sense::Maximize ? *out.ind_var_objective > *out.objective
                                       : *out.ind_var_objective < *out.objective);
  if (better) {
    out.blocks = std::move(var_blocks);
    out.objective = out.ind_var_objective;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Collapsed forms

namespace displayed {

namespace {
VectorXd lifted(const ChanceSpec& spec, const VectorXd& x) {
  if (x.size() != spec.decision_dim()) {
    throw InvalidArgument("decision length does not match the map");
  }
  return spec.map * x;
}
}  // namespace

double known(const VectorXd& mu, const MatrixXd& sigma, const ChanceSpec& spec,
             const VectorXd& x) {
  const VectorXd z = lifted(spec, x);
  return mu.dot(z) + spec.offset +
         general_constant(spec.alpha) * std::sqrt(quad(sigma, z));
}

double known_ind(const VectorXd& mu, const SupportSet& box, const ChanceSpec& spec,
                 const VectorXd& x, IndependentNorm norm) {
  const VectorXd sz = box.widths().cwiseProduct(lifted(spec, x));
  const double nrm = norm == IndependentNorm::L1 ? sz.lpNorm<1>() : sz.norm();
  return mu.dot(lifted(spec, x)) + spec.offset + independent_constant(spec.alpha) * nrm;
}

double known_ind_var(const VectorXd& mu, const VectorXd& variance,
                     const ChanceSpec& spec, const VectorXd& x) {
  const VectorXd z = lifted(spec, x);
  return mu.dot(z) + spec.offset +
         general_constant(spec.alpha) * variance.cwiseSqrt().cwiseProduct(z).norm();
}

double thm1(const Moments& m, const SupportSet& support, const ChanceSpec& spec,
            const ScheduleResult& sched, const VectorXd& x) {
  const VectorXd z = lifted(spec, x);
  const double r = support.radius(z);
  const double phi = sched.phi;
  return m.mean.dot(z) + spec.offset + phi * r +
         need_kappa(sched) * general_constant(spec.alpha) *
             std::sqrt(quad(m.covariance, z) + 2.0 * phi * r * r);
}

double fixed_delta(const Moments& m, const SupportSet& support, const ChanceSpec& spec,
                   double delta, const VectorXd& x, FixedDeltaOptions opts) {
  const VectorXd z = lifted(spec, x);
  const double r = support.radius(z);
  const double rn = std::sqrt(static_cast<double>(m.count));
  const double c1 = 2.0 + std::sqrt(2.0 * std::log((opts.widen_mean_term ? 4.0 : 2.0) / delta));
  const double c2 = 2.0 + std::sqrt(2.0 * std::log(4.0 / delta));
  return m.mean.dot(z) + spec.offset + r / rn * c1 +
         std::sqrt((1.0 - spec.alpha) / (spec.alpha - delta)) *
             std::sqrt(quad(m.covariance, z) + 2.0 * r * r / rn * c2);
}

double ind_mean(const Moments& m, const SupportSet& box, const ChanceSpec& spec,
                const ScheduleResult& sched, const VectorXd& x) {
  const VectorXd z = lifted(spec, x);
  const double l1 = box.widths().cwiseProduct(z).lpNorm<1>();
  return m.mean.dot(z) + spec.offset +
         (0.5 * sched.phi + std::sqrt(0.5 * std::log(1.0 / spec.alpha) + need_nu(sched))) * l1;
}

double ind_var(const Moments& m, const SupportSet& box, const ChanceSpec& spec,
               const ScheduleResult& sched, const VectorXd& x) {
  const VectorXd z = lifted(spec, x);
  const double l1 = box.widths().cwiseProduct(z).lpNorm<1>();
  const double dz = m.variance.cwiseSqrt().cwiseProduct(z).squaredNorm();
  return m.mean.dot(z) + spec.offset + 0.5 * sched.phi * l1 +
         need_kappa(sched) * general_constant(spec.alpha) *
             std::sqrt(dz + 0.5 * sched.phi * l1 * l1);
}

}  // namespace displayed

}  // namespace ddcc
