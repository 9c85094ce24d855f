#pragma once

// Deterministic linear + second-order-cone surrogates of the chance
// constraint  Pr(a'(M x) + d <= 0) >= 1 - alpha.
//
// Every builder returns a SurrogateBlocks over the variable vector
// v = (x, aux), where x is the decision (length M.cols()) and aux are lifting
// variables. Each aux variable carries the rule that gives its tightest
// feasible value, so complete(x) maps a decision to a full variable vector.

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ddcc/conic.hpp"
#include "ddcc/moments.hpp"
#include "ddcc/schedules.hpp"
#include "ddcc/support_sets.hpp"

namespace ddcc {

struct ChanceSpec {
  Eigen::MatrixXd map;  // M: random_dim x decision_dim
  double offset = 0.0;  // d
  double alpha = 0.1;

  int random_dim() const { return static_cast<int>(map.rows()); }
  int decision_dim() const { return static_cast<int>(map.cols()); }
  /// Identity map, zero offset.
  static ChanceSpec identity(int dim, double alpha);
  void validate() const;
};

enum class AuxRule {
  Abs,     // |W v + b| (W has one row)
  Norm,    // ||W v + b||
  Max,     // max_k (W v + b)_k
  Min,     // min_k (W v + b)_k
  Linear,  // W v + b (W has one row)
};

struct AuxVar {
  std::string role;
  AuxRule rule = AuxRule::Linear;
  Eigen::MatrixXd W;  // over the full variable vector; only earlier columns used
  Eigen::VectorXd b;
};

struct SurrogateBlocks {
  enum class MainKind { Linear, Soc };

  std::string method;
  int decision_dim = 0;
  std::vector<AuxVar> aux;
  std::vector<conic::LinearRow> linear;
  std::vector<conic::SocRow> soc;
  MainKind main_kind = MainKind::Linear;
  int main_index = 0;

  int num_vars() const { return decision_dim + static_cast<int>(aux.size()); }

  /// (x, tightest aux values).
  Eigen::VectorXd complete(const Eigen::VectorXd& x) const;
  /// Value of the main row, written as lhs - rhs (<= 0 means satisfied).
  double main_value(const Eigen::VectorXd& v) const;
  /// main_value(complete(x)): the collapsed scalar form of the surrogate.
  double value_at(const Eigen::VectorXd& x) const;
  /// Worst violation over every row at the full vector v.
  conic::CheckResult check(const Eigen::VectorXd& v, double tol = 1e-9) const;
  /// check(complete(x)).
  bool feasible(const Eigen::VectorXd& x, double tol = 1e-9) const;

  /// Program over num_vars() variables holding every row; no objective.
  conic::ConicProgram to_program() const;

  nlohmann::json to_json() const;
};

/// Symmetric factor L (L L' = sigma) by eigendecomposition, negative
/// eigenvalues clipped to zero. Throws InvalidArgument if sigma is not
/// symmetric or has an eigenvalue below -1e-10 max(1, |lambda|_max).
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& sigma);

/// Which norm multiplies the independent-case constant in the known-moment
/// independent constraint.
enum class IndependentNorm { L1, L2 };

// Known moments.
SurrogateBlocks build_known(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                            const ChanceSpec& spec);
SurrogateBlocks build_known_ind(const Eigen::VectorXd& mu, const SupportSet& box,
                                const ChanceSpec& spec,
                                IndependentNorm norm = IndependentNorm::L1);
SurrogateBlocks build_known_ind_var(const Eigen::VectorXd& mu,
                                    const Eigen::VectorXd& variance,
                                    const ChanceSpec& spec);

// Data driven.
SurrogateBlocks build_plugin(const MomentState& state, const ChanceSpec& spec);
SurrogateBlocks build_thm1(const MomentState& state, const SupportSet& support,
                           const ChanceSpec& spec, const ScheduleResult& sched);

struct FixedDeltaOptions {
  /// Use ln(4/delta) instead of ln(2/delta) in the mean term.
  bool widen_mean_term = false;
};
SurrogateBlocks build_fixed_delta(const MomentState& state, const SupportSet& support,
                                  const ChanceSpec& spec, double delta,
                                  FixedDeltaOptions opts = {});
SurrogateBlocks build_ind_mean(const MomentState& state, const SupportSet& box,
                               const ChanceSpec& spec, const ScheduleResult& sched);
SurrogateBlocks build_ind_var(const MomentState& state, const SupportSet& box,
                              const ChanceSpec& spec, const ScheduleResult& sched);

/// Objective of the caller's problem under the given blocks; nullopt when
/// the problem could not be solved.
using SurrogateObjective =
    std::function<std::optional<double>(const SurrogateBlocks&)>;

struct BestOfBoth {
  SurrogateBlocks blocks;
  std::optional<double> objective;
  std::optional<double> ind_mean_objective;
  std::optional<double> ind_var_objective;
};

/// Builds the independent-mean surrogate (automatic-p schedule) and, when its
/// schedule is feasible, the independent-variance surrogate; returns the one
/// with the better objective (larger for Maximize).
BestOfBoth best_of_both(const MomentState& state, const SupportSet& box,
                        const ChanceSpec& spec, const SurrogateObjective& objective,
                        conic::Sense sense = conic::Sense::Maximize);

// Collapsed scalar forms, evaluated directly (no lifting variables). Values
// <= 0 mean the surrogate holds at x.
namespace displayed {
double known(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
             const ChanceSpec& spec, const Eigen::VectorXd& x);
double known_ind(const Eigen::VectorXd& mu, const SupportSet& box,
                 const ChanceSpec& spec, const Eigen::VectorXd& x,
                 IndependentNorm norm = IndependentNorm::L1);
double known_ind_var(const Eigen::VectorXd& mu, const Eigen::VectorXd& variance,
                     const ChanceSpec& spec, const Eigen::VectorXd& x);
double thm1(const Moments& m, const SupportSet& support, const ChanceSpec& spec,
            const ScheduleResult& sched, const Eigen::VectorXd& x);
double fixed_delta(const Moments& m, const SupportSet& support, const ChanceSpec& spec,
                   double delta, const Eigen::VectorXd& x, FixedDeltaOptions opts = {});
double ind_mean(const Moments& m, const SupportSet& box, const ChanceSpec& spec,
                const ScheduleResult& sched, const Eigen::VectorXd& x);
double ind_var(const Moments& m, const SupportSet& box, const ChanceSpec& spec,
               const ScheduleResult& sched, const Eigen::VectorXd& x);
}  // namespace displayed

}  // namespace ddcc
