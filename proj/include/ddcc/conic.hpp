#pragma once

// Conic program model (linear objective, linear rows, second-order cones,
// optional lower bounds) and a dense primal-dual interior-point solver.
//
// Sizes targeted here are tiny (tens of variables), so everything is dense.

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace ddcc::conic {

enum class Sense { Minimize, Maximize };
enum class Relation { LessEqual, Equal };

/// coeffs . v + constant  (<= | ==)  0
struct LinearRow {
  Eigen::VectorXd coeffs;
  double constant = 0.0;
  Relation relation = Relation::LessEqual;
};

/// || A v + b ||_2 <= c . v + e
struct SocRow {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  double e = 0.0;
};

class ConicProgram {
 public:
  explicit ConicProgram(int num_vars);

  int num_vars() const { return num_vars_; }

  void set_objective(Eigen::VectorXd coeffs, Sense sense);
  const Eigen::VectorXd& objective() const { return objective_; }
  Sense sense() const { return sense_; }

  void add_linear(LinearRow row);
  void add_linear_le(Eigen::VectorXd coeffs, double constant);
  void add_linear_eq(Eigen::VectorXd coeffs, double constant);
  void add_soc(SocRow row);
  void set_lower_bound(int var, double lower);

  const std::vector<LinearRow>& linear_rows() const { return linear_; }
  const std::vector<SocRow>& soc_rows() const { return soc_; }
  const std::vector<std::optional<double>>& lower_bounds() const {
    return lower_;
  }

  /// Throws InvalidArgument on inconsistent dimensions or non-finite data.
  void validate() const;

  nlohmann::json to_json() const;
  static ConicProgram from_json(const nlohmann::json& j);

 private:
  int num_vars_;
  Eigen::VectorXd objective_;
  Sense sense_ = Sense::Minimize;
  std::vector<LinearRow> linear_;
  std::vector<SocRow> soc_;
  std::vector<std::optional<double>> lower_;
};

enum class Status { Optimal, Infeasible, IterationLimit, NumericalFailure };

std::string to_string(Status s);
std::ostream& operator<<(std::ostream& os, Status s);

struct ToleranceSettings {
  double feasibility = 1e-8;
  double optimality = 1e-8;
  int max_iterations = 200;
  /// Phase-1 minimal violation above which a failed solve is declared
  /// infeasible.
  double infeasibility_threshold = 1e-6;
};

struct Solution {
  Status status = Status::NumericalFailure;
  Eigen::VectorXd x;
  double objective = 0.0;
  double max_primal_residual = 0.0;
  int iterations = 0;
};

Solution solve(const ConicProgram& prog, const ToleranceSettings& tol = {});

struct CheckResult {
  bool feasible = false;
  double worst_violation = 0.0;
};

/// Evaluates every row of `prog` at `candidate`; does not touch the solver.
CheckResult check(const ConicProgram& prog, const Eigen::VectorXd& candidate,
                  double feas_tol = 1e-8);

}  // namespace ddcc::conic
