#pragma once

// Correlated-wager benchmark: two independent games with two wagers each.
// A bettor splits at most one unit of bankroll across the four wagers and
// must keep the probability of the loss event below alpha.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ddcc/conic.hpp"
#include "ddcc/moments.hpp"
#include "ddcc/support_sets.hpp"
#include "ddcc/surrogate.hpp"

namespace ddcc::betting {

enum class ThresholdMode {
  LossBeta,      // loss event a'x < -beta
  LiteralPaper,  // loss event a'x < beta
};

std::string to_string(ThresholdMode m);
/// "loss-beta" or "literal-paper".
ThresholdMode parse_threshold_mode(const std::string& s);

struct BettingConfig {
  Eigen::VectorXd rho = (Eigen::VectorXd(4) << 0.75, 0.6, 0.7, 0.4).finished();
  Eigen::VectorXd abar = (Eigen::VectorXd(4) << 0.5, 0.95, 0.6, 2.1).finished();
  double alpha = 0.2;
  double beta = 0.1;
  ThresholdMode mode = ThresholdMode::LossBeta;
  int games = 2;
  int wagers_per_game = 2;

  int dim() const { return games * wagers_per_game; }
  void validate() const;
  /// d in Pr(-a'x + d <= 0) >= 1 - alpha.
  double offset() const;
  /// M = -I, offset(), alpha.
  ChanceSpec spec() const;
  /// Box [-1, abar]: the exact outcome range.
  SupportSet support() const;
};

/// abar if u >= 1 - rho, else -1.
double wager_outcome(double u, double rho, double abar);

/// count x dim outcomes; each row uses one uniform per game.
Eigen::MatrixXd sample_batch(const BettingConfig& cfg, std::uint64_t seed, int count);

struct TrueMoments {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
};
/// Exact mean and covariance by integrating over the breakpoints of u.
TrueMoments true_moments(const BettingConfig& cfg);

/// maximize objective_mean' x subject to the blocks, 1'x <= 1, x >= 0.
conic::ConicProgram assemble_problem(const BettingConfig& cfg, const SurrogateBlocks& blocks,
                                     const Eigen::VectorXd& objective_mean);

struct Evaluation {
  double reward = 0.0;
  double violation = 0.0;
};
Evaluation evaluate(const Eigen::VectorXd& x, const Eigen::MatrixXd& test_samples,
                    const BettingConfig& cfg);

enum class MethodKind { Plugin, Cor1, Thm1, FixedDelta, Oracle };

struct Method {
  MethodKind kind = MethodKind::Cor1;
  double param = 0.0;  // p for Thm1, delta for FixedDelta

  /// "plugin", "cor1", "thm1:3", "fixed_delta:0.1", "oracle".
  std::string tag() const;
  static Method parse(const std::string& tag);
};

/// Stable 64-bit hash of (master, label, n, trial).
std::uint64_t derive_seed(std::uint64_t master, const std::string& label, std::int64_t n,
                          std::int64_t trial);

/// The method's surrogate over the wager vector; `objective` receives the mean
/// used in the objective (sample mean, or the true mean for Oracle). Throws
/// NotEnoughSamples when the method's schedule is infeasible at this N.
SurrogateBlocks build_surrogate(const BettingConfig& cfg, const Method& method,
                                const MomentState& state, Eigen::VectorXd& objective);

struct MethodSolve {
  std::string status;  // solver status, "not_enough_samples" or "infeasible"
  bool fallback = false;  // x replaced by 0
  Eigen::VectorXd x;
  std::optional<double> objective;
};

/// Builds the method's surrogate from `state` (ignored for Oracle), solves, and
/// falls back to x = 0 when the schedule or the solver gives no answer.
MethodSolve solve_method(const BettingConfig& cfg, const Method& method,
                         const MomentState& state,
                         const conic::ToleranceSettings& tol = {});

struct TrialResult {
  std::string method;
  std::int64_t n = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::string status;
  bool fallback = false;
  Eigen::VectorXd x;
  double reward = 0.0;
  double violation = 0.0;
  double time_ms = 0.0;
};

struct Aggregate {
  std::string method;
  std::int64_t n = 0;
  double avg_reward = 0.0;
  double reward_se = 0.0;
  double max_violation = 0.0;
  double feasible_fraction = 0.0;
};

struct ExperimentConfig {
  std::vector<Method> methods;
  std::vector<std::int64_t> n_grid = {50, 100, 200, 1000, 10000};
  int trials_per_n = 200;
  int test_size = 100000;
  std::uint64_t master_seed = 1;
  /// 0 means std::thread::hardware_concurrency().
  int threads = 0;

  /// Desk-scale defaults with methods plugin, cor1, thm1:2.1/3/5,
  /// fixed_delta:0.1, oracle.
  static ExperimentConfig desk();
  /// 1000 trials per N and 10^6 test samples.
  static ExperimentConfig full_scale();
};

struct ExperimentResult {
  std::vector<TrialResult> trials;  // ordered by method, N, trial
  std::vector<Aggregate> aggregates;
};

ExperimentResult run_experiment(const BettingConfig& cfg, const ExperimentConfig& exp);

std::vector<Aggregate> aggregate(const std::vector<TrialResult>& trials);

struct SequentialStep {
  int step = 0;  // 1-based
  std::int64_t count = 0;
  std::string status;
  double time_ms = 0.0;
  Eigen::VectorXd x;
};

std::vector<SequentialStep> run_sequential(const BettingConfig& cfg, const Method& method,
                                           int steps, int samples_per_step,
                                           std::uint64_t master_seed);

struct ReferenceResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  bool feasible = false;  // false: no grid point satisfied the constraint, x = 0
};

/// Exhaustive scan of the simplex grid {x >= 0, 1'x <= 1} with the given step,
/// maximizing moments.mean' x subject to the method's scalar constraint
/// evaluated directly (no lifting, no conic solver). For Oracle, pass the true
/// moments with count 0.
ReferenceResult solve_reference(const BettingConfig& cfg, const Method& method,
                                const Moments& moments, double step = 0.005);

}  // namespace ddcc::betting
