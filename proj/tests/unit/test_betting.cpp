#include "ddcc/betting.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "ddcc/errors.hpp"
#include "ddcc/schedules.hpp"
#include "oracles.hpp"

using namespace ddcc;
using namespace ddcc::betting;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd vec4(double a, double b, double c, double d) {
  return (VectorXd(4) << a, b, c, d).finished();
}

Moments as_moments(const TrueMoments& tm) {
  Moments m;
  m.count = 0;
  m.mean = tm.mu;
  m.covariance = tm.sigma;
  m.variance = tm.sigma.diagonal();
  return m;
}

Moments sample_moments(const BettingConfig& cfg, std::uint64_t seed, int n) {
  MomentState s(4, MomentMode::Full);
  s.update_batch(sample_batch(cfg, seed, n));
  return s.extract();
}

// Every grid point, no structure assumed.
ReferenceResult brute_force(const std::function<double(const VectorXd&)>& value,
                            const VectorXd& mu, double step) {
  const long steps = std::lround(1.0 / step);
  ReferenceResult best{VectorXd::Zero(4), -1e300, false};
  for (long i = 0; i <= steps; ++i)
    for (long j = 0; i + j <= steps; ++j)
      for (long k = 0; i + j + k <= steps; ++k)
        for (long l = 0; i + j + k + l <= steps; ++l) {
          const VectorXd x = vec4(i * step, j * step, k * step, l * step);
          if (value(x) <= 0.0 && mu.dot(x) > best.objective) {
            best = {x, mu.dot(x), true};
          }
        }
  return best;
}

}  // namespace

TEST(Betting, WagerOutcome) {
  EXPECT_EQ(wager_outcome(0.3, 0.75, 0.5), 0.5);
  EXPECT_EQ(wager_outcome(0.2, 0.75, 0.5), -1.0);
  EXPECT_EQ(wager_outcome(1.0 - 0.75, 0.75, 0.5), 0.5);
  EXPECT_EQ(wager_outcome(0.0, 0.75, 0.5), -1.0);
  EXPECT_EQ(wager_outcome(1.0, 0.4, 2.1), 2.1);
  EXPECT_THROW(wager_outcome(-0.01, 0.75, 0.5), InvalidArgument);
  EXPECT_THROW(wager_outcome(1.01, 0.75, 0.5), InvalidArgument);
  EXPECT_THROW(wager_outcome(std::nan(""), 0.75, 0.5), InvalidArgument);
}

TEST(Betting, ConfigValidation) {
  BettingConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.rho(0) = 1.0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = BettingConfig{};
  cfg.abar(3) = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = BettingConfig{};
  cfg.alpha = 1.0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  EXPECT_EQ(parse_threshold_mode("literal-paper"), ThresholdMode::LiteralPaper);
  EXPECT_EQ(to_string(ThresholdMode::LossBeta), "loss-beta");
  EXPECT_THROW(parse_threshold_mode("loss"), InvalidArgument);
}

TEST(Betting, SampleBatchStructure) {
  const BettingConfig cfg;
  const int n = 1000000;
  const MatrixXd a = sample_batch(cfg, 7, n);
  ASSERT_EQ(a.rows(), n);
  ASSERT_EQ(a.cols(), 4);
  VectorXd wins = VectorXd::Zero(4);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < 4; ++k) {
      ASSERT_TRUE(a(i, k) == -1.0 || a(i, k) == cfg.abar(k));
      if (a(i, k) > 0) wins(k) += 1;
    }
    // nested thresholds on a shared uniform
    if (a(i, 1) > 0) ASSERT_GT(a(i, 0), 0);
    if (a(i, 3) > 0) ASSERT_GT(a(i, 2), 0);
  }
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(wins(k) / n, cfg.rho(k), 0.002) << k;

  const VectorXd c0 = a.col(0).array() - a.col(0).mean();
  const VectorXd c2 = a.col(2).array() - a.col(2).mean();
  const double corr = c0.dot(c2) / (c0.norm() * c2.norm());
  EXPECT_NEAR(corr, 0.0, 0.005);

  EXPECT_EQ(sample_batch(cfg, 7, 100), a.topRows(100));
  EXPECT_NE(sample_batch(cfg, 8, 100), a.topRows(100));
}

TEST(Betting, TrueMomentsExact) {
  const TrueMoments tm = true_moments(BettingConfig{});
  const VectorXd expect = vec4(0.125, 0.17, 0.12, 0.24);
  EXPECT_LE((tm.mu - expect).cwiseAbs().maxCoeff(), 1e-15);
  for (int r = 0; r < 2; ++r)
    for (int c = 2; c < 4; ++c) {
      EXPECT_EQ(tm.sigma(r, c), 0.0);
      EXPECT_EQ(tm.sigma(c, r), 0.0);
    }
  // two-point variances rho (1 - rho) (abar + 1)^2
  const BettingConfig cfg;
  for (int k = 0; k < 4; ++k) {
    const double v = cfg.rho(k) * (1 - cfg.rho(k)) * std::pow(cfg.abar(k) + 1, 2);
    EXPECT_NEAR(tm.sigma(k, k), v, 1e-15);
  }
}

TEST(Betting, TrueMomentsAgreeWithMonteCarlo) {
  const BettingConfig cfg;
  const TrueMoments tm = true_moments(cfg);
  const int n = 2000000;
  const MatrixXd a = sample_batch(cfg, 99, n);
  VectorXd mean;
  MatrixXd cov;
  oracle::batch_moments(a, mean, cov);
  for (int k = 0; k < 4; ++k) {
    const double se = std::sqrt(tm.sigma(k, k) / n);
    EXPECT_NEAR(mean(k), tm.mu(k), 4 * se) << k;
  }
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      const VectorXd prod = (a.col(r).array() - mean(r)) * (a.col(c).array() - mean(c));
      const double se = std::sqrt((prod.array() - prod.mean()).square().mean() / n);
      EXPECT_NEAR(cov(r, c), tm.sigma(r, c), 4 * se) << r << "," << c;
    }
}

TEST(Betting, ZeroBetUnderEachThresholdMode) {
  BettingConfig cfg;
  const TrueMoments tm = true_moments(cfg);
  const auto loss = build_known(tm.mu, tm.sigma, cfg.spec());
  EXPECT_DOUBLE_EQ(loss.value_at(VectorXd::Zero(4)), -0.1);
  cfg.mode = ThresholdMode::LiteralPaper;
  const auto literal = build_known(tm.mu, tm.sigma, cfg.spec());
  EXPECT_DOUBLE_EQ(literal.value_at(VectorXd::Zero(4)), 0.1);
  EXPECT_FALSE(literal.feasible(VectorXd::Zero(4)));
}

TEST(Betting, KnownBlocksMatchDirectFormula) {
  const BettingConfig cfg;
  const TrueMoments tm = true_moments(cfg);
  const auto blocks = build_known(tm.mu, tm.sigma, cfg.spec());
  const double g = std::sqrt(0.8 / 0.2);
  const double step = 0.05;
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; i + j <= 20; ++j)
      for (int k = 0; i + j + k <= 20; ++k)
        for (int l = 0; i + j + k + l <= 20; ++l) {
          const VectorXd x = vec4(i * step, j * step, k * step, l * step);
          const double direct = -tm.mu.dot(x) - 0.1 + g * std::sqrt(x.dot(tm.sigma * x));
          ASSERT_NEAR(blocks.value_at(x), direct, 1e-9);
          if (std::abs(direct) > 1e-9) ASSERT_EQ(blocks.feasible(x, 0.0), direct <= 0.0);
        }
}

TEST(Betting, OracleSolveMatchesGridReference) {
  const BettingConfig cfg;
  const MomentState unused(4, MomentMode::Full);
  const MethodSolve ms = solve_method(cfg, Method::parse("oracle"), unused);
  ASSERT_EQ(ms.status, "optimal");
  ASSERT_FALSE(ms.fallback);
  EXPECT_GE(ms.x.minCoeff(), 0.0);
  EXPECT_LE(ms.x.sum(), 1.0 + 1e-8);
  const ReferenceResult ref =
      solve_reference(cfg, Method::parse("oracle"), as_moments(true_moments(cfg)));
  ASSERT_TRUE(ref.feasible);
  EXPECT_NEAR(*ms.objective, ref.objective, 1e-3);
  EXPECT_GE(*ms.objective, ref.objective - 1e-9);  // grid points are feasible points
}

TEST(Betting, GridReferenceMatchesBruteForce) {
  const BettingConfig cfg;
  const Moments truth = as_moments(true_moments(cfg));
  const Moments est = sample_moments(cfg, 3, 500);
  const ChanceSpec spec = cfg.spec();
  const SupportSet box = cfg.support();
  const auto sched = schedule_cor1(500, 0.2);
  const double step = 0.02;

  const auto a = solve_reference(cfg, Method::parse("oracle"), truth, step);
  const auto b = brute_force(
      [&](const VectorXd& x) { return displayed::known(truth.mean, truth.covariance, spec, x); },
      truth.mean, step);
  EXPECT_TRUE(a.feasible && b.feasible);
  EXPECT_NEAR(a.objective, b.objective, 1e-15);

  const auto c = solve_reference(cfg, Method::parse("cor1"), est, step);
  const auto d = brute_force(
      [&](const VectorXd& x) { return displayed::thm1(est, box, spec, sched, x); }, est.mean,
      step);
  EXPECT_TRUE(c.feasible && d.feasible);
  EXPECT_NEAR(c.objective, d.objective, 1e-15);

  // a mean vector with a negative last entry exercises the other scan direction
  Moments neg = truth;
  neg.mean(3) = -0.05;
  const auto e = solve_reference(cfg, Method::parse("plugin"), neg, step);
  const auto f = brute_force(
      [&](const VectorXd& x) { return displayed::known(neg.mean, neg.covariance, spec, x); },
      neg.mean, step);
  EXPECT_NEAR(e.objective, f.objective, 1e-15);
}

TEST(Betting, GridRefinementIsStable) {
  const BettingConfig cfg;
  const Moments truth = as_moments(true_moments(cfg));
  const auto coarse = solve_reference(cfg, Method::parse("oracle"), truth, 0.01);
  const auto fine = solve_reference(cfg, Method::parse("oracle"), truth, 0.005);
  EXPECT_LT(std::abs(fine.objective - coarse.objective), 5e-3);
  EXPECT_GE(fine.objective, coarse.objective);
}

TEST(Betting, LiteralPaperOracleIsInfeasible) {
  BettingConfig cfg;
  cfg.mode = ThresholdMode::LiteralPaper;
  const MethodSolve ms = solve_method(cfg, Method::parse("oracle"), MomentState(4, MomentMode::Full));
  EXPECT_TRUE(ms.fallback);
  EXPECT_EQ(ms.status, "infeasible");
  EXPECT_EQ(ms.x, VectorXd::Zero(4));
  const auto ref =
      solve_reference(cfg, Method::parse("oracle"), as_moments(true_moments(cfg)), 0.05);
  EXPECT_FALSE(ref.feasible);
  EXPECT_EQ(ref.x, VectorXd::Zero(4));
}

TEST(Betting, Evaluate) {
  const BettingConfig cfg;
  const MatrixXd test = sample_batch(cfg, 5, 1000000);
  const Evaluation zero = evaluate(VectorXd::Zero(4), test, cfg);
  EXPECT_EQ(zero.reward, 0.0);
  EXPECT_EQ(zero.violation, 0.0);
  const Evaluation all_in = evaluate(vec4(0, 0, 0, 1), test, cfg);
  const double sd = std::sqrt(true_moments(cfg).sigma(3, 3) / 1e6);
  EXPECT_NEAR(all_in.reward, 0.24, 3 * sd);
  EXPECT_NEAR(all_in.violation, 0.6, 3 * std::sqrt(0.24 / 1e6));

  BettingConfig literal = cfg;
  literal.mode = ThresholdMode::LiteralPaper;
  EXPECT_EQ(evaluate(VectorXd::Zero(4), test, literal).violation, 1.0);
}

TEST(Betting, MethodTags) {
  for (const char* tag : {"plugin", "cor1", "thm1:2.1", "thm1:3", "fixed_delta:0.1", "oracle"}) {
    EXPECT_EQ(Method::parse(tag).tag(), tag);
  }
  for (const char* bad : {"", "cor2", "thm1", "thm1:", "thm1:x", "thm1:-1", "cor1:3",
                          "fixed_delta:1.5", "fixed_delta"}) {
    EXPECT_THROW(Method::parse(bad), InvalidArgument) << bad;
  }
}

TEST(Betting, DerivedSeeds) {
  EXPECT_EQ(derive_seed(1, "cor1", 50, 0), derive_seed(1, "cor1", 50, 0));
  std::set<std::uint64_t> seen;
  for (std::uint64_t m : {1, 2})
    for (const char* label : {"cor1", "plugin", "test-set"})
      for (int n : {0, 50, 100})
        for (int t = 0; t < 20; ++t) seen.insert(derive_seed(m, label, n, t));
  EXPECT_EQ(seen.size(), 2u * 3 * 3 * 20);
}

TEST(Betting, ExperimentIsReproducible) {
  const BettingConfig cfg;
  ExperimentConfig exp;
  for (const char* tag : {"plugin", "cor1", "thm1:5", "oracle"}) {
    exp.methods.push_back(Method::parse(tag));
  }
  exp.n_grid = {30, 200};
  exp.trials_per_n = 5;
  exp.test_size = 20000;
  exp.master_seed = 42;
  exp.threads = 1;
  const auto a = run_experiment(cfg, exp);
  exp.threads = 3;
  const auto b = run_experiment(cfg, exp);
  ASSERT_EQ(a.trials.size(), 4u * 2 * 5);
  ASSERT_EQ(a.trials.size(), b.trials.size());
  for (std::size_t i = 0; i < a.trials.size(); ++i) {
    EXPECT_EQ(a.trials[i].method, b.trials[i].method);
    EXPECT_EQ(a.trials[i].seed, b.trials[i].seed);
    EXPECT_EQ(a.trials[i].x, b.trials[i].x);
    EXPECT_EQ(a.trials[i].reward, b.trials[i].reward);
    EXPECT_EQ(a.trials[i].violation, b.trials[i].violation);
  }
  ASSERT_EQ(a.aggregates.size(), 8u);

  for (const auto& t : a.trials) {
    if (t.method == "oracle") EXPECT_EQ(t.x, a.trials.back().x);
    if (t.method == "thm1:5") {
      EXPECT_TRUE(t.fallback);
      EXPECT_EQ(t.status, "not_enough_samples");
      EXPECT_EQ(t.x, VectorXd::Zero(4));
    }
    if (t.method == "cor1" && t.n == 30) {
      EXPECT_EQ(t.status, "optimal");
    }
    if (!t.fallback) {
      EXPECT_GE(t.x.minCoeff(), 0.0);
      EXPECT_LE(t.x.sum(), 1.0 + 1e-8);
    }
    EXPECT_GE(t.violation, 0.0);
    EXPECT_LE(t.violation, 1.0);
  }
  for (const auto& ag : a.aggregates) {
    if (ag.method == "thm1:5") EXPECT_EQ(ag.feasible_fraction, 0.0);
    if (ag.method == "oracle") EXPECT_LE(ag.reward_se, 1e-15);
  }
}

TEST(Betting, AggregateStatistics) {
  std::vector<TrialResult> trials(4);
  for (int i = 0; i < 4; ++i) {
    trials[i].method = i < 3 ? "a" : "b";
    trials[i].n = 10;
    trials[i].reward = i;
    trials[i].violation = 0.1 * i;
    trials[i].fallback = i == 1;
  }
  const auto ag = aggregate(trials);
  ASSERT_EQ(ag.size(), 2u);
  EXPECT_DOUBLE_EQ(ag[0].avg_reward, 1.0);
  EXPECT_DOUBLE_EQ(ag[0].reward_se, std::sqrt(1.0 / 3.0));
  EXPECT_DOUBLE_EQ(ag[0].max_violation, 0.2);
  EXPECT_DOUBLE_EQ(ag[0].feasible_fraction, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(ag[1].avg_reward, 3.0);
}

TEST(Betting, SequentialCounts) {
  const auto steps = run_sequential(BettingConfig{}, Method::parse("cor1"), 6, 40, 9);
  ASSERT_EQ(steps.size(), 6u);
  for (std::size_t k = 0; k < steps.size(); ++k) {
    EXPECT_EQ(steps[k].step, static_cast<int>(k + 1));
    EXPECT_EQ(steps[k].count, 40 * static_cast<std::int64_t>(k + 1));
    EXPECT_GE(steps[k].time_ms, 0.0);
  }
  // 40 samples are below the minimum for alpha = 0.2 only when the schedule says so
  EXPECT_EQ(steps[0].status, schedule_cor1(40, 0.2).feasible ? "optimal" : "not_enough_samples");
  EXPECT_THROW(run_sequential(BettingConfig{}, Method::parse("cor1"), 1, 40, 9), InvalidArgument);
}

TEST(Betting, PluginApproachesKnownFeasibleSet) {
  const BettingConfig cfg;
  const TrueMoments tm = true_moments(cfg);
  const Moments est = sample_moments(cfg, 12, 10000);
  const ChanceSpec spec = cfg.spec();
  const double step = 0.01;
  long total = 0, differ = 0;
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 20; ++j)
      for (int k = 0; k <= 20; ++k)
        for (int l = 0; l <= 20; ++l) {
          const VectorXd x = vec4(i * step, j * step, k * step, l * step);
          const bool a = displayed::known(tm.mu, tm.sigma, spec, x) <= 0;
          const bool b = displayed::known(est.mean, est.covariance, spec, x) <= 0;
          ++total;
          if (a != b) ++differ;
        }
  EXPECT_LT(static_cast<double>(differ) / total, 0.02);
}

TEST(Betting, FixedDeltaAndCor1AtLargeN) {
  const BettingConfig cfg;
  MomentState state(4, MomentMode::Full);
  state.update_batch(sample_batch(cfg, 77, 10000));
  const auto fd = solve_method(cfg, Method::parse("fixed_delta:0.1"), state);
  const auto c1 = solve_method(cfg, Method::parse("cor1"), state);
  ASSERT_EQ(fd.status, "optimal");
  ASSERT_EQ(c1.status, "optimal");
  EXPECT_GT(*fd.objective, 0.0);
  EXPECT_GT(*c1.objective, 0.0);
  // fixed delta is no better than the known-moment problem at level alpha - delta
  BettingConfig tight = cfg;
  tight.alpha = cfg.alpha - 0.1;
  const auto known_tight = solve_method(tight, Method::parse("plugin"), state);
  EXPECT_LE(*fd.objective, *known_tight.objective + 1e-7);
}
