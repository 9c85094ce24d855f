#include "ddcc/moments.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <random>
#include <sstream>

#include "ddcc/errors.hpp"
#include "ddcc/support_sets.hpp"
#include "oracles.hpp"

using namespace ddcc;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd v1(double a) { return VectorXd::Constant(1, a); }
VectorXd v2(double a, double b) { return (VectorXd(2) << a, b).finished(); }

MatrixXd random_samples(int n, int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> off(-1e3, 1e3);
  VectorXd shift(dim);
  for (int j = 0; j < dim; ++j) shift(j) = off(rng);
  MatrixXd m(n, dim);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = shift(j) + (1.0 + j) * g(rng);
  return m;
}

}  // namespace

TEST(MomentState, NewStateIsEmpty) {
  MomentState s(2, MomentMode::Full);
  EXPECT_EQ(s.count(), 0);
  EXPECT_EQ(s.mean(), VectorXd::Zero(2));
  MomentState d(1, MomentMode::Diagonal);
  EXPECT_EQ(d.scatter().size(), 1);
  EXPECT_EQ(d.scatter()(0, 0), 0.0);
  EXPECT_THROW(MomentState(0, MomentMode::Full), InvalidArgument);
}

TEST(MomentState, TwoPointSymmetricCase) {
  MomentState s(2, MomentMode::Full);
  s.update(v2(0, 0));
  s.update(v2(2, 2));
  EXPECT_EQ(s.mean(), v2(1, 1));
  MatrixXd expected(2, 2);
  expected << 1, 1, 1, 1;
  EXPECT_EQ(s.covariance(), expected);
}

TEST(MomentState, SingleSampleHasZeroScatter) {
  MomentState s(1, MomentMode::Full);
  s.update(v1(5));
  EXPECT_EQ(s.mean()(0), 5.0);
  EXPECT_EQ(s.covariance()(0, 0), 0.0);
}

TEST(MomentState, RejectsBadSamples) {
  MomentState s(2, MomentMode::Full);
  EXPECT_THROW(s.update(v1(1)), InvalidArgument);
  EXPECT_THROW(s.update(v2(1, NAN)), InvalidArgument);
  EXPECT_THROW(s.update(v2(INFINITY, 0)), InvalidArgument);
  EXPECT_EQ(s.count(), 0);
}

TEST(MomentState, StreamingMatchesBatch) {
  std::mt19937_64 rng(11);
  const MatrixXd x = random_samples(1000, 4, rng);
  MomentState s(4, MomentMode::Full);
  s.update_batch(x);
  VectorXd mean;
  MatrixXd cov;
  oracle::batch_moments(x, mean, cov);
  EXPECT_LT(oracle::rel_err(s.mean(), mean), 1e-10);
  EXPECT_LT(oracle::rel_err(s.covariance(), cov), 1e-10);
}

TEST(MomentState, DiagonalModeKeepsPerCoordinateVariance) {
  std::mt19937_64 rng(12);
  const MatrixXd x = random_samples(300, 3, rng);
  MomentState d(3, MomentMode::Diagonal);
  d.update_batch(x);
  VectorXd mean;
  MatrixXd cov;
  oracle::batch_moments(x, mean, cov);
  EXPECT_LT(oracle::rel_err(d.variance(), cov.diagonal()), 1e-10);
  const MatrixXd c = d.covariance();
  EXPECT_EQ(c(0, 1), 0.0);
  EXPECT_EQ(c(2, 1), 0.0);
}

TEST(MomentState, FilteredUpdate) {
  const SupportSet box = SupportSet::box(v1(0), v1(1));
  MomentState s(1, MomentMode::Full);
  EXPECT_TRUE(s.update_filtered(v1(0.5), box));
  EXPECT_EQ(s.count(), 1);
  EXPECT_FALSE(s.update_filtered(v1(2), box));
  EXPECT_EQ(s.count(), 1);
  EXPECT_EQ(s.mean()(0), 0.5);
  EXPECT_TRUE(s.update_filtered(v1(1), box));
  EXPECT_EQ(s.count(), 2);
}

TEST(MomentMerge, Examples) {
  std::mt19937_64 rng(13);
  MomentState a(2, MomentMode::Full);
  a.update_batch(random_samples(20, 2, rng));
  const MomentState empty(2, MomentMode::Full);
  const MomentState m = merge(a, empty);
  EXPECT_EQ(m.count(), a.count());
  EXPECT_EQ(m.mean(), a.mean());
  EXPECT_EQ(m.scatter(), a.scatter());

  MomentState p(2, MomentMode::Full), q(2, MomentMode::Full);
  p.update(v2(0, 0));
  q.update(v2(2, 2));
  EXPECT_EQ(merge(p, q).mean(), v2(1, 1));

  EXPECT_THROW(merge(a, MomentState(3, MomentMode::Full)), InvalidArgument);
  EXPECT_THROW(merge(a, MomentState(2, MomentMode::Diagonal)), InvalidArgument);
}

TEST(MomentMerge, RandomSplitMatchesSingleStream) {
  std::mt19937_64 rng(14);
  for (auto mode : {MomentMode::Full, MomentMode::Diagonal}) {
    const MatrixXd x = random_samples(500, 3, rng);
    const int cut = std::uniform_int_distribution<int>(0, 500)(rng);
    MomentState whole(3, mode), head(3, mode), tail(3, mode);
    whole.update_batch(x);
    head.update_batch(x.topRows(cut));
    tail.update_batch(x.bottomRows(500 - cut));
    const MomentState m = merge(head, tail);
    EXPECT_EQ(m.count(), 500);
    EXPECT_LT(oracle::rel_err(m.mean(), whole.mean()), 1e-10);
    EXPECT_LT(oracle::rel_err(m.covariance(), whole.covariance()), 1e-10);
  }
}

TEST(MomentExtract, Examples) {
  MomentState d(1, MomentMode::Diagonal);
  d.update(v1(1));
  d.update(v1(3));
  const Moments m = d.extract();
  EXPECT_EQ(m.count, 2);
  EXPECT_EQ(m.variance(0), 1.0);
  EXPECT_EQ(m.std_diag(0, 0), 1.0);

  MomentState f(2, MomentMode::Full);
  f.update(v2(3, -1));
  EXPECT_EQ(f.extract().covariance, MatrixXd::Zero(2, 2));

  EXPECT_THROW(MomentState(2, MomentMode::Full).extract(), EmptyState);
}

TEST(MomentProperties, PermutationInvarianceAndPsd) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 1 + trial % 5;
    const int n = 2 + static_cast<int>(rng() % 200);
    MatrixXd x = random_samples(n, dim, rng);
    MomentState a(dim, MomentMode::Full);
    a.update_batch(x);
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    MomentState b(dim, MomentMode::Full);
    for (int i : perm) b.update(x.row(i).transpose());
    EXPECT_LT(oracle::rel_err(a.mean(), b.mean()), 1e-10);
    EXPECT_LT(oracle::rel_err(a.covariance(), b.covariance()), 1e-10);
    const MatrixXd c = a.covariance();
    EXPECT_EQ(c, c.transpose());
    const double min_eig =
        Eigen::SelfAdjointEigenSolver<MatrixXd>(c).eigenvalues().minCoeff();
    EXPECT_GE(min_eig, -1e-10 * c.trace());
  }
}

TEST(MomentProperties, UpdateCostDoesNotGrowWithCount) {
  std::mt19937_64 rng(16);
  const MatrixXd x = random_samples(110000, 4, rng);
  auto best_time = [&](int from, int to) {
    double best = 1e300;
    for (int rep = 0; rep < 3; ++rep) {
      MomentState s(4, MomentMode::Full);
      s.update_batch(x.topRows(from));
      const auto t0 = std::chrono::steady_clock::now();
      s.update_batch(x.middleRows(from, to - from));
      const auto t1 = std::chrono::steady_clock::now();
      best = std::min(best, std::chrono::duration<double>(t1 - t0).count() /
                                (to - from));
    }
    return best;
  };
  const double early = best_time(0, 10000);
  const double late = best_time(100000, 110000);
  EXPECT_LE(late, 2.0 * early);
}

TEST(SampleCsv, HeaderAndRows) {
  std::istringstream in("a,b\n1, 2\n\n3,4\r\n");
  const MatrixXd m = read_samples_csv(in, 2);
  ASSERT_EQ(m.rows(), 2);
  EXPECT_EQ(m(0, 1), 2.0);
  EXPECT_EQ(m(1, 0), 3.0);
  std::istringstream no_header("1.5e0,2\n");
  EXPECT_EQ(read_samples_csv(no_header, 2)(0, 0), 1.5);
  std::istringstream bad("1,2\n3\n");
  EXPECT_THROW(read_samples_csv(bad, 2), InvalidArgument);
  std::istringstream junk("1,2\nx,y\n");
  EXPECT_THROW(read_samples_csv(junk, 2), InvalidArgument);
}
