#pragma once

// Independent reference computations shared by unit and acceptance tests.
// None of these call into the library code they check.

#include <Eigen/Dense>

#include <cmath>
#include <random>

namespace oracle {

/// Two-pass batch mean and 1/N covariance of the rows of `samples`.
inline void batch_moments(const Eigen::MatrixXd& samples, Eigen::VectorXd& mean,
                          Eigen::MatrixXd& cov) {
  const double n = static_cast<double>(samples.rows());
  mean = samples.colwise().sum().transpose() / n;
  const Eigen::MatrixXd centered = samples.rowwise() - mean.transpose();
  cov = centered.transpose() * centered / n;
}

/// max ||A - B|| / max(||B||, floor) with max-abs norms.
inline double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                      double floor = 1e-300) {
  const double denom = std::max(b.cwiseAbs().maxCoeff(), floor);
  return (a - b).cwiseAbs().maxCoeff() / denom;
}

/// max over {u : u'Vu <= 1} of z'u, found by projected gradient ascent of
/// f(u) = z'u / sqrt(u'Vu) on the unit sphere (only V is used, never V^{-1}).
inline double ellipsoid_support_value(const Eigen::MatrixXd& V,
                                      const Eigen::VectorXd& z) {
  if (z.norm() == 0.0) return 0.0;
  auto f = [&](const Eigen::VectorXd& u) {
    return z.dot(u) / std::sqrt(u.dot(V * u));
  };
  Eigen::VectorXd u = z.normalized();
  double fu = f(u);
  double step = 1.0;
  for (int it = 0; it < 200000; ++it) {
    const double q = u.dot(V * u);
    Eigen::VectorXd g = z / std::sqrt(q) - (z.dot(u) / std::pow(q, 1.5)) * (V * u);
    g -= g.dot(u) * u;  // tangent component
    if (g.norm() < 1e-15 * z.norm()) break;
    bool improved = false;
    while (step > 1e-18) {
      const Eigen::VectorXd cand = (u + step * g).normalized();
      const double fc = f(cand);
      if (fc > fu) {
        u = cand;
        fu = fc;
        step *= 2.0;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return fu;
}

/// Random symmetric positive definite matrix B B' + shift I.
template <class Rng>
Eigen::MatrixXd random_spd(int n, Rng& rng, double shift = 0.1) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = g(rng);
  return B * B.transpose() + shift * Eigen::MatrixXd::Identity(n, n);
}

template <class Rng>
Eigen::VectorXd random_normal(int n, Rng& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

}  // namespace oracle
