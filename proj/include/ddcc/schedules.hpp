#pragma once

// Sample-size dependent coefficient schedules (kappa_N, phi_N, nu_N), their
// sample-size conditions, confidence-bound radii and comparison constants.
//
// Schedules never throw for "not enough samples"; they report feasible=false.

#include <cstdint>
#include <optional>
#include <string>

namespace ddcc {

enum class ScheduleMethod {
  Thm1,   // covariance-based, fixed p > 2
  Cor1,   // covariance-based, automatic p
  Prop2,  // independent mean, fixed p > 0
  Cor2,   // independent mean, automatic p
  Prop3,  // independent variance, fixed p > 2 (same formulas as Thm1)
  Cor3,   // independent variance, automatic p (same formulas as Cor1)
};

std::string to_string(ScheduleMethod m);

struct ScheduleResult {
  ScheduleMethod method = ScheduleMethod::Cor1;
  std::int64_t n = 0;
  double alpha = 0.0;
  std::optional<double> p;      // set for fixed-p methods
  std::optional<double> kappa;  // covariance-based methods (see each schedule)
  double phi = 0.0;
  std::optional<double> nu;     // independent-mean methods, when feasible
  bool feasible = false;
};

ScheduleResult schedule_thm1(std::int64_t n, double alpha, double p);
ScheduleResult schedule_cor1(std::int64_t n, double alpha);
ScheduleResult schedule_prop2(std::int64_t n, double alpha, double p);
ScheduleResult schedule_cor2(std::int64_t n, double alpha);
ScheduleResult schedule_prop3(std::int64_t n, double alpha, double p);
ScheduleResult schedule_cor3(std::int64_t n, double alpha);

/// Threshold that n must exceed for schedule_thm1: (2 + sqrt(2 ln(4/alpha)))^p.
double thm1_threshold(double alpha, double p);
/// Threshold that n must exceed for schedule_prop2: (2 + sqrt(2 ln(1/alpha)))^p.
double prop2_threshold(double alpha, double p);

/// p = log base (2 + sqrt(2 ln(4 sqrt(n)/alpha))) of n.
double cor1_auto_p(std::int64_t n, double alpha);
/// p = log base (2 + sqrt(2 ln(sqrt(n)/alpha))) of n.
double cor2_auto_p(std::int64_t n, double alpha);

/// Smallest n for which schedule_cor1 is feasible (ascending scan, cap 1e9).
std::int64_t min_samples_cor1(double alpha);

/// Whether schedule_thm1 at cor1_auto_p reproduces schedule_cor1 (kappa, phi)
/// within 1e-12 relative. Requires schedule_cor1 feasible.
bool cor1_equals_thm1_at_autop(std::int64_t n, double alpha);
/// Same identity for schedule_prop2 at cor2_auto_p versus schedule_cor2
/// (nu, phi). Requires n >= 2.
bool cor2_equals_prop2_at_autop(std::int64_t n, double alpha);

/// (alpha - epsilon) / (1 - epsilon), for 0 <= epsilon < alpha < 1.
double alpha_tilde(double alpha, double epsilon);

/// Standard normal quantile, |error| <= 1e-8 (rational approximation plus one
/// Halley step). p in (0, 1).
double inverse_normal_cdf(double p);

struct ComparisonConstants {
  double general = 0.0;      // sqrt((1 - alpha) / alpha)
  double independent = 0.0;  // sqrt(ln(1/alpha) / 2)
  double gaussian = 0.0;     // Phi^{-1}(1 - alpha)
};
ComparisonConstants comparison_constants(double alpha);

struct ConfidenceBounds {
  double mean = 0.0;       // (r/sqrt(N)) (2 + sqrt(2 ln(2/delta)))
  double cov = 0.0;        // (2 r^2/sqrt(N)) (2 + sqrt(2 ln(4/delta)))
  double mean_ind = 0.0;   // (r/sqrt(N)) (2 + sqrt(2 ln(1/delta)))
  bool sample_condition = false;  // N >= (2 + sqrt(2 ln(4/delta)))^2
};
ConfidenceBounds confidence_bounds(double r, std::int64_t n, double delta);

}  // namespace ddcc
