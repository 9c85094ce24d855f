#include "ddcc/schedules.hpp"

#include <cmath>
#include <limits>

#include "ddcc/errors.hpp"

namespace ddcc {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidArgument("alpha must lie in (0, 1)");
  }
}

void check_n(std::int64_t n) {
  if (n < 1) throw InvalidArgument("sample count must be positive");
}

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace

std::string to_string(ScheduleMethod m) {
  switch (m) {
    case ScheduleMethod::Thm1:
      return "thm1";
    case ScheduleMethod::Cor1:
      return "cor1";
    case ScheduleMethod::Prop2:
      return "prop2";
    case ScheduleMethod::Cor2:
      return "cor2";
    case ScheduleMethod::Prop3:
      return "prop3";
    case ScheduleMethod::Cor3:
      return "cor3";
  }
  return "unknown";
}

double thm1_threshold(double alpha, double p) {
  check_alpha(alpha);
  return std::pow(2.0 + std::sqrt(2.0 * std::log(4.0 / alpha)), p);
}

double prop2_threshold(double alpha, double p) {
  check_alpha(alpha);
  return std::pow(2.0 + std::sqrt(2.0 * std::log(1.0 / alpha)), p);
}

ScheduleResult schedule_thm1(std::int64_t n, double alpha, double p) {
  check_n(n);
  check_alpha(alpha);
  if (!(p > 2.0)) throw InvalidArgument("p must exceed 2");
  ScheduleResult r;
  r.method = ScheduleMethod::Thm1;
  r.n = n;
  r.alpha = alpha;
  r.p = p;
  const double nd = static_cast<double>(n);
  r.phi = std::pow(nd, 1.0 / p - 0.5);
  r.feasible = nd > thm1_threshold(alpha, p);
  if (r.feasible) {
    const double b = std::pow(nd, 1.0 / p) - 2.0;
    // 1 - (4/alpha) exp(-b^2/2)
    const double slack = -std::expm1(std::log(4.0 / alpha) - 0.5 * b * b);
    r.kappa = 1.0 / std::sqrt(slack);
  }
  return r;
}

ScheduleResult schedule_cor1(std::int64_t n, double alpha) {
  check_n(n);
  check_alpha(alpha);
  ScheduleResult r;
  r.method = ScheduleMethod::Cor1;
  r.n = n;
  r.alpha = alpha;
  const double nd = static_cast<double>(n);
  const double rn = std::sqrt(nd);
  r.phi = (2.0 + std::sqrt(2.0 * std::log(4.0 * rn / alpha))) / rn;
  const double e = std::exp((rn - 2.0) * (rn - 2.0));
  const double lhs = std::isinf(e) ? 0.0 : std::sqrt(16.0 * nd / e);
  r.feasible = lhs < alpha;
  if (n >= 2) r.kappa = std::sqrt(rn / (rn - 1.0));
  return r;
}

ScheduleResult schedule_prop2(std::int64_t n, double alpha, double p) {
  check_n(n);
  check_alpha(alpha);
  if (!(p > 0.0)) throw InvalidArgument("p must be positive");
  ScheduleResult r;
  r.method = ScheduleMethod::Prop2;
  r.n = n;
  r.alpha = alpha;
  r.p = p;
  const double nd = static_cast<double>(n);
  r.phi = std::pow(nd, 1.0 / p - 0.5);
  r.feasible = nd > prop2_threshold(alpha, p);
  if (r.feasible) {
    const double b = std::pow(nd, 1.0 / p) - 2.0;
    // alpha exp(b^2/2) - 1
    const double denom = std::expm1(0.5 * b * b + std::log(alpha));
    if (denom > 0.0) {
      r.nu = 0.5 * std::log1p((1.0 - alpha) / denom);
    } else {
      r.feasible = false;
    }
  }
  return r;
}

ScheduleResult schedule_cor2(std::int64_t n, double alpha) {
  check_n(n);
  check_alpha(alpha);
  ScheduleResult r;
  r.method = ScheduleMethod::Cor2;
  r.n = n;
  r.alpha = alpha;
  const double rn = std::sqrt(static_cast<double>(n));
  r.phi = (2.0 + std::sqrt(2.0 * std::log(rn / alpha))) / rn;
  r.feasible = n >= 2;
  if (r.feasible) r.nu = 0.5 * std::log1p((1.0 - alpha) / (rn - 1.0));
  return r;
}

ScheduleResult schedule_prop3(std::int64_t n, double alpha, double p) {
  ScheduleResult r = schedule_thm1(n, alpha, p);
  r.method = ScheduleMethod::Prop3;
  return r;
}

ScheduleResult schedule_cor3(std::int64_t n, double alpha) {
  ScheduleResult r = schedule_cor1(n, alpha);
  r.method = ScheduleMethod::Cor3;
  return r;
}

double cor1_auto_p(std::int64_t n, double alpha) {
  check_n(n);
  check_alpha(alpha);
  const double nd = static_cast<double>(n);
  const double base = 2.0 + std::sqrt(2.0 * std::log(4.0 * std::sqrt(nd) / alpha));
  return std::log(nd) / std::log(base);
}

double cor2_auto_p(std::int64_t n, double alpha) {
  check_n(n);
  check_alpha(alpha);
  const double nd = static_cast<double>(n);
  const double base = 2.0 + std::sqrt(2.0 * std::log(std::sqrt(nd) / alpha));
  return std::log(nd) / std::log(base);
}

std::int64_t min_samples_cor1(double alpha) {
  check_alpha(alpha);
  constexpr std::int64_t cap = 1'000'000'000;
  for (std::int64_t n = 1; n <= cap; ++n) {
    if (schedule_cor1(n, alpha).feasible) return n;
  }
  throw NotEnoughSamples("no sample count up to 1e9 satisfies the condition");
}

bool cor1_equals_thm1_at_autop(std::int64_t n, double alpha) {
  const ScheduleResult c = schedule_cor1(n, alpha);
  if (!c.feasible) {
    throw NotEnoughSamples("schedule_cor1 is not feasible at this sample count");
  }
  const ScheduleResult t = schedule_thm1(n, alpha, cor1_auto_p(n, alpha));
  return t.feasible && rel_close(*t.kappa, *c.kappa, 1e-12) &&
         rel_close(t.phi, c.phi, 1e-12);
}

bool cor2_equals_prop2_at_autop(std::int64_t n, double alpha) {
  const ScheduleResult c = schedule_cor2(n, alpha);
  if (!c.feasible) {
    throw NotEnoughSamples("schedule_cor2 is not feasible at this sample count");
  }
  const ScheduleResult t = schedule_prop2(n, alpha, cor2_auto_p(n, alpha));
  return t.feasible && rel_close(*t.nu, *c.nu, 1e-12) &&
         rel_close(t.phi, c.phi, 1e-12);
}

double alpha_tilde(double alpha, double epsilon) {
  check_alpha(alpha);
  if (!(epsilon >= 0.0 && epsilon < alpha)) {
    throw InvalidArgument("epsilon must lie in [0, alpha)");
  }
  return (alpha - epsilon) / (1.0 - epsilon);
}

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("p must lie in (0, 1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement.
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

ComparisonConstants comparison_constants(double alpha) {
  check_alpha(alpha);
  return {std::sqrt((1.0 - alpha) / alpha), std::sqrt(0.5 * std::log(1.0 / alpha)),
          inverse_normal_cdf(1.0 - alpha)};
}

ConfidenceBounds confidence_bounds(double r, std::int64_t n, double delta) {
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw InvalidArgument("radius must be finite and nonnegative");
  }
  check_n(n);
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("delta must lie in (0, 1)");
  }
  const double rn = std::sqrt(static_cast<double>(n));
  const double c4 = 2.0 + std::sqrt(2.0 * std::log(4.0 / delta));
  ConfidenceBounds out;
  out.mean = r / rn * (2.0 + std::sqrt(2.0 * std::log(2.0 / delta)));
  out.cov = 2.0 * r * r / rn * c4;
  out.mean_ind = r / rn * (2.0 + std::sqrt(2.0 * std::log(1.0 / delta)));
  out.sample_condition = static_cast<double>(n) >= c4 * c4;
  return out;
}

}  // namespace ddcc
