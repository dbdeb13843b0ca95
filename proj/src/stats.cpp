#include "bpt/stats.hpp"

#include <cmath>
#include <limits>

#include "bpt/errors.hpp"

namespace bpt {
namespace {

// Regularized lower incomplete gamma P(a, x): series expansion for x < a + 1,
// continued fraction (modified Lentz) for the complement otherwise.
double incomplete_gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  const double log_prefix = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 500; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return std::exp(log_prefix) * sum;
  }
  const double tiny = std::numeric_limits<double>::min() / 1e-30;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double frac = d;
  for (int n = 1; n < 500; ++n) {
    const double an = -n * (n - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    frac *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return 1.0 - std::exp(log_prefix) * frac;
}

}  // namespace

double gamma_log_pdf(double x, double shape, double rate) {
  if (shape <= 0.0 || rate <= 0.0) {
    throw ConfigError("gamma distribution requires positive shape and rate");
  }
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  return shape * std::log(rate) - std::lgamma(shape) +
         (shape - 1.0) * std::log(x) - rate * x;
}

double gamma_pdf(double x, double shape, double rate) {
  const double lp = gamma_log_pdf(x, shape, rate);
  return std::isinf(lp) ? 0.0 : std::exp(lp);
}

double gamma_cdf(double x, double shape, double rate) {
  if (shape <= 0.0 || rate <= 0.0) {
    throw ConfigError("gamma distribution requires positive shape and rate");
  }
  if (x <= 0.0) return 0.0;
  return incomplete_gamma_p(shape, rate * x);
}

double gamma_quantile(double p, double shape, double rate) {
  if (p < 0.0 || p > 1.0) throw ConfigError("gamma quantile needs p in [0, 1]");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  // Bracket around the mean, then bisect; 200 halvings are plenty for double.
  double lo = 0.0;
  double hi = shape / rate;
  while (gamma_cdf(hi, shape, rate) < p) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (gamma_cdf(mid, shape, rate) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-14 * hi) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace bpt
