#pragma once

#include <cmath>

namespace bpt {

// Standard normal cdf via erfc; relative error well below 1e-12 in double.
inline double norm_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

inline double norm_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

// Gamma distribution in shape/rate parameterization.
double gamma_log_pdf(double x, double shape, double rate);
double gamma_pdf(double x, double shape, double rate);

// Regularized lower incomplete gamma P(shape, rate * x).
double gamma_cdf(double x, double shape, double rate);

// Inverse of gamma_cdf in x, by bracketed bisection.
double gamma_quantile(double p, double shape, double rate);

}  // namespace bpt
