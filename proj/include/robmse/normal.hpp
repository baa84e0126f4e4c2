#pragma once

#include <cmath>
#include <numbers>

namespace robmse {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;

/// Standard normal density.
inline double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

/// Standard normal distribution function.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Upper tail 1 - Phi(x), accurate for large x.
inline double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

/// P(a < X <= b) for X ~ N(0,1); picks the tail that avoids cancellation.
inline double normal_mass(double a, double b) {
  if (a > 0.0) return normal_sf(a) - normal_sf(b);
  return normal_cdf(b) - normal_cdf(a);
}

/// Inverse of the standard normal distribution function, p in (0,1).
double normal_quantile(double p);

}  // namespace robmse
