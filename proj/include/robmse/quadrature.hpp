#pragma once

#include <functional>
#include <vector>

namespace robmse {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod integral of f over [a, b], split at every
/// breakpoint inside the interval so each panel sees a smooth integrand.
/// Throws ToleranceError when the summed error estimate exceeds abs_tol.
QuadratureResult integrate_panels(const std::function<double(double)>& f, double a, double b,
                                  std::vector<double> breakpoints, double abs_tol,
                                  unsigned max_depth = 20);

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule; nodes ascending. Cached per n, safe to call concurrently.
const GaussLegendreRule& gauss_legendre(unsigned n);

}  // namespace robmse
