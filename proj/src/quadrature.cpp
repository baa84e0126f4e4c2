#include "robmse/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include "robmse/errors.hpp"

namespace robmse {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;

// Bisects until the Kronrod-Gauss difference meets tol on every piece.
// Boost's own adaptive driver is avoided because its error estimate is
// unreliable when the integral cancels to nearly zero.
QuadratureResult adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                          unsigned depth) {
  double err = 0.0;
  const double v = Kronrod::integrate(f, a, b, 0, 0.0, &err);
  if (err <= tol || depth == 0) return {v, err};
  const double mid = 0.5 * (a + b);
  const QuadratureResult left = adaptive(f, a, mid, 0.5 * tol, depth - 1);
  const QuadratureResult right = adaptive(f, mid, b, 0.5 * tol, depth - 1);
  return {left.value + right.value, left.error + right.error};
}

}  // namespace

QuadratureResult integrate_panels(const std::function<double(double)>& f, double a, double b,
                                  std::vector<double> breakpoints, double abs_tol,
                                  unsigned max_depth) {
  if (!(a < b)) return {};
  std::vector<double> edges{a};
  std::sort(breakpoints.begin(), breakpoints.end());
  for (double x : breakpoints) {
    if (x > edges.back() && x < b) edges.push_back(x);
  }
  edges.push_back(b);

  QuadratureResult out;
  const double panel_tol = abs_tol / static_cast<double>(edges.size() - 1);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const QuadratureResult part = adaptive(f, edges[i], edges[i + 1], panel_tol, max_depth);
    out.value += part.value;
    out.error += part.error;
  }
  if (out.error > abs_tol) throw ToleranceError("quadrature did not reach its tolerance", out.error);
  return out;
}

const GaussLegendreRule& gauss_legendre(unsigned n) {
  static std::mutex mu;
  static std::map<unsigned, std::unique_ptr<GaussLegendreRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (slot) return *slot;

  auto rule = std::make_unique<GaussLegendreRule>();
  // Nonnegative zeros, ascending.
  std::vector<double> zeros = boost::math::legendre_p_zeros<double>(static_cast<int>(n));
  auto weight = [n](double x) {
    double dp = boost::math::legendre_p_prime<double>(static_cast<int>(n), x);
    return 2.0 / ((1.0 - x * x) * dp * dp);
  };
  for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
    if (*it == 0.0) continue;
    rule->nodes.push_back(-*it);
    rule->weights.push_back(weight(*it));
  }
  for (double z : zeros) {
    rule->nodes.push_back(z);
    rule->weights.push_back(weight(z));
  }
  slot = std::move(rule);
  return *slot;
}

}  // namespace robmse
