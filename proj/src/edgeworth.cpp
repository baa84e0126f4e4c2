#include "robmse/edgeworth.hpp"

#include <algorithm>
#include <cmath>

#include "robmse/errors.hpp"
#include "robmse/normal.hpp"

namespace robmse {
namespace {

// E[X^j] = sum_k S(j, k) n^(k) p^k with falling factorials n^(k); expanded in n.
constexpr BinomialPolynomial kMoment1 = {{{0, 0, 0, 0, 0}, {0, 1, 0, 0, 0}}};
constexpr BinomialPolynomial kMoment2 = {{{0, 0, 0, 0, 0}, {0, 1, 0, 0, 0}, {0, -1, 1, 0, 0}}};
constexpr BinomialPolynomial kMoment3 = {
    {{0, 0, 0, 0, 0}, {0, 1, 0, 0, 0}, {0, -3, 3, 0, 0}, {0, 2, -3, 1, 0}}};
constexpr BinomialPolynomial kMoment4 = {{{0, 0, 0, 0, 0},
                                          {0, 1, 0, 0, 0},
                                          {0, -7, 7, 0, 0},
                                          {0, 12, -18, 6, 0},
                                          {0, -6, 11, -6, 1}}};

}  // namespace

double edgeworth_cdf_raw(double s, const EdgeworthParams& p) {
  const double dn = static_cast<double>(p.n);
  const double phi = normal_pdf(s);
  const double s2 = s * s;
  double value = normal_cdf(s) - phi / std::sqrt(dn) * (p.rho_t / 6.0) * (s2 - 1.0);
  if (p.order == EdgeworthOrder::Two) {
    const double s3 = s2 * s;
    value -= phi / dn *
             (p.kappa_t / 24.0 * (s3 - 3.0 * s) +
              p.rho_t * p.rho_t / 72.0 * (s3 * s2 - 10.0 * s3 + 15.0 * s));
  }
  return value;
}

double edgeworth_cdf(double s, const EdgeworthParams& p) {
  return std::clamp(edgeworth_cdf_raw(s, p), 0.0, 1.0);
}

double hoeffding_bound(long n, double eps, double M) {
  if (!(M > 0.0)) throw DomainError("range width must be positive");
  return std::exp(-2.0 * static_cast<double>(n) * eps * eps / (M * M));
}

const BinomialPolynomial& binomial_moment_polynomial(int j) {
  switch (j) {
    case 1:
      return kMoment1;
    case 2:
      return kMoment2;
    case 3:
      return kMoment3;
    case 4:
      return kMoment4;
    default:
      throw DomainError("binomial moment order must be 1..4");
  }
}

double binomial_moments(long n, double p, int j) {
  const BinomialPolynomial& coef = binomial_moment_polynomial(j);
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("probability outside [0, 1]");
  const double dn = static_cast<double>(n);
  double sum = 0.0;
  for (int a = 0; a <= 4; ++a) {
    for (int k = 0; k <= 4; ++k) {
      if (coef[a][k] != 0) sum += static_cast<double>(coef[a][k]) * std::pow(p, a) * std::pow(dn, k);
    }
  }
  return sum;
}

double binomial_moments_shrinking(long n, double r, int j) {
  const BinomialPolynomial& coef = binomial_moment_polynomial(j);
  const double sqn = std::sqrt(static_cast<double>(n));
  double sum = 0.0;
  for (int a = 0; a <= 4; ++a) {
    for (int k = 0; k <= 4; ++k) {
      if (coef[a][k] != 0) sum += static_cast<double>(coef[a][k]) * std::pow(r, a) * std::pow(sqn, 2 * k - a);
    }
  }
  return sum;
}

double binomial_tail_bound(long n, double r, double k1) {
  if (!(k1 > 1.0)) throw DomainError("k1 must exceed 1");
  const double kappa = k1 * std::log(k1) + 1.0 - k1;
  return std::exp(-kappa * r * std::sqrt(static_cast<double>(n)));
}

double truncated_normal_moment(int k, double c) {
  if (k < 0 || k > 8) throw DomainError("truncated moment order must be 0..8");
  double even = normal_sf(c);  // k = 0
  double odd = normal_pdf(c);  // k = 1
  if (k == 0) return even;
  if (k == 1) return odd;
  const double phi = normal_pdf(c);
  for (int m = 2; m <= k; ++m) {
    double& slot = (m % 2 == 0) ? even : odd;
    slot = std::pow(c, m - 1) * phi + (m - 1) * slot;
  }
  return (k % 2 == 0) ? even : odd;
}

}  // namespace robmse
