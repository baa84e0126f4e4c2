#pragma once

#include <array>

namespace robmse {

enum class EdgeworthOrder { One, Two };

/// Standardized summands with third moment rho_t and excess kurtosis kappa_t.
struct EdgeworthParams {
  long n = 1;
  double rho_t = 0.0;
  double kappa_t = 0.0;
  EdgeworthOrder order = EdgeworthOrder::Two;
};

/// Unclamped expansion H_n (order One) or G_n (order Two) at s.
double edgeworth_cdf_raw(double s, const EdgeworthParams& p);

/// edgeworth_cdf_raw clamped to [0, 1].
double edgeworth_cdf(double s, const EdgeworthParams& p);

/// exp(-2 n eps^2 / M^2) for sums of summands confined to an interval of width M.
double hoeffding_bound(long n, double eps, double M);

/// Integer coefficients of E[X^j], X ~ Bin(n, p), as a polynomial in p and n:
/// E[X^j] = sum_{a,k} coef[a][k] p^a n^k.
using BinomialPolynomial = std::array<std::array<long, 5>, 5>;
const BinomialPolynomial& binomial_moment_polynomial(int j);

/// E[X^j] for X ~ Bin(n, p), j in 1..4.
double binomial_moments(long n, double p, int j);

/// Same moment written as a polynomial in r and sqrt(n) with p = r / sqrt(n).
double binomial_moments_shrinking(long n, double r, int j);

/// exp(-kappa r sqrt(n)) with kappa = k1 log k1 + 1 - k1; the o(sqrt n)
/// slack of the asymptotic statement is omitted.
double binomial_tail_bound(long n, double r, double k1);

/// E[X^k 1{X >= c}] for X ~ N(0,1), k in 0..8.
double truncated_normal_moment(int k, double c);

}  // namespace robmse
