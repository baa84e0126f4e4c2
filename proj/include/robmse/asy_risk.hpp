#pragma once

#include <algorithm>
#include <cmath>
#include <string_view>

#include "robmse/ic_model.hpp"

namespace robmse {

enum class Side { Left, Right, Tie };
enum class SideRequest { Left, Right, Auto };

std::string_view to_string(Side s);

/// Shrinking contamination neighbourhood thinned below the breakdown point.
struct ContaminationSpec {
  double radius_r = 0.0;
  long n = 1;
  double contaminating_point = 100.0;
  SideRequest side = SideRequest::Auto;
  double eps0 = 0.5;

  /// Largest admissible number of contaminated observations, ceil(eps0 n) - 1.
  long cap() const { return static_cast<long>(std::ceil(eps0 * static_cast<double>(n))) - 1; }
  /// min(r, sqrt n), so that the contamination probability stays in [0, 1].
  double effective_radius() const { return std::min(radius_r, std::sqrt(static_cast<double>(n))); }
  double contamination_prob() const { return effective_radius() / std::sqrt(static_cast<double>(n)); }
  /// Throws DomainError on n < 1, r < 0 or eps0 outside (0, 1/2].
  void validate() const;
};

/// Range of the score; only needed to decide the contamination side.
struct ScoreBounds {
  double sup = 0.0;
  double inf = 0.0;
  static ScoreBounds symmetric(double b) { return {b, -b}; }
  double b() const { return std::max(sup, -inf); }
};

/// Cumulative n * maxMSE at orders n^0, n^-1/2 and n^-1.
struct RiskExpansion {
  double order0 = 0.0;
  double order1 = 0.0;
  double order2 = 0.0;
  double A1 = 0.0;
  double A2 = 0.0;
  Side side_used = Side::Tie;

  double order(int k) const { return k == 0 ? order0 : (k == 1 ? order1 : order2); }
};

/// Bias, squared bias and variance terms; C + D reproduces A at each order.
struct BiasVarExpansion {
  double B10 = 0.0;
  double B11 = 0.0;
  double B2 = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double D1 = 0.0;
  double D2 = 0.0;
  Side side_used = Side::Tie;
};

/// Least favourable side. Compares sup psi with -inf psi first and falls
/// back to the v1t rule when the score range is symmetric.
Side choose_side(const MomentCoefficients& mc, const ScoreBounds& bounds, double r, long n);
Side choose_side(const MomentCoefficients& mc, double b, double v0, double r, long n);

RiskExpansion risk_expansion(const MomentCoefficients& mc, const ScoreBounds& bounds,
                             const ContaminationSpec& spec);
RiskExpansion risk_expansion(const MomentCoefficients& mc, double b, const ContaminationSpec& spec);

BiasVarExpansion bias_var_expansion(const MomentCoefficients& mc, const ScoreBounds& bounds,
                                    const ContaminationSpec& spec);
BiasVarExpansion bias_var_expansion(const MomentCoefficients& mc, double b,
                                    const ContaminationSpec& spec);

/// Second-order risk when l2 = v1t = rho0 = 0.
double symmetric_mse(double b, double v0, double r, long n);

/// (pi/2)(1 + (pi/2 - 5/3)/n): third-order ideal risk of the c -> 0 limit.
double ideal_gaussian_limit(long n);

/// Second-order maximal risk of the sample median; f0, f1 are the ideal
/// density and its derivative at zero.
double median_mse_so(double f0, double f1, double r, long n);

/// Unstandardized maxMSE on a fixed-radius thinned ball, without the
/// O(1/n^2) group. Throws DomainError unless 0 <= eps < eps0.
double fixed_radius_mse(const MomentCoefficients& mc, double b, double eps, long n,
                        SideRequest side = SideRequest::Auto, double eps0 = 0.5);

struct FraimanTerms {
  double as_bias = 0.0;
  double as_var = 0.0;
  double as_mse = 0.0;
};

/// Bias and variance from the fixed-epsilon bias equation with eps = r/sqrt(n).
FraimanTerms fraiman_check(double b, double v0, double r, long n);

}  // namespace robmse
