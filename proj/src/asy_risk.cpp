#include "robmse/asy_risk.hpp"

#include <cmath>
#include <numbers>

#include "robmse/errors.hpp"

namespace robmse {
namespace {

constexpr double kTieTolerance = 1e-12;

double sign_of(Side s) { return s == Side::Left ? -1.0 : 1.0; }

Side resolve(const MomentCoefficients& mc, const ScoreBounds& bounds, double r, long n,
             SideRequest req) {
  switch (req) {
    case SideRequest::Left:
      return Side::Left;
    case SideRequest::Right:
      return Side::Right;
    case SideRequest::Auto:
      break;
  }
  return choose_side(mc, bounds, r, n);
}

}  // namespace

std::string_view to_string(Side s) {
  switch (s) {
    case Side::Left:
      return "left";
    case Side::Right:
      return "right";
    case Side::Tie:
      return "tie";
  }
  return "?";
}

void ContaminationSpec::validate() const {
  if (n < 1) throw DomainError("sample size must be positive");
  if (std::isnan(radius_r) || radius_r < 0.0) throw DomainError("radius must be nonnegative");
  if (!(eps0 > 0.0 && eps0 <= 0.5)) throw DomainError("breakdown point must lie in (0, 1/2]");
}

Side choose_side(const MomentCoefficients& mc, const ScoreBounds& bounds, double r, long n) {
  if (bounds.sup < -bounds.inf) return Side::Left;
  if (bounds.sup > -bounds.inf) return Side::Right;
  return choose_side(mc, bounds.b(), mc.v0, r, n);
}

Side choose_side(const MomentCoefficients& mc, double b, double v0, double r, long n) {
  const double dn = static_cast<double>(n);
  const double q = b * b / (v0 * v0);
  const double rhs =
      -mc.l2 / 4.0 * (q * (r * r + 3.0) * (1.0 + r / std::sqrt(dn) - 2.0 * r * r / dn) +
                      3.0 * (1.0 - q));
  const double diff = mc.v1t - rhs;
  if (std::abs(diff) < kTieTolerance) return Side::Tie;
  return diff > 0.0 ? Side::Left : Side::Right;
}

RiskExpansion risk_expansion(const MomentCoefficients& mc, const ScoreBounds& bounds,
                             const ContaminationSpec& spec) {
  spec.validate();
  const double r = spec.radius_r;
  const double b = bounds.b();
  RiskExpansion out;
  out.side_used = resolve(mc, bounds, r, spec.n, spec.side);
  const double s = sign_of(out.side_used);

  const double l2 = mc.l2, l3 = mc.l3, v1 = mc.v1t, v2 = mc.v2t;
  const double v0 = mc.v0, v02 = v0 * v0, v03 = v02 * v0, v04 = v02 * v02;
  const double b2 = b * b, b3 = b2 * b, b4 = b2 * b2;
  const double r2 = r * r, r4 = r2 * r2;

  out.A1 = v02 * (s * (4 * v1 + 3 * l2) * b + 1) + b2 + (2 * b2 + s * l2 * b3) * r2;
  out.A2 = v03 * ((l2 + 2 * v1) * mc.rho0 + 2.0 / 3.0 * mc.rho1) +
           v04 * (3 * v2 + 15.0 / 4.0 * l2 * l2 + l3 + 9 * v1 * v1 + 12 * v1 * l2) +
           (v02 * ((3 * v2 + 3 * v1 * v1 + 7.5 * l2 * l2 + 2 * l3 + 12 * v1 * l2) * b2 + 1 +
                   s * (8 * v1 + 6 * l2) * b) +
            3 * s * l2 * b3 + 5 * b2) *
               r2 +
           ((1.25 * l2 * l2 + l3 / 3.0) * b4 + 3 * s * l2 * b3 + 3 * b2) * r4;

  const double sqn = std::sqrt(static_cast<double>(spec.n));
  out.order0 = r2 * b2 + v02;
  out.order1 = out.order0 + r / sqn * out.A1;
  out.order2 = out.order1 + out.A2 / static_cast<double>(spec.n);
  return out;
}

RiskExpansion risk_expansion(const MomentCoefficients& mc, double b, const ContaminationSpec& spec) {
  return risk_expansion(mc, ScoreBounds::symmetric(b), spec);
}

BiasVarExpansion bias_var_expansion(const MomentCoefficients& mc, const ScoreBounds& bounds,
                                    const ContaminationSpec& spec) {
  spec.validate();
  const double r = spec.radius_r;
  const double b = bounds.b();
  BiasVarExpansion out;
  out.side_used = resolve(mc, bounds, r, spec.n, spec.side);
  const double s = sign_of(out.side_used);

  const double l2 = mc.l2, l3 = mc.l3, v1 = mc.v1t, v2 = mc.v2t;
  const double v0 = mc.v0, v02 = v0 * v0, v03 = v02 * v0, v04 = v02 * v02;
  const double b2 = b * b, b3 = b2 * b, b4 = b2 * b2;
  const double r2 = r * r, r4 = r2 * r2;

  out.B10 = (0.5 * l2 + v1) * v02;
  out.B11 = b * (1 + s * 0.5 * l2 * b);
  out.B2 = ((0.5 * l2 * l2 + l3 / 6.0) * b3 + b + s * l2 * b2) * r2 + b * (1 + s * 0.5 * l2 * b) +
           ((0.5 * l3 + 1.5 * l2 * l2 + v2 + v1 * v1 + 3 * v1 * l2) * b + s * 0.5 * l2 + s * v1) *
               v02;

  out.C1 = b2 * r2 * (s * l2 * b + 2) + s * b * (l2 + 2 * v1) * v02;
  out.C2 = (v1 * l2 + 0.25 * l2 * l2 + v1 * v1) * v04 +
           (3 * b2 + s * 3 * l2 * b3 + (1.25 * l2 * l2 + l3 / 3.0) * b4) * r4 +
           ((3.5 * l2 * l2 + l3 + 2 * v2 + 2 * v1 * v1 + 7 * v1 * l2) * b2 * v02 +
            s * (2 * l2 + 4 * v1) * b * v02 + 2 * b2 + s * l2 * b3) *
               r2;

  out.D1 = (s * 2 * (l2 + v1) * b + 1) * v02 + b2;
  out.D2 = (l3 + 3.5 * l2 * l2 + 11 * v1 * l2 + 8 * v1 * v1 + 3 * v2) * v04 +
           (2.0 / 3.0 * mc.rho1 + (l2 + 2 * v1) * mc.rho0) * v03 +
           (((l3 + v1 * v1 + v2 + 5 * v1 * l2 + 4 * l2 * l2) * b2 + s * 4 * (l2 + v1) * b + 1) * v02 +
            s * 2 * l2 * b3 + 3 * b2) *
               r2;
  return out;
}

BiasVarExpansion bias_var_expansion(const MomentCoefficients& mc, double b,
                                    const ContaminationSpec& spec) {
  return bias_var_expansion(mc, ScoreBounds::symmetric(b), spec);
}

double symmetric_mse(double b, double v0, double r, long n) {
  const double q = r / std::sqrt(static_cast<double>(n));
  return (r * r * b * b + v0 * v0) * (1 + q) + q * b * b * (1 + r * r);
}

double ideal_gaussian_limit(long n) {
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  return kHalfPi * (1.0 + (kHalfPi - 5.0 / 3.0) / static_cast<double>(n));
}

double median_mse_so(double f0, double f1, double r, long n) {
  if (!(f0 > 0.0)) throw DomainError("density at zero must be positive");
  const double q = r / std::sqrt(static_cast<double>(n));
  return ((1 + r * r) * (1 + 2 * q) - q * f1 / (2 * f0 * f0) * (r * r + 3)) / (4 * f0 * f0);
}

double fixed_radius_mse(const MomentCoefficients& mc, double b, double eps, long n,
                        SideRequest side, double eps0) {
  if (std::isnan(eps) || eps < 0.0) throw DomainError("radius must be nonnegative");
  if (eps >= eps0) throw DomainError("radius must stay below the breakdown point");
  if (n < 1) throw DomainError("sample size must be positive");
  const double dn = static_cast<double>(n);
  const Side resolved =
      resolve(mc, ScoreBounds::symmetric(b), eps * std::sqrt(dn), n, side);
  const double s = sign_of(resolved);

  const double l2 = mc.l2, l3 = mc.l3, v1 = mc.v1t, v2 = mc.v2t;
  const double v02 = mc.v0 * mc.v0;
  const double b2 = b * b, b3 = b2 * b, b4 = b2 * b2;
  const double e2 = eps * eps;

  const double bias_part = e2 * b2 + e2 * eps * (2 * b2 + s * l2 * b3) +
                           e2 * e2 * ((1.25 * l2 * l2 + l3 / 3.0) * b4 + s * 3 * l2 * b3 + 3 * b2);
  const double var_part =
      v02 + eps * (v02 * (s * (4 * v1 + 3 * l2) * b + 1) + b2) +
      e2 * (5 * b2 + s * 3 * l2 * b3 +
            v02 * ((3 * v2 + 3 * v1 * v1 + 7.5 * l2 * l2 + 2 * l3 + 12 * v1 * l2) * b2 + 1 +
                   s * (8 * v1 + 6 * l2) * b));
  return bias_part + var_part / dn;
}

FraimanTerms fraiman_check(double b, double v0, double r, long n) {
  const double q = r / std::sqrt(static_cast<double>(n));
  FraimanTerms out;
  out.as_bias = r * b * (1 + q);
  out.as_var = v0 * v0 + q * (v0 * v0 + b * b);
  out.as_mse = (v0 * v0 + r * r * b * b) * (1 + q) + q * b * b * (1 + r * r);
  return out;
}

}  // namespace robmse
