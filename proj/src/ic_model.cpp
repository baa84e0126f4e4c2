#include "robmse/ic_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "robmse/errors.hpp"
#include "robmse/normal.hpp"
#include "robmse/quadrature.hpp"

namespace robmse {
namespace {

// Below this clipping height the closed forms cancel catastrophically
// (numerators and denominators are O(c^3)); the quadrature route is used.
constexpr double kClosedFormMinC = 0.05;

double pow2(double x) { return x * x; }

}  // namespace

InfluenceCurve make_hampel_ic(double c) {
  if (std::isnan(c) || c <= 0.0) throw DomainError("clipping height must be positive");
  if (c == kInfiniteClip) return InfluenceCurve(c, 1.0, kInfiniteClip);
  const double A = 1.0 / (2.0 * normal_cdf(c) - 1.0);
  return InfluenceCurve(c, A, A * c);
}

double psi_eval(const InfluenceCurve& ic, double x) { return ic(x); }

std::vector<std::pair<std::string, double>> MomentCoefficients::as_record() const {
  return {{"l1", l1},     {"l2", l2},     {"l3", l3},         {"v0", v0},
          {"v1t", v1t},   {"v2t", v2t},   {"rho0", rho0},     {"rho1", rho1},
          {"kappa0", kappa0}, {"holder_delta", holder_delta}};
}

MomentCoefficients median_limit_coeffs() {
  MomentCoefficients mc;
  mc.l3 = 1.0;
  mc.v0 = std::sqrt(std::numbers::pi / 2.0);
  mc.v2t = -2.0 / std::numbers::pi;
  mc.rho1 = 2.0 * std::sqrt(2.0 / std::numbers::pi);
  mc.kappa0 = -2.0;
  return mc;
}

MomentCoefficients gaussian_coeffs(double c) {
  if (std::isnan(c) || c < 0.0) throw DomainError("clipping height must be nonnegative");
  if (c == 0.0) return median_limit_coeffs();
  MomentCoefficients mc;
  if (c == kInfiniteClip) return mc;
  if (c < kClosedFormMinC) return numeric_coeffs(score_of(make_hampel_ic(c)));

  const double Phi = normal_cdf(c);
  const double phi = normal_pdf(c);
  const double tail = normal_sf(c);
  const double A = 1.0 / (2.0 * Phi - 1.0);
  const double b = A * c;
  const double D = 2.0 * c * c * tail + 2.0 * Phi - 1.0 - 2.0 * c * phi;

  mc.l3 = 2.0 * c * phi * A;
  mc.v0 = std::sqrt(2.0 * b * b * tail + A * (1.0 - 2.0 * b * phi));
  mc.v2t = (6.0 * Phi - 4.0 * Phi * Phi - 2.0 - 2.0 * c * phi) / D;
  const double v3 = mc.v0 * mc.v0 * mc.v0;
  mc.rho1 = 3.0 * A * A * A * (1.0 - 2.0 * Phi + 2.0 * c * phi) / v3 + 3.0 / mc.v0;
  mc.kappa0 = (2.0 * std::pow(c, 4) * tail - 2.0 * c * (c * c + 3.0) * phi +
               3.0 * (2.0 * Phi - 1.0)) /
                  (D * D) -
              3.0;
  return mc;
}

ScoreFunction score_of(const InfluenceCurve& ic) {
  ScoreFunction s;
  s.psi = [ic](double x) { return ic(x); };
  if (ic.bounded()) s.kinks = {-ic.clip_c(), ic.clip_c()};
  return s;
}

MomentCoefficients numeric_coeffs(const ScoreFunction& score, const QuadratureConfig& cfg) {
  std::function<double(double)> density = cfg.density;
  if (!density) density = [](double x) { return normal_pdf(x); };
  const double kmin = score.kinks.empty() ? 0.0 : *std::min_element(score.kinks.begin(), score.kinks.end());
  const double kmax = score.kinks.empty() ? 0.0 : *std::max_element(score.kinks.begin(), score.kinks.end());
  const double lo = kmin - cfg.half_width;
  const double hi = kmax + cfg.half_width;

  // j-th raw moment of psi(X - t).
  auto moment = [&](int j, double t) {
    std::vector<double> breaks = cfg.density_breaks;
    for (double k : score.kinks) breaks.push_back(t + k);
    auto f = [&](double x) { return std::pow(score.psi(x - t), j) * density(x); };
    return integrate_panels(f, lo, hi, breaks, cfg.abs_tol, cfg.max_depth).value;
  };

  struct Derivs {
    double d0, d1, d2, d3;
  };
  // Central differences with one Richardson step each.
  auto derivs = [&](int j) {
    const double h = cfg.fd_step;
    const double g0 = moment(j, 0.0);
    const double gp1 = moment(j, h), gm1 = moment(j, -h);
    const double gp2 = moment(j, 2 * h), gm2 = moment(j, -2 * h);
    const double gph = moment(j, h / 2), gmh = moment(j, -h / 2);
    auto d1 = [](double fp, double fm, double s) { return (fp - fm) / (2 * s); };
    auto d2 = [g0](double fp, double fm, double s) { return (fp - 2 * g0 + fm) / (s * s); };
    auto d3 = [](double fp2, double fp, double fm, double fm2, double s) {
      return (fp2 - 2 * fp + 2 * fm - fm2) / (2 * s * s * s);
    };
    Derivs d{};
    d.d0 = g0;
    d.d1 = (4 * d1(gph, gmh, h / 2) - d1(gp1, gm1, h)) / 3;
    d.d2 = (4 * d2(gph, gmh, h / 2) - d2(gp1, gm1, h)) / 3;
    d.d3 = (4 * d3(gp1, gph, gmh, gm1, h / 2) - d3(gp2, gp1, gm1, gm2, h)) / 3;
    return d;
  };

  const Derivs L = derivs(1);
  const Derivs S = derivs(2);
  const Derivs M = derivs(3);
  const double N0 = moment(4, 0.0);

  MomentCoefficients mc;
  mc.l1 = L.d1;
  mc.l2 = L.d2;
  mc.l3 = L.d3;
  mc.v0 = std::sqrt(S.d0);
  mc.v1t = S.d1 / (2 * S.d0);
  mc.v2t = (2 * S.d2 - 4 - pow2(S.d1) / S.d0) / (4 * S.d0);
  const double v3 = S.d0 * mc.v0;
  mc.rho0 = M.d0 / v3;
  mc.rho1 = (-3 * M.d0 * mc.v1t + M.d1 + 3 * S.d0) / v3;
  mc.kappa0 = N0 / pow2(S.d0) - 3;
  return mc;
}

double MomentFunctions::L(double t) const {
  if (!ic_.bounded()) return -t;
  const double c = ic_.clip_c();
  const double A = ic_.lagrange_A();
  // L is odd; the survival-function form avoids cancelling terms of size |t|.
  const double u = std::abs(t);
  const double v = -c + (u + c) * normal_sf(u + c) - (u - c) * normal_sf(u - c) +
                   normal_pdf(u - c) - normal_pdf(u + c);
  return t < 0.0 ? -A * v : A * v;
}

double MomentFunctions::S(double t) const {
  if (!ic_.bounded()) return 1 + t * t;
  const double c = ic_.clip_c();
  const double A = ic_.lagrange_A();
  const double inner = normal_mass(t - c, t + c);
  return A * A *
         (c * c * (1 - inner) + (1 + t * t) * inner + (t - c) * normal_pdf(t + c) -
          (t + c) * normal_pdf(t - c));
}

double MomentFunctions::M(double t) const {
  if (!ic_.bounded()) return -t * t * t - 3 * t;
  const double c = ic_.clip_c();
  const double A = ic_.lagrange_A();
  const double c3 = c * c * c, t3 = t * t * t;
  return A * A * A *
         (c3 - normal_cdf(t + c) * (c3 + t3 + 3 * t) - normal_cdf(t - c) * (c3 - t3 - 3 * t) +
          (t * t + t * c + 2 + c * c) * normal_pdf(t - c) -
          (t * t - t * c + c * c + 2) * normal_pdf(t + c));
}

double MomentFunctions::N(double t) const {
  const double t2 = t * t;
  if (!ic_.bounded()) return t2 * t2 + 6 * t2 + 3;
  const double c = ic_.clip_c();
  const double A = ic_.lagrange_A();
  const double c2 = c * c;
  const double inner = normal_mass(t - c, t + c);
  return pow2(A * A) *
         (c2 * c2 + inner * (t2 * t2 + 6 * t2 + 3 - c2 * c2) +
          (t2 * t - t2 * c + t * c2 - c2 * c + 5 * t - 3 * c) * normal_pdf(t + c) -
          (t2 * t + t2 * c + t * c2 + c2 * c + 5 * t + 3 * c) * normal_pdf(t - c));
}

double MomentFunctions::V(double t) const {
  const double l = L(t);
  return std::sqrt(std::max(S(t) - l * l, 0.0));
}

double MomentFunctions::rho(double t) const {
  const double l = L(t);
  const double v = V(t);
  return (M(t) - 3 * l * S(t) + 2 * l * l * l) / (v * v * v);
}

double MomentFunctions::kappa(double t) const {
  const double l = L(t);
  const double v2 = pow2(V(t));
  return (N(t) - 4 * M(t) * l + 6 * S(t) * l * l - 3 * pow2(l * l)) / (v2 * v2) - 3;
}

MomentFunctions moment_functions(const InfluenceCurve& ic) { return MomentFunctions(ic); }

double solve_c0(double r) {
  if (std::isnan(r) || r < 0.0) throw DomainError("radius must be nonnegative");
  if (r == 0.0) return kInfiniteClip;
  const double r2 = r * r;
  auto g = [r2](double c) { return 2.0 * (normal_pdf(c) - c * normal_sf(c)) - r2 * c; };
  double lo = 0.0;
  double hi = 1.0;
  while (g(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-13 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace robmse
