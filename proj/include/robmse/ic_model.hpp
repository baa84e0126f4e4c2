#pragma once

#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace robmse {

inline constexpr double kInfiniteClip = std::numeric_limits<double>::infinity();

/// Hampel-type influence curve psi(x) = A * x * min(1, c/|x|) for the
/// standard normal location model. c = kInfiniteClip gives psi(x) = x.
class InfluenceCurve {
 public:
  double clip_c() const { return c_; }
  double lagrange_A() const { return A_; }
  double b_hat() const { return b_; }
  double b_check() const { return -b_; }
  double b() const { return b_; }
  /// sup|psi| / (sup psi - inf psi); zero for the unbounded identity score.
  double breakdown_eps0() const { return bounded() ? 0.5 : 0.0; }
  bool bounded() const { return c_ != kInfiniteClip; }

  double operator()(double x) const {
    if (!bounded()) return x;
    if (x > c_) return b_;
    if (x < -c_) return -b_;
    return A_ * x;
  }

 private:
  friend InfluenceCurve make_hampel_ic(double c);
  InfluenceCurve(double c, double A, double b) : c_(c), A_(A), b_(b) {}

  double c_;
  double A_;
  double b_;
};

/// Throws DomainError unless c > 0 (or c == kInfiniteClip).
InfluenceCurve make_hampel_ic(double c);

double psi_eval(const InfluenceCurve& ic, double x);

/// Expansion coefficients of the score moment functions around t = 0.
struct MomentCoefficients {
  double l1 = -1.0;
  double l2 = 0.0;
  double l3 = 0.0;
  double v0 = 1.0;
  double v1t = 0.0;
  double v2t = 0.0;
  double rho0 = 0.0;
  double rho1 = 0.0;
  double kappa0 = 0.0;
  double holder_delta = 1.0;

  /// Flat key/value view for serialization.
  std::vector<std::pair<std::string, double>> as_record() const;
};

/// Closed forms for the Gaussian Hampel family; c = kInfiniteClip gives the
/// identity-score values and tiny c switches to the median limit.
MomentCoefficients gaussian_coeffs(double c);

/// The c -> 0 limit (1, pi/2, -2/pi, 2 sqrt(2/pi), -2) for (l3, v0^2, v2t,
/// rho1, kappa0); the clipping height tends to sqrt(pi/2).
MomentCoefficients median_limit_coeffs();

/// Generic monotone score for the quadrature route.
struct ScoreFunction {
  std::function<double(double)> psi;
  /// Points where psi is not smooth; panels are split at x = t + kink.
  std::vector<double> kinks;
};

struct QuadratureConfig {
  double abs_tol = 1e-12;
  /// The integration range is [min kink - half_width, max kink + half_width].
  double half_width = 12.0;
  /// Finite-difference step. The Richardson pair uses h and h/2.
  double fd_step = 1e-2;
  unsigned max_depth = 20;
  /// Ideal-model density; standard normal when empty.
  std::function<double(double)> density;
  /// Points where the density itself is not smooth. Unlike score kinks they
  /// do not move with t.
  std::vector<double> density_breaks;
};

MomentCoefficients numeric_coeffs(const ScoreFunction& score, const QuadratureConfig& cfg = {});

ScoreFunction score_of(const InfluenceCurve& ic);

/// Closed-form score moments as functions of the shift t:
/// L = E psi(X - t), S = E psi^2, M = E psi^3, N = E psi^4.
class MomentFunctions {
 public:
  explicit MomentFunctions(const InfluenceCurve& ic) : ic_(ic) {}

  double L(double t) const;
  double S(double t) const;
  double M(double t) const;
  double N(double t) const;
  double V(double t) const;
  double rho(double t) const;
  double kappa(double t) const;

 private:
  InfluenceCurve ic_;
};

MomentFunctions moment_functions(const InfluenceCurve& ic);

/// Root of 2(phi(c) - c Phi(-c)) = r^2 c; kInfiniteClip when r == 0.
double solve_c0(double r);

}  // namespace robmse
