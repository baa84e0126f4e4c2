#pragma once

#include <cstddef>
#include <vector>

#include "robmse/asy_risk.hpp"
#include "robmse/ic_model.hpp"
#include "robmse/risk_estimate.hpp"

namespace robmse {

struct Atom {
  double location = 0.0;
  double mass = 0.0;
};

/// Law on the lattice origin + j * step: an absolutely continuous part
/// lumped per cell plus explicit point masses sitting on lattice points.
class LatticeDistribution {
 public:
  LatticeDistribution(double origin, double step, std::vector<double> weights,
                      std::vector<Atom> atoms);

  double origin() const { return origin_; }
  double step() const { return step_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return weights_.size(); }
  double point(std::size_t j) const { return origin_ + static_cast<double>(j) * step_; }

  /// Lattice index of x; throws DomainError if x is off the lattice.
  std::size_t index_of(double x) const;
  /// Cell masses with the atoms folded in.
  std::vector<double> combined() const;

  double total_mass() const;
  double mean() const;
  double variance() const;

  /// P(T < x) + P(T = x) / 2, linearly interpolated between lattice points.
  double cdf_midpoint(double x) const;
  /// Total atom mass located at x; this is the gap between P(T <= x) and P(T < x).
  double atom_mass_at(double x) const;

 private:
  double origin_;
  double step_;
  std::vector<double> weights_;
  std::vector<Atom> atoms_;
};

struct GridConfig {
  /// Lattice cells across [-b, b] for a single score; a power of two.
  int grid_size = 256;
  /// Gauss-Legendre nodes per integration panel.
  int u_points = 10;
  /// Bound on the neglected tail of the risk integral.
  double tail_tolerance = 1e-10;
  /// The independent-mixture algorithm integrates S^2 only up to this range.
  double estimator_range = 5.0;
  /// Contamination counts with smaller binomial weight are skipped.
  double weight_cutoff = 1e-15;
  /// Largest FFT length accepted by convolve_power.
  std::size_t max_fft_size = std::size_t{1} << 24;

  /// Throws DomainError on inconsistent values.
  void validate() const;
};

/// Law of psi(X - t), X ~ N(0,1): atoms at -b and +b, exact normal masses
/// for the cells in between.
LatticeDistribution psi_pushforward(const InfluenceCurve& ic, double t, int grid_size);

/// Law of the sum of m independent copies. Atoms are propagated exactly.
/// Throws SizeError when the FFT would exceed max_fft_size.
LatticeDistribution convolve_power(const LatticeDistribution& d, long m,
                                   std::size_t max_fft_size = std::size_t{1} << 24);

/// P(S_n < t | K = k) for the M-estimator with k observations at the
/// contaminating point, using the midpoint of the <= and < versions.
double cdf_m_estimator(const InfluenceCurve& ic, long n, long k, double t,
                       double contaminating_point, const GridConfig& grid = {});

/// Conditional n * MSE given exactly k contaminated observations.
double mse_from_tail(const InfluenceCurve& ic, long n, long k, double contaminating_point,
                     const GridConfig& grid = {});

/// Exact conditioning on K <= cap with binomial weights.
RiskEstimate exact_mse_algoC(const InfluenceCurve& ic, const ContaminationSpec& spec,
                             const GridConfig& grid = {});

/// Independent mixture (1 - p) F + p delta without the cap; the squared
/// estimator is integrated up to grid.estimator_range.
RiskEstimate exact_mse_algoD(const InfluenceCurve& ic, const ContaminationSpec& spec,
                             const GridConfig& grid = {});

}  // namespace robmse
