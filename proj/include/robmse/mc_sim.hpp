#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "robmse/asy_risk.hpp"
#include "robmse/ic_model.hpp"
#include "robmse/risk_estimate.hpp"

namespace robmse {

/// Counter-based generator: the i-th draw of stream (seed, stream) is a pure
/// function of (seed, stream, i), so runs can be farmed out in any order.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Standard normal by inversion.
  double normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

enum class EstimatorKind { Hampel, Median };

struct Estimator {
  EstimatorKind kind = EstimatorKind::Hampel;
  double c = 0.7;

  static Estimator hampel(double c) { return {EstimatorKind::Hampel, c}; }
  static Estimator median() { return {EstimatorKind::Median, 0.0}; }
};

struct SimConfig {
  long runs = 10000;
  ContaminationSpec spec;
  std::uint64_t seed = 20240101;
  Estimator estimator;
  unsigned threads = 1;
};

struct ContaminatedSample {
  std::vector<double> values;
  long contaminated = 0;
  /// Whole contamination patterns rejected because they exceeded the cap.
  long redraws = 0;
};

/// One sample from the thinned neighbourhood: contamination indicators are
/// redrawn as a block until at most cap of them are set.
ContaminatedSample sample_contaminated(const SimConfig& cfg, std::uint64_t run_index);

/// Midpoint of [S*, S**] for the score equation sum psi(x_i - t) = 0.
double m_estimate(std::span<const double> sample, const InfluenceCurve& ic);

/// Sample median, averaging the two central order statistics for even n.
double median_estimate(std::span<const double> sample);

/// Per-run diagnostics: run index, contaminated count, estimate.
using RunObserver = std::function<void(std::uint64_t, long, double)>;

/// n times the mean squared estimate with a 95% CLT interval. The result is
/// bit-identical for any thread count.
RiskEstimate empirical_mse(const SimConfig& cfg, const RunObserver& observer = {});

}  // namespace robmse
