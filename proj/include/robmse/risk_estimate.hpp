#pragma once

#include <optional>
#include <string_view>

namespace robmse {

enum class RiskMethod { Asy0, Asy1, Asy2, ExactC, ExactD, MonteCarlo };

std::string_view to_string(RiskMethod m);
/// Accepts the CLI spellings asy0, asy1, asy2, exactC, exactD, mc.
std::optional<RiskMethod> parse_method(std::string_view s);

/// A risk value on the n * MSE scale. Deterministic methods carry a zero
/// standard error and a degenerate interval.
struct RiskEstimate {
  double value = 0.0;
  double std_err = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  RiskMethod method = RiskMethod::Asy0;

  static RiskEstimate exact(double value, RiskMethod method) {
    return {value, 0.0, value, value, method};
  }
  static RiskEstimate stochastic(double value, double std_err, RiskMethod method) {
    return {value, std_err, value - 1.96 * std_err, value + 1.96 * std_err, method};
  }
  bool covers(double x) const { return ci_low <= x && x <= ci_high; }
};

}  // namespace robmse
