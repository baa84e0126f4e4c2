#include "robmse/risk_estimate.hpp"

namespace robmse {

std::string_view to_string(RiskMethod m) {
  switch (m) {
    case RiskMethod::Asy0:
      return "asy0";
    case RiskMethod::Asy1:
      return "asy1";
    case RiskMethod::Asy2:
      return "asy2";
    case RiskMethod::ExactC:
      return "exactC";
    case RiskMethod::ExactD:
      return "exactD";
    case RiskMethod::MonteCarlo:
      return "mc";
  }
  return "?";
}

std::optional<RiskMethod> parse_method(std::string_view s) {
  for (RiskMethod m : {RiskMethod::Asy0, RiskMethod::Asy1, RiskMethod::Asy2, RiskMethod::ExactC,
                       RiskMethod::ExactD, RiskMethod::MonteCarlo}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

}  // namespace robmse
