#include "robmse/mc_sim.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "robmse/errors.hpp"
#include "robmse/normal.hpp"

namespace robmse {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr double kBisectionTol = 1e-10;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Fixed-shape pairwise sum so the rounding does not depend on scheduling.
double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(seed ^ mix64(stream + kGolden))) {}

std::uint64_t CounterRng::next_u64() { return mix64(key_ + (++counter_) * kGolden); }

double CounterRng::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() { return normal_quantile(uniform()); }

ContaminatedSample sample_contaminated(const SimConfig& cfg, std::uint64_t run_index) {
  const ContaminationSpec& spec = cfg.spec;
  spec.validate();
  const long n = spec.n;
  const long cap = spec.cap();
  const double p = spec.contamination_prob();
  CounterRng rng(cfg.seed, run_index);

  ContaminatedSample out;
  std::vector<char> hit(static_cast<std::size_t>(n), 0);
  for (;;) {
    long k = 0;
    for (long i = 0; i < n; ++i) {
      hit[i] = p > 0.0 && rng.uniform() < p;
      k += hit[i];
    }
    if (k <= cap) {
      out.contaminated = k;
      break;
    }
    ++out.redraws;
  }
  out.values.resize(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) out.values[i] = hit[i] ? spec.contaminating_point : rng.normal();
  return out;
}

double m_estimate(std::span<const double> sample, const InfluenceCurve& ic) {
  if (sample.empty()) throw DomainError("empty sample");
  if (!ic.bounded()) {
    double s = 0.0;
    for (double x : sample) s += x;
    return s / static_cast<double>(sample.size());
  }
  auto score = [&](double t) {
    double s = 0.0;
    for (double x : sample) s += ic(x - t);
    return s;
  };
  const auto [mn, mx] = std::minmax_element(sample.begin(), sample.end());
  const double lo0 = *mn - ic.clip_c() - 1.0;
  const double hi0 = *mx + ic.clip_c() + 1.0;

  // S* = sup{t : score(t) > 0}.
  double lo = lo0, hi = hi0;
  while (hi - lo > kBisectionTol) {
    const double mid = 0.5 * (lo + hi);
    if (score(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double s_star = 0.5 * (lo + hi);

  // S** = inf{t : score(t) < 0}.
  lo = lo0;
  hi = hi0;
  while (hi - lo > kBisectionTol) {
    const double mid = 0.5 * (lo + hi);
    if (score(mid) < 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const double s_star2 = 0.5 * (lo + hi);
  return std::clamp(0.5 * (s_star + s_star2), *mn, *mx);
}

double median_estimate(std::span<const double> sample) {
  if (sample.empty()) throw DomainError("empty sample");
  std::vector<double> v(sample.begin(), sample.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double upper = v[mid];
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

RiskEstimate empirical_mse(const SimConfig& cfg, const RunObserver& observer) {
  cfg.spec.validate();
  if (cfg.runs < 2) throw DomainError("need at least two runs");
  const std::size_t runs = static_cast<std::size_t>(cfg.runs);
  const double dn = static_cast<double>(cfg.spec.n);
  const InfluenceCurve ic = make_hampel_ic(cfg.estimator.kind == EstimatorKind::Hampel
                                               ? cfg.estimator.c
                                               : kInfiniteClip);

  std::vector<double> loss(runs);
  std::vector<double> estimate(runs);
  std::vector<long> contaminated(runs);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const ContaminatedSample s = sample_contaminated(cfg, j);
      const double est = cfg.estimator.kind == EstimatorKind::Median ? median_estimate(s.values)
                                                                       : m_estimate(s.values, ic);
      estimate[j] = est;
      contaminated[j] = s.contaminated;
      loss[j] = dn * est * est;
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(runs)));
  if (threads == 1) {
    work(0, runs);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (runs + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(runs, begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
    for (std::thread& th : pool) th.join();
  }

  if (observer) {
    for (std::size_t j = 0; j < runs; ++j) observer(j, contaminated[j], estimate[j]);
  }

  const double mean = pairwise_sum(loss.data(), runs) / static_cast<double>(runs);
  std::vector<double> dev(runs);
  for (std::size_t j = 0; j < runs; ++j) dev[j] = (loss[j] - mean) * (loss[j] - mean);
  const double var = pairwise_sum(dev.data(), runs) / static_cast<double>(runs - 1);
  return RiskEstimate::stochastic(mean, std::sqrt(var / static_cast<double>(runs)),
                                  RiskMethod::MonteCarlo);
}

}  // namespace robmse
