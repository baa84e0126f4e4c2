#include "robmse/exact_dist.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <string>
#include <utility>

#include <boost/math/distributions/binomial.hpp>

#include "robmse/edgeworth.hpp"
#include "robmse/errors.hpp"
#include "robmse/normal.hpp"
#include "robmse/quadrature.hpp"

namespace robmse {
namespace {

// Positions closer than this to a lattice point are treated as on it.
constexpr double kSnap = 1e-9;
// Search limit for the tail certificate, in units beyond the clipping height.
constexpr double kMaxCertificateReach = 40.0;

// The FFTW planner is not reentrant; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// Real-to-complex and complex-to-real transforms of one length sharing
/// a pair of buffers.
class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    real_ = fftw_alloc_real(n_);
    spec_ = fftw_alloc_complex(n_ / 2 + 1);
    std::lock_guard<std::mutex> lock(planner_mutex());
    forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), real_, spec_, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_), spec_, real_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      fftw_destroy_plan(forward_);
      fftw_destroy_plan(backward_);
    }
    fftw_free(real_);
    fftw_free(spec_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }
  std::size_t spectrum_size() const { return n_ / 2 + 1; }
  double* real() { return real_; }
  std::complex<double>* spectrum() { return reinterpret_cast<std::complex<double>*>(spec_); }

  void forward() { fftw_execute(forward_); }
  /// Inverse transform including the 1/n normalization.
  void backward() {
    fftw_execute(backward_);
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) real_[i] *= scale;
  }

 private:
  std::size_t n_;
  double* real_;
  fftw_complex* spec_;
  fftw_plan forward_;
  fftw_plan backward_;
};

struct Tails {
  double lower = 0.0;  // P(T < x) + P(T = x)/2
  double upper = 0.0;  // P(T > x) + P(T = x)/2
};

double snap(double pos) {
  const double r = std::round(pos);
  return std::abs(pos - r) < kSnap * std::max(1.0, std::abs(pos)) ? r : pos;
}

// Midpoint tails of the lattice law q at fractional index pos. Both sums are
// accumulated from their own end so small tails keep their precision.
Tails tails_at(const double* q, std::size_t len, double pos) {
  pos = snap(pos);
  const double last = static_cast<double>(len - 1);
  auto at_integer = [&](std::size_t j) {
    Tails t;
    for (std::size_t i = 0; i < j; ++i) t.lower += q[i];
    for (std::size_t i = len - 1; i > j; --i) t.upper += q[i];
    t.lower += 0.5 * q[j];
    t.upper += 0.5 * q[j];
    return t;
  };
  if (pos < 0.0 || pos > last) {
    double total = 0.0;
    for (std::size_t i = 0; i < len; ++i) total += q[i];
    return pos < 0.0 ? Tails{0.0, total} : Tails{total, 0.0};
  }
  const double fl = std::floor(pos);
  const auto j = static_cast<std::size_t>(fl);
  Tails a = at_integer(j);
  if (pos == fl) return a;
  // Moving from j to j + 1 shifts half of q[j] and half of q[j + 1].
  const double shift = 0.5 * (q[j] + q[j + 1]);
  const double frac = pos - fl;
  a.lower += frac * shift;
  a.upper -= frac * shift;
  return a;
}

void require_bounded(const InfluenceCurve& ic) {
  if (!ic.bounded()) throw DomainError("exact risk needs a bounded score");
}

int half_cells(int grid_size) {
  if (grid_size < 2 || (grid_size & (grid_size - 1)) != 0) {
    throw DomainError("grid_size must be a power of two");
  }
  return grid_size / 2;
}

// Cell masses of psi(X - t) on j * h, j = -nhalf..nhalf, with the atoms
// split off. Cells are centred on the lattice points.
struct SingleLaw {
  std::vector<double> cells;  // a.c. part, index j + nhalf
  double atom_low = 0.0;      // at -b
  double atom_high = 0.0;     // at +b
  double step = 0.0;
};

SingleLaw single_law(const InfluenceCurve& ic, double t, int nhalf) {
  const double A = ic.lagrange_A();
  const double c = ic.clip_c();
  const double b = ic.b();
  SingleLaw law;
  law.step = b / nhalf;
  law.cells.resize(2 * static_cast<std::size_t>(nhalf) + 1);
  for (int j = -nhalf; j <= nhalf; ++j) {
    const double lo = std::max((j - 0.5) * law.step, -b);
    const double hi = std::min((j + 0.5) * law.step, b);
    // psi(X - t) in (lo, hi] with |X - t| < c  <=>  X in (lo/A + t, hi/A + t].
    double xlo = lo / A + t;
    double xhi = hi / A + t;
    if (j == -nhalf) xlo = t - c;
    if (j == nhalf) xhi = t + c;
    law.cells[j + nhalf] = normal_mass(xlo, xhi);
  }
  law.atom_low = normal_cdf(t - c);
  law.atom_high = normal_sf(t + c);
  return law;
}

/// Evaluates midpoint tails of S_n - t through sums of clipped scores.
class ScoreSumEngine {
 public:
  ScoreSumEngine(const InfluenceCurve& ic, long n, const GridConfig& grid)
      : ic_(ic),
        n_(n),
        nhalf_(half_cells(grid.grid_size)),
        fft_(next_pow2(2 * static_cast<std::size_t>(nhalf_) * static_cast<std::size_t>(n) + 1)) {
    if (fft_.size() > grid.max_fft_size) {
      throw SizeError("convolution grid exceeds the FFT budget",
                      ic.b() / nhalf_ * static_cast<double>(fft_.size()) /
                          static_cast<double>(grid.max_fft_size));
    }
    base_.resize(fft_.spectrum_size());
    power_.resize(fft_.spectrum_size());
  }

  /// Tails at threshold -k psi_c of the (n - k)-fold clean sum, for each k.
  /// The ks must be increasing.
  void conditional(double t, double xc, const std::vector<long>& ks, std::vector<Tails>& out) {
    const SingleLaw law = single_law(ic_, t, nhalf_);
    load(law, 0.0, 0.0);
    const double psi_c = ic_(xc - t);
    out.assign(ks.size(), Tails{});
    // Walk m = n - k upward so each power costs one complex product per bin.
    long current = 0;
    for (std::size_t idx = ks.size(); idx-- > 0;) {
      const long k = ks[idx];
      const long m = n_ - k;
      const double threshold = -static_cast<double>(k) * psi_c;
      if (m == 0) {
        const double one = 1.0;
        out[idx] = tails_at(&one, 1, snap(threshold / law.step));
        continue;
      }
      if (current == 0) {
        start_power(m);
      } else {
        advance_power(m - current);
      }
      current = m;
      inverse();
      const std::size_t len = static_cast<std::size_t>(2 * nhalf_) * static_cast<std::size_t>(m) + 1;
      const double origin = -static_cast<double>(m) * ic_.b();
      out[idx] = tails_at(fft_.real(), len, (threshold - origin) / law.step);
    }
  }

  /// Tails at 0 of the n-fold sum under the mixture (1 - p) law + p delta_{psi_c}.
  Tails mixture(double t, double xc, double p) {
    const SingleLaw law = single_law(ic_, t, nhalf_);
    load(law, p, ic_(xc - t));
    start_power(n_);
    inverse();
    const std::size_t len = static_cast<std::size_t>(2 * nhalf_) * static_cast<std::size_t>(n_) + 1;
    return tails_at(fft_.real(), len, static_cast<double>(n_) * nhalf_);
  }

 private:
  void load(const SingleLaw& law, double p, double psi_c) {
    double* in = fft_.real();
    std::fill(in, in + fft_.size(), 0.0);
    const std::size_t last = law.cells.size() - 1;
    for (std::size_t j = 0; j <= last; ++j) in[j] = (1.0 - p) * law.cells[j];
    in[0] += (1.0 - p) * law.atom_low;
    in[last] += (1.0 - p) * law.atom_high;
    if (p > 0.0) {
      // Off-lattice contamination is split between the neighbouring points.
      const double pos = std::clamp(snap((psi_c + ic_.b()) / law.step), 0.0, static_cast<double>(last));
      const double fl = std::floor(pos);
      const auto j = static_cast<std::size_t>(fl);
      const double frac = pos - fl;
      in[j] += p * (1.0 - frac);
      if (frac > 0.0) in[j + 1] += p * frac;
    }
    fft_.forward();
    const std::complex<double>* spec = fft_.spectrum();
    std::copy(spec, spec + base_.size(), base_.begin());
  }

  // power_ = base_^m in polar form, exact in the exponent.
  void start_power(long m) {
    const double dm = static_cast<double>(m);
    for (std::size_t i = 0; i < base_.size(); ++i) {
      power_[i] = std::polar(std::pow(std::abs(base_[i]), dm), dm * std::arg(base_[i]));
    }
  }

  void advance_power(long steps) {
    for (long s = 0; s < steps; ++s) {
      for (std::size_t i = 0; i < base_.size(); ++i) power_[i] *= base_[i];
    }
  }

  // Leaves the current power's inverse transform in the real buffer.
  void inverse() {
    std::copy(power_.begin(), power_.end(), fft_.spectrum());
    fft_.backward();
  }

  InfluenceCurve ic_;
  long n_;
  int nhalf_;
  RealFft fft_;
  std::vector<std::complex<double>> base_;
  std::vector<std::complex<double>> power_;
};

// Upper bound on n * int_U^inf 2u [P(S >= u) + P(S <= -u)] du when fewer
// than half the observations are contaminated: at least one clean point
// must pass u - c, so each tail is at most n Phibar(u - c).
// Bound on n * int_U^inf 2u P(|T| > u) du given k contaminated points with
// weights wk. With m = n - k clean points, T > u forces at least
// ceil((m - k) / 2) clean points above u - c, so P(T > u) is at most
// C(m, j) q^j with q = Phi-bar(u - c); q^(j-1) is then bounded by its value
// at U and the remaining factor integrates in closed form.
double tail_certificate(long n, double c, double U, const std::vector<long>& ks,
                        const std::vector<double>& wk) {
  const double z = U - c;
  const double i0 = truncated_normal_moment(1, z) - z * truncated_normal_moment(0, z);
  const double i1 = 0.5 * (truncated_normal_moment(2, z) - z * z * truncated_normal_moment(0, z));
  const double base = 4.0 * static_cast<double>(n) * (i1 + c * i0);
  const double log_q = std::log(normal_sf(z));
  double factor = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const long m = n - ks[i];
    const long j = (m - ks[i] + 1) / 2;
    if (j <= 0) return std::numeric_limits<double>::infinity();
    const double log_choose = std::lgamma(m + 1.0) - std::lgamma(j + 1.0) - std::lgamma(m - j + 1.0);
    factor += wk[i] * std::exp(log_choose + static_cast<double>(j - 1) * log_q);
  }
  return base * factor;
}

double certified_range(long n, double c, double tol, const std::vector<long>& ks,
                       const std::vector<double>& wk) {
  double U = c + 0.5;
  while (tail_certificate(n, c, U, ks, wk) >= tol) {
    U += 0.25;
    if (U > c + kMaxCertificateReach) {
      throw ToleranceError("risk integral tail could not be certified",
                           tail_certificate(n, c, U, ks, wk));
    }
  }
  return U;
}

// n * int_0^U 2u f(u) du on Gauss-Legendre panels in w = sqrt(n) u with
// edges 0, 1, 2, 4, ...
double integrate_risk(long n, double U, int u_points, const std::function<double(double)>& tails) {
  const double sqn = std::sqrt(static_cast<double>(n));
  const double w_end = sqn * U;
  const GaussLegendreRule& rule = gauss_legendre(static_cast<unsigned>(u_points));
  std::vector<double> edges{0.0};
  for (double e = 1.0; e < w_end; e *= 2.0) edges.push_back(e);
  edges.push_back(w_end);
  double total = 0.0;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double half = 0.5 * (edges[p + 1] - edges[p]);
    const double mid = 0.5 * (edges[p + 1] + edges[p]);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double w = mid + half * rule.nodes[i];
      total += half * rule.weights[i] * 2.0 * w * tails(w / sqn);
    }
  }
  return total;
}

std::vector<double> binomial_weights(long n, double p) {
  boost::math::binomial_distribution<double> bin(static_cast<double>(n), p);
  std::vector<double> w(static_cast<std::size_t>(n) + 1);
  for (long k = 0; k <= n; ++k) w[k] = boost::math::pdf(bin, static_cast<double>(k));
  return w;
}

}  // namespace

void GridConfig::validate() const {
  half_cells(grid_size);
  if (u_points < 2) throw DomainError("u_points must be at least 2");
  if (!(tail_tolerance > 0.0)) throw DomainError("tail_tolerance must be positive");
  if (!(estimator_range > 0.0)) throw DomainError("estimator_range must be positive");
  if (!(weight_cutoff >= 0.0)) throw DomainError("weight_cutoff must be nonnegative");
}

LatticeDistribution::LatticeDistribution(double origin, double step, std::vector<double> weights,
                                         std::vector<Atom> atoms)
    : origin_(origin), step_(step), weights_(std::move(weights)), atoms_(std::move(atoms)) {
  if (!(step_ > 0.0)) throw DomainError("lattice step must be positive");
  if (weights_.empty()) throw DomainError("lattice needs at least one point");
  for (const Atom& a : atoms_) index_of(a.location);
}

std::size_t LatticeDistribution::index_of(double x) const {
  const double pos = (x - origin_) / step_;
  const double r = std::round(pos);
  if (std::abs(pos - r) > 1e-8 * std::max(1.0, std::abs(pos)) || r < 0.0 ||
      r > static_cast<double>(weights_.size() - 1)) {
    throw DomainError("location is not a lattice point: " + std::to_string(x));
  }
  return static_cast<std::size_t>(r);
}

std::vector<double> LatticeDistribution::combined() const {
  std::vector<double> out = weights_;
  for (const Atom& a : atoms_) out[index_of(a.location)] += a.mass;
  return out;
}

double LatticeDistribution::total_mass() const {
  const std::vector<double> q = combined();
  return std::accumulate(q.begin(), q.end(), 0.0);
}

double LatticeDistribution::mean() const {
  const std::vector<double> q = combined();
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    m0 += q[j];
    m1 += q[j] * point(j);
  }
  return m1 / m0;
}

double LatticeDistribution::variance() const {
  const std::vector<double> q = combined();
  const double mu = mean();
  double m0 = 0.0, m2 = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    const double d = point(j) - mu;
    m0 += q[j];
    m2 += q[j] * d * d;
  }
  return m2 / m0;
}

double LatticeDistribution::cdf_midpoint(double x) const {
  const std::vector<double> q = combined();
  return tails_at(q.data(), q.size(), (x - origin_) / step_).lower;
}

double LatticeDistribution::atom_mass_at(double x) const {
  double m = 0.0;
  for (const Atom& a : atoms_) {
    if (std::abs(a.location - x) <= 1e-8 * step_) m += a.mass;
  }
  return m;
}

LatticeDistribution psi_pushforward(const InfluenceCurve& ic, double t, int grid_size) {
  require_bounded(ic);
  const int nhalf = half_cells(grid_size);
  SingleLaw law = single_law(ic, t, nhalf);
  const double b = ic.b();
  return LatticeDistribution(-b, law.step, std::move(law.cells),
                             {{-b, law.atom_low}, {b, law.atom_high}});
}

LatticeDistribution convolve_power(const LatticeDistribution& d, long m, std::size_t max_fft_size) {
  if (m < 1) throw DomainError("convolution power must be at least 1");
  if (m == 1) return d;
  const std::size_t L = d.size();
  const std::size_t len = static_cast<std::size_t>(m) * (L - 1) + 1;
  const std::size_t nfft = next_pow2(len);
  if (nfft > max_fft_size) {
    const double factor = std::ceil(static_cast<double>(nfft) / static_cast<double>(max_fft_size));
    throw SizeError("convolution of " + std::to_string(m) + " copies needs an FFT of length " +
                        std::to_string(nfft),
                    d.step() * factor);
  }

  // Atoms of the sum, by direct convolution of the atom sub-measure.
  std::map<std::size_t, double> atoms{{0, 1.0}};
  std::vector<std::pair<std::size_t, double>> base;
  for (const Atom& a : d.atoms()) {
    if (a.mass > 0.0) base.emplace_back(d.index_of(a.location), a.mass);
  }
  for (long step = 0; step < m && !atoms.empty(); ++step) {
    std::map<std::size_t, double> next;
    for (const auto& [i, w] : atoms) {
      for (const auto& [j, v] : base) next[i + j] += w * v;
    }
    atoms.clear();
    for (const auto& [i, w] : next) {
      if (w > 0.0) atoms.emplace(i, w);
    }
  }
  if (base.empty()) atoms.clear();

  RealFft fft(nfft);
  const std::vector<double> q = d.combined();
  double* in = fft.real();
  std::fill(in, in + nfft, 0.0);
  std::copy(q.begin(), q.end(), in);
  fft.forward();
  std::complex<double>* spec = fft.spectrum();
  const double dm = static_cast<double>(m);
  for (std::size_t i = 0; i < fft.spectrum_size(); ++i) {
    spec[i] = std::polar(std::pow(std::abs(spec[i]), dm), dm * std::arg(spec[i]));
  }
  fft.backward();

  std::vector<double> weights(fft.real(), fft.real() + len);
  for (const auto& [i, w] : atoms) weights[i] -= w;
  // Round-off ripple of the transform shows up as tiny negative masses.
  double positive = 0.0;
  for (double& w : weights) {
    if (w < 0.0) w = 0.0;
    positive += w;
  }
  double atom_total = 0.0;
  for (const auto& [i, w] : atoms) atom_total += w;
  const double target = std::pow(std::accumulate(q.begin(), q.end(), 0.0), dm) - atom_total;
  if (positive > 0.0 && target > 0.0) {
    for (double& w : weights) w *= target / positive;
  }

  const double origin = dm * d.origin();
  std::vector<Atom> out_atoms;
  out_atoms.reserve(atoms.size());
  for (const auto& [i, w] : atoms) out_atoms.push_back({origin + static_cast<double>(i) * d.step(), w});
  return LatticeDistribution(origin, d.step(), std::move(weights), std::move(out_atoms));
}

double cdf_m_estimator(const InfluenceCurve& ic, long n, long k, double t,
                       double contaminating_point, const GridConfig& grid) {
  require_bounded(ic);
  if (n < 1 || k < 0 || k > n) throw DomainError("need 0 <= k <= n and n >= 1");
  grid.validate();
  const double threshold = -static_cast<double>(k) * ic(contaminating_point - t);
  const long m = n - k;
  if (m == 0) {
    if (threshold > 0.0) return 1.0;
    return threshold == 0.0 ? 0.5 : 0.0;
  }
  const LatticeDistribution sum =
      convolve_power(psi_pushforward(ic, t, grid.grid_size), m, grid.max_fft_size);
  return sum.cdf_midpoint(threshold);
}

double mse_from_tail(const InfluenceCurve& ic, long n, long k, double contaminating_point,
                     const GridConfig& grid) {
  require_bounded(ic);
  if (n < 1 || k < 0 || k > n) throw DomainError("need 0 <= k <= n and n >= 1");
  grid.validate();
  const std::vector<long> ks{k};
  const double U = (k < n - k) ? certified_range(n, ic.clip_c(), grid.tail_tolerance, ks, {1.0})
                               : grid.estimator_range;
  ScoreSumEngine engine(ic, n, grid);
  std::vector<Tails> right, left;
  return integrate_risk(n, U, grid.u_points, [&](double u) {
    engine.conditional(u, contaminating_point, ks, right);
    engine.conditional(-u, contaminating_point, ks, left);
    return right[0].upper + left[0].lower;
  });
}

RiskEstimate exact_mse_algoC(const InfluenceCurve& ic, const ContaminationSpec& spec,
                             const GridConfig& grid) {
  require_bounded(ic);
  spec.validate();
  grid.validate();
  const long n = spec.n;
  const long cap = spec.cap();
  const std::vector<double> w = binomial_weights(n, spec.contamination_prob());
  const double total = std::accumulate(w.begin(), w.begin() + cap + 1, 0.0);
  std::vector<long> ks;
  std::vector<double> wk;
  for (long k = 0; k <= cap; ++k) {
    if (w[k] / total >= grid.weight_cutoff) {
      ks.push_back(k);
      wk.push_back(w[k] / total);
    }
  }

  const double U = certified_range(n, ic.clip_c(), grid.tail_tolerance, ks, wk);
  ScoreSumEngine engine(ic, n, grid);
  std::vector<Tails> right, left;
  const double value = integrate_risk(n, U, grid.u_points, [&](double u) {
    engine.conditional(u, spec.contaminating_point, ks, right);
    engine.conditional(-u, spec.contaminating_point, ks, left);
    double s = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) s += wk[i] * (right[i].upper + left[i].lower);
    return s;
  });
  return RiskEstimate::exact(value, RiskMethod::ExactC);
}

RiskEstimate exact_mse_algoD(const InfluenceCurve& ic, const ContaminationSpec& spec,
                             const GridConfig& grid) {
  require_bounded(ic);
  spec.validate();
  grid.validate();
  const long n = spec.n;
  const double p = spec.contamination_prob();
  const double s_max = grid.estimator_range;

  // Beyond the certified range only samples with a contaminated majority
  // contribute; if those are negligible the integral can stop early.
  double majority = 0.0;
  if (p > 0.0) {
    boost::math::binomial_distribution<double> bin(static_cast<double>(n), p);
    majority = boost::math::cdf(boost::math::complement(bin, static_cast<double>(spec.cap())));
  }
  double U = s_max;
  if (static_cast<double>(n) * s_max * s_max * majority < grid.tail_tolerance) {
    std::vector<long> ks;
    std::vector<double> wk;
    const std::vector<double> w = binomial_weights(n, p);
    for (long k = 0; k <= spec.cap(); ++k) {
      if (w[k] > 0.0) {
        ks.push_back(k);
        wk.push_back(w[k]);
      }
    }
    U = std::min(certified_range(n, ic.clip_c(), grid.tail_tolerance, ks, wk), s_max);
  }

  ScoreSumEngine engine(ic, n, grid);
  const double value = integrate_risk(n, U, grid.u_points, [&](double u) {
    return engine.mixture(u, spec.contaminating_point, p).upper +
           engine.mixture(-u, spec.contaminating_point, p).lower;
  });
  return RiskEstimate::exact(value, RiskMethod::ExactD);
}

}  // namespace robmse
