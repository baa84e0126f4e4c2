#include "robmse/tables.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "robmse/asy_risk.hpp"
#include "robmse/exact_dist.hpp"
#include "robmse/ic_model.hpp"
#include "robmse/normal.hpp"

namespace robmse {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

struct Cell {
  std::optional<double> value, ci_low, ci_high;
  bool substituted = false;
  std::string provenance;
};

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

// Asymptotic risk of a Hampel estimator or the median at the given order.
Cell asy_cell(const EstimatorChoice& est, double c, double r, long n, int order) {
  Cell out;
  if (est.kind == EstimatorChoice::Kind::Median) {
    if (order == 0) {
      out.value = (1 + r * r) * kHalfPi;
      out.provenance = "asy_risk::first_order(median)";
    } else if (order == 1) {
      out.value = median_mse_so(normal_pdf(0.0), 0.0, r, n);
      out.provenance = "asy_risk::median_mse_so";
    }
    return out;
  }
  if (c == kInfiniteClip) {
    if (r == 0.0) {
      out.value = 1.0;
      out.provenance = "asy_risk::identity";
    }
    return out;
  }
  ContaminationSpec spec;
  spec.radius_r = r;
  spec.n = n;
  const RiskExpansion e = risk_expansion(gaussian_coeffs(c), make_hampel_ic(c).b(), spec);
  out.value = e.order(order);
  out.provenance = "asy_risk::risk_expansion";
  return out;
}

Cell exact_cell(const EstimatorChoice& est, double c, double r, long n, RiskMethod method,
                const RunConfig& cfg) {
  Cell out;
  if (est.kind == EstimatorChoice::Kind::Median) return out;
  if (c == kInfiniteClip) {
    if (r == 0.0) {
      out.value = 1.0;
      out.provenance = "exact_dist::identity";
    }
    return out;
  }
  ContaminationSpec spec;
  spec.radius_r = r;
  spec.n = n;
  spec.contaminating_point = cfg.contaminating_point;
  const InfluenceCurve ic = make_hampel_ic(c);
  try {
    if (method == RiskMethod::ExactC && n <= cfg.exact_c_limit) {
      out.value = exact_mse_algoC(ic, spec, cfg.grid).value;
      out.provenance = "exact_dist::exact_mse_algoC";
    } else {
      out.value = exact_mse_algoD(ic, spec, cfg.grid).value;
      out.substituted = method == RiskMethod::ExactC;
      out.provenance = out.substituted ? "exact_dist::exact_mse_algoD(substituted)"
                                       : "exact_dist::exact_mse_algoD";
    }
  } catch (const std::exception&) {
    out.value.reset();
  }
  return out;
}

Cell mc_cell(const EstimatorChoice& est, double c, double r, long n, const RunConfig& cfg) {
  SimConfig sim;
  sim.runs = cfg.runs;
  sim.seed = cfg.seed;
  sim.threads = 1;
  sim.spec.radius_r = r;
  sim.spec.n = n;
  sim.spec.contaminating_point = cfg.contaminating_point;
  sim.estimator = est.kind == EstimatorChoice::Kind::Median ? Estimator::median() : Estimator::hampel(c);
  const RiskEstimate e = empirical_mse(sim);
  Cell out;
  out.value = e.value;
  out.ci_low = e.ci_low;
  out.ci_high = e.ci_high;
  out.provenance = "mc_sim::empirical_mse";
  return out;
}

Cell compute(const EstimatorChoice& est, double c, double r, long n, RiskMethod method,
             const RunConfig& cfg) {
  switch (method) {
    case RiskMethod::Asy0:
      return asy_cell(est, c, r, n, 0);
    case RiskMethod::Asy1:
      return asy_cell(est, c, r, n, 1);
    case RiskMethod::Asy2:
      return asy_cell(est, c, r, n, 2);
    case RiskMethod::ExactC:
    case RiskMethod::ExactD:
      return exact_cell(est, c, r, n, method, cfg);
    case RiskMethod::MonteCarlo:
      return mc_cell(est, c, r, n, cfg);
  }
  return {};
}

double resolve_c(const EstimatorChoice& est, double r) {
  switch (est.kind) {
    case EstimatorChoice::Kind::Hampel:
      return est.c;
    case EstimatorChoice::Kind::OptimalC0:
      return solve_c0(r);
    case EstimatorChoice::Kind::Median:
      return 0.0;
  }
  return est.c;
}

std::string estimator_label(const EstimatorChoice& est, double c) {
  switch (est.kind) {
    case EstimatorChoice::Kind::Median:
      return "Med";
    case EstimatorChoice::Kind::OptimalC0: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "c=c0=%.4f", c);
      return buf;
    }
    case EstimatorChoice::Kind::Hampel:
      break;
  }
  std::ostringstream s;
  s << "c=" << c;
  return s.str();
}

// Runs independent jobs on a fixed number of workers.
void run_jobs(std::vector<std::function<void()>>& jobs, unsigned threads) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(jobs.size())));
  if (threads <= 1) {
    for (auto& job : jobs) job();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs.size(); i = next++) jobs[i]();
    });
  }
  for (auto& th : pool) th.join();
}

struct RowPlan {
  EstimatorChoice est;
  double c = 0.0;
  double r_used = 0.0;   // radius of this row's risk
  double r_table = 0.0;  // radius that defines c0 for relative tables
  long n = 0;
  std::string label;
  std::string situation;
};

}  // namespace

EstimatorChoice parse_estimator(const std::string& s) {
  EstimatorChoice e;
  if (s == "med" || s == "Med" || s == "median") {
    e.kind = EstimatorChoice::Kind::Median;
  } else if (s == "c0") {
    e.kind = EstimatorChoice::Kind::OptimalC0;
  } else {
    std::size_t used = 0;
    e.c = std::stod(s, &used);
    if (used != s.size() || !(e.c > 0.0)) throw std::invalid_argument("bad estimator: " + s);
  }
  return e;
}

std::string format_full(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

TableArtifact run_table(const TableRequest& req) {
  const RunConfig& cfg = req.config;
  if (cfg.r_list.empty() || cfg.n_list.empty()) throw std::invalid_argument("empty r or n list");
  std::vector<RowPlan> plans;
  TableArtifact out;
  out.methods = req.methods;

  auto add_pair = [&](const EstimatorChoice& est, double r, long n, const std::string& label) {
    const double c = resolve_c(est, r);
    plans.push_back({est, c, 0.0, r, n, label, "id"});
    plans.push_back({est, c, r, r, n, label, "cont"});
  };

  switch (req.kind) {
    case TableKind::OverN: {
      const EstimatorChoice est{EstimatorChoice::Kind::Hampel, cfg.c};
      for (double r : cfg.r_list) {
        for (long n : cfg.n_list) add_pair(est, r, n, std::to_string(n));
      }
      std::ostringstream t;
      t << (req.relative ? "relMSE" : "MSE") << " at c=" << cfg.c << ", r=";
      for (std::size_t i = 0; i < cfg.r_list.size(); ++i) t << (i ? "," : "") << cfg.r_list[i];
      out.title = t.str();
      break;
    }
    case TableKind::OverRadius: {
      const long n = cfg.n_list.front();
      const EstimatorChoice est{EstimatorChoice::Kind::Hampel, cfg.c};
      for (double r : cfg.r_list) {
        plans.push_back({est, cfg.c, r, r, n, fixed3(r).substr(0, 4), r == 0.0 ? "id" : "cont"});
      }
      std::ostringstream t;
      t << (req.relative ? "relMSE" : "MSE") << " at n=" << n << ", c=" << cfg.c;
      out.title = t.str();
      break;
    }
    case TableKind::OverEstimators: {
      const long n = cfg.n_list.front();
      const double r = cfg.r_list.front();
      std::vector<EstimatorChoice> ests = req.estimators;
      if (ests.empty()) {
        ests = {parse_estimator("med"), parse_estimator("0.5"), parse_estimator("1.0"),
                parse_estimator("2.0"), parse_estimator("c0")};
      }
      for (const auto& est : ests) add_pair(est, r, n, estimator_label(est, resolve_c(est, r)));
      std::ostringstream t;
      t << (req.relative ? "relMSE" : "MSE") << " at n=" << n << ", r=" << r;
      out.title = t.str();
      break;
    }
  }

  const std::size_t nm = req.methods.size();
  std::vector<Cell> cells(plans.size() * nm);
  std::vector<Cell> denoms(req.relative ? plans.size() * nm : 0);
  std::vector<std::function<void()>> jobs;
  const EstimatorChoice optimal{EstimatorChoice::Kind::OptimalC0, 0.0};
  for (std::size_t i = 0; i < plans.size(); ++i) {
    for (std::size_t j = 0; j < nm; ++j) {
      const RowPlan& p = plans[i];
      const RiskMethod m = req.methods[j];
      jobs.emplace_back([&, i, j, m] {
        const RowPlan& q = plans[i];
        cells[i * nm + j] = compute(q.est, q.c, q.r_used, q.n, m, cfg);
      });
      if (req.relative) {
        jobs.emplace_back([&, i, j, m] {
          const RowPlan& q = plans[i];
          denoms[i * nm + j] = compute(optimal, solve_c0(q.r_table), q.r_used, q.n, m, cfg);
        });
      }
      (void)p;
    }
  }
  run_jobs(jobs, cfg.threads);

  for (std::size_t i = 0; i < plans.size(); ++i) {
    const RowPlan& p = plans[i];
    TableRow row;
    row.n = p.n;
    row.r = p.r_used;
    if (p.est.kind != EstimatorChoice::Kind::Median) row.c = p.c;
    row.label = p.label;
    row.situation = p.situation;
    for (std::size_t j = 0; j < nm; ++j) {
      Cell cell = cells[i * nm + j];
      if (req.relative) {
        const Cell& d = denoms[i * nm + j];
        if (cell.value && d.value && *d.value != 0.0) {
          cell.value = *cell.value / *d.value;
          cell.substituted = cell.substituted || d.substituted;
        } else {
          cell.value.reset();
        }
        cell.ci_low.reset();
        cell.ci_high.reset();
        cell.provenance += "/ratio";
      }
      row.cells.push_back({cell.value, cell.ci_low, cell.ci_high, cell.substituted, cell.provenance});
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::string render_text(const TableArtifact& t) {
  std::ostringstream os;
  os << t.title << "\n";
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-14s %-5s", "row", "sit");
  os << buf;
  for (RiskMethod m : t.methods) {
    if (m == RiskMethod::MonteCarlo) {
      std::snprintf(buf, sizeof buf, " %8s %-17s", "mc", "[low; up]");
    } else {
      std::snprintf(buf, sizeof buf, " %8s", std::string(to_string(m)).c_str());
    }
    os << buf;
  }
  os << "\n";
  bool any_substituted = false;
  for (const TableRow& row : t.rows) {
    std::snprintf(buf, sizeof buf, "%-14s %-5s", row.label.c_str(), row.situation.c_str());
    os << buf;
    for (std::size_t j = 0; j < t.methods.size(); ++j) {
      const TableCell& cell = row.cells[j];
      std::string v = cell.value ? fixed3(*cell.value) : "--";
      if (cell.substituted) {
        v += "*";
        any_substituted = true;
      }
      if (t.methods[j] == RiskMethod::MonteCarlo) {
        std::string ci = "";
        if (cell.ci_low && cell.ci_high) ci = "[" + fixed3(*cell.ci_low) + "; " + fixed3(*cell.ci_high) + "]";
        std::snprintf(buf, sizeof buf, " %8s %-17s", v.c_str(), ci.c_str());
      } else {
        std::snprintf(buf, sizeof buf, " %8s", v.c_str());
      }
      os << buf;
    }
    os << "\n";
  }
  if (any_substituted) os << "*: conditional algorithm replaced by the mixture algorithm\n";
  return os.str();
}

std::string render_csv(const TableArtifact& t, bool provenance) {
  std::ostringstream os;
  os << "n,r,c,method,value,ci_low,ci_high" << (provenance ? ",provenance" : "") << "\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_full(*v) : std::string(); };
  for (const TableRow& row : t.rows) {
    for (std::size_t j = 0; j < t.methods.size(); ++j) {
      const TableCell& cell = row.cells[j];
      const std::string c = row.c ? (std::isinf(*row.c) ? "inf" : format_full(*row.c)) : "med";
      os << row.n << "," << format_full(row.r) << "," << c << "," << to_string(t.methods[j]) << ","
         << opt(cell.value) << "," << opt(cell.value && !cell.ci_low ? cell.value : cell.ci_low)
         << "," << opt(cell.value && !cell.ci_high ? cell.value : cell.ci_high);
      if (provenance) os << "," << cell.provenance;
      os << "\n";
    }
  }
  return os.str();
}

RelErrorPoint relative_error(double c, double r, long n, const RunConfig& config) {
  const InfluenceCurve ic = make_hampel_ic(c);
  ContaminationSpec spec;
  spec.radius_r = r;
  spec.n = n;
  spec.contaminating_point = config.contaminating_point;
  RelErrorPoint p;
  p.n = n;
  if (n <= config.exact_c_limit) {
    p.exact = exact_mse_algoC(ic, spec, config.grid).value;
  } else {
    p.exact = exact_mse_algoD(ic, spec, config.grid).value;
    p.substituted = true;
  }
  const RiskExpansion e = risk_expansion(gaussian_coeffs(c), ic.b(), spec);
  for (int k = 0; k < 3; ++k) p.rel[k] = e.order(k) / p.exact - 1.0;
  return p;
}

RelerrResult relerr_scan(const RelerrRequest& req) {
  if (req.n_max < 1) throw std::invalid_argument("n_max must be positive");
  for (double th : req.thresholds) {
    if (!(th > 0.0 && th < 1.0)) throw std::invalid_argument("thresholds must lie in (0, 1)");
  }
  for (int o : req.orders) {
    if (o < 0 || o > 2) throw std::invalid_argument("orders must be 0, 1 or 2");
  }
  RelerrResult res;
  res.n_max = req.n_max;
  for (double r : req.r_list) {
    struct Track {
      int order;
      double threshold;
      bool failed = false;
      std::optional<long> n0;
    };
    std::vector<Track> tracks;
    for (int o : req.orders) {
      for (double th : req.thresholds) tracks.push_back({o, th, false, std::nullopt});
    }
    std::size_t open = tracks.size();
    for (long n = req.n_max; n >= 1 && open > 0; --n) {
      const RelErrorPoint p = relative_error(req.c, r, n, req.config);
      res.substituted = res.substituted || p.substituted;
      for (Track& t : tracks) {
        if (t.failed) continue;
        if (!(std::abs(p.rel[t.order]) < t.threshold)) {
          t.failed = true;
          --open;
          if (n < req.n_max) t.n0 = n + 1;
        }
      }
    }
    for (Track& t : tracks) {
      if (!t.failed) t.n0 = 1;
      res.entries.push_back({r, t.order, t.threshold, t.n0});
    }
  }
  return res;
}

std::string render_relerr_text(const RelerrResult& res) {
  static const char* kOrderName[] = {"1st order asy.", "2nd order asy.", "3rd order asy."};
  std::vector<double> rs;
  std::vector<double> ths;
  std::vector<int> orders;
  for (const auto& e : res.entries) {
    if (std::find(rs.begin(), rs.end(), e.r) == rs.end()) rs.push_back(e.r);
    if (std::find(ths.begin(), ths.end(), e.threshold) == ths.end()) ths.push_back(e.threshold);
    if (std::find(orders.begin(), orders.end(), e.order) == orders.end()) orders.push_back(e.order);
  }
  std::ostringstream os;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-8s %-16s", "rel.err", "order");
  os << buf;
  for (double r : rs) {
    std::snprintf(buf, sizeof buf, " %10s", ("r=" + fixed3(r).substr(0, 4)).c_str());
    os << buf;
  }
  os << "\n";
  for (double th : ths) {
    for (int o : orders) {
      char pct[32];
      std::snprintf(pct, sizeof pct, "%g%%", th * 100);
      std::snprintf(buf, sizeof buf, "%-8s %-16s", pct, kOrderName[o]);
      os << buf;
      for (double r : rs) {
        for (const auto& e : res.entries) {
          if (e.r != r || e.order != o || e.threshold != th) continue;
          const std::string v = e.n0 ? std::to_string(*e.n0) : ">" + std::to_string(res.n_max) + "*";
          std::snprintf(buf, sizeof buf, " %10s", v.c_str());
          os << buf;
        }
      }
      os << "\n";
    }
  }
  if (res.substituted) os << "exact risk above the conditional-algorithm limit taken from the mixture algorithm\n";
  return os.str();
}

std::string render_relerr_csv(const RelerrResult& res) {
  std::ostringstream os;
  os << "r,order,threshold,n0\n";
  for (const auto& e : res.entries) {
    os << format_full(e.r) << "," << e.order << "," << format_full(e.threshold) << ","
       << (e.n0 ? std::to_string(*e.n0) : ">" + std::to_string(res.n_max) + "*") << "\n";
  }
  return os.str();
}

std::string emit_figure_data(double c, const std::vector<double>& r_list, long n_min, long n_max,
                             const RunConfig& config) {
  if (n_min < 1 || n_max < n_min) throw std::invalid_argument("bad n range");
  std::ostringstream os;
  os << "n,r,order,rel_error\n";
  for (double r : r_list) {
    for (long n = n_min; n <= n_max; ++n) {
      const RelErrorPoint p = relative_error(c, r, n, config);
      for (int k = 0; k < 3; ++k) {
        os << n << "," << format_full(r) << "," << k << "," << format_full(p.rel[k]) << "\n";
      }
    }
  }
  return os.str();
}

}  // namespace robmse
