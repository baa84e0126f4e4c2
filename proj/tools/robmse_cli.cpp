// Command-line front end: coefficient dumps, single risk evaluations, the
// table runner, the relative-error scan and figure data.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "robmse/asy_risk.hpp"
#include "robmse/config.hpp"
#include "robmse/exact_dist.hpp"
#include "robmse/ic_model.hpp"
#include "robmse/mc_sim.hpp"
#include "robmse/tables.hpp"

namespace {

using namespace robmse;

struct CommonFlags {
  std::optional<double> c;
  std::optional<std::string> r;
  std::optional<std::string> n;
  std::optional<int> order;
  std::vector<std::string> methods;
  std::optional<std::uint64_t> seed;
  std::optional<long> runs;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::string> config;
  std::optional<unsigned> threads;
  std::optional<int> grid_size;
  bool provenance = false;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--c", f.c, "clipping height");
  app->add_option("--r", f.r, "radius list, e.g. 0,0.1,0.5");
  app->add_option("--n", f.n, "sample size list, e.g. 5,10,30");
  app->add_option("--order", f.order, "asymptotic order")->check(CLI::IsMember({0, 1, 2}));
  app->add_option("--method", f.methods, "asy0, asy1, asy2, exactC, exactD or mc")
      ->check(CLI::IsMember({"asy0", "asy1", "asy2", "exactC", "exactD", "mc"}))
      ->delimiter(',');
  app->add_option("--seed", f.seed, "simulation seed");
  app->add_option("--runs", f.runs, "simulation runs");
  app->add_option("--out", f.out, "output path (stdout if absent)");
  app->add_option("--format", f.format, "text or csv")->check(CLI::IsMember({"text", "csv"}));
  app->add_option("--config", f.config, "INI configuration file");
  app->add_option("--threads", f.threads, "worker threads");
  app->add_option("--grid-size", f.grid_size, "lattice cells across [-b, b]");
  app->add_flag("--provenance", f.provenance, "append a provenance column to CSV output");
}

RunConfig resolve(const CommonFlags& f) {
  RunConfig cfg;
  if (f.config) cfg = load_config(*f.config, cfg);
  if (f.c) cfg.c = *f.c;
  if (f.r) cfg.r_list = parse_real_list(*f.r);
  if (f.n) cfg.n_list = parse_int_list(*f.n);
  if (f.seed) cfg.seed = *f.seed;
  if (f.runs) cfg.runs = *f.runs;
  if (f.out) cfg.out_path = *f.out;
  if (f.format) cfg.format = *f.format == "csv" ? OutputFormat::Csv : OutputFormat::Text;
  if (f.threads) cfg.threads = *f.threads;
  if (f.grid_size) cfg.grid.grid_size = *f.grid_size;
  if (f.provenance) cfg.provenance = true;
  cfg.grid.validate();
  return cfg;
}

std::vector<RiskMethod> methods_of(const CommonFlags& f, std::vector<RiskMethod> fallback) {
  if (f.methods.empty()) {
    if (f.order) return {static_cast<RiskMethod>(static_cast<int>(RiskMethod::Asy0) + *f.order)};
    return fallback;
  }
  std::vector<RiskMethod> out;
  for (const std::string& s : f.methods) out.push_back(*parse_method(s));
  return out;
}

void emit(const RunConfig& cfg, const std::string& body) {
  if (cfg.out_path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream os(cfg.out_path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + cfg.out_path);
  os << body;
}

// Single cells share the table renderer so CSV output has one schema.
void run_cells(const CommonFlags& f, std::vector<RiskMethod> fallback) {
  RunConfig cfg = resolve(f);
  TableRequest req;
  req.kind = TableKind::OverRadius;
  req.config = cfg;
  req.methods = methods_of(f, fallback);
  TableArtifact all;
  all.methods = req.methods;
  for (long n : cfg.n_list) {
    req.config.n_list = {n};
    TableArtifact t = run_table(req);
    all.title = "c=" + format_full(cfg.c);
    for (auto& row : t.rows) {
      row.label = "n=" + std::to_string(n) + " r=" + format_full(row.r);
      all.rows.push_back(std::move(row));
    }
  }
  emit(cfg, cfg.format == OutputFormat::Csv ? render_csv(all, cfg.provenance) : render_text(all));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-sample and asymptotic maximal MSE of Hampel-type location M-estimators"};
  app.require_subcommand(1);

  CommonFlags coeffs_f, asy_f, exact_f, sim_f, table_f, relerr_f, figure_f;

  auto* coeffs = app.add_subcommand("coeffs", "expansion coefficients for the Hampel score");
  add_common(coeffs, coeffs_f);

  auto* asy = app.add_subcommand("asy", "asymptotic maximal risk");
  add_common(asy, asy_f);

  auto* exact = app.add_subcommand("exact", "numerically exact finite-sample risk");
  add_common(exact, exact_f);

  auto* sim = app.add_subcommand("sim", "Monte Carlo risk with confidence interval");
  add_common(sim, sim_f);
  std::optional<std::string> sim_diag;
  sim->add_option("--diagnostics", sim_diag, "write per-run CSV rows to this file");
  std::string sim_estimator = "hampel";
  sim->add_option("--estimator", sim_estimator, "hampel or median")
      ->check(CLI::IsMember({"hampel", "median"}));

  auto* table = app.add_subcommand("table", "reproduce a risk table");
  add_common(table, table_f);
  std::string kind = "T2";
  table->add_option("--kind", kind, "T2 (rows over n), T6 (rows over r), T10 (rows over estimators)")
      ->check(CLI::IsMember({"T2", "T6", "T10"}));
  bool relative = false;
  table->add_flag("--relative", relative, "divide by the risk of the c0(r) estimator");
  std::vector<std::string> estimators;
  table->add_option("--estimators", estimators, "T10 rows: med, c0 or clipping heights")
      ->delimiter(',');

  auto* relerr = app.add_subcommand("relerr", "minimal n0 for a relative-error corridor");
  add_common(relerr, relerr_f);
  long n_max = 200;
  relerr->add_option("--n-max", n_max, "largest sample size scanned");
  std::string thresholds = "0.01,0.05";
  relerr->add_option("--thresholds", thresholds, "relative error thresholds");
  std::string orders = "0,1,2";
  relerr->add_option("--orders", orders, "asymptotic orders to scan");

  auto* figure = app.add_subcommand("figure", "relative error data n,r,order,rel_error");
  add_common(figure, figure_f);
  long fig_n_min = 1;
  long fig_n_max = 60;
  figure->add_option("--n-min", fig_n_min, "first sample size");
  figure->add_option("--n-max", fig_n_max, "last sample size");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*coeffs) {
      const RunConfig cfg = resolve(coeffs_f);
      const std::vector<double> cs = coeffs_f.c ? std::vector<double>{cfg.c} : std::vector<double>{cfg.c};
      std::ostringstream os;
      for (double c : cs) {
        const InfluenceCurve ic = make_hampel_ic(c);
        const MomentCoefficients mc = gaussian_coeffs(c);
        if (cfg.format == OutputFormat::Csv) {
          os << "c,A,b";
          for (const auto& [k, v] : mc.as_record()) os << "," << k;
          os << "\n" << format_full(c) << "," << format_full(ic.lagrange_A()) << ","
             << format_full(ic.b());
          for (const auto& [k, v] : mc.as_record()) os << "," << format_full(v);
          os << "\n";
        } else {
          os << "c = " << c << "\nA = " << ic.lagrange_A() << "\nb = " << ic.b() << "\n";
          for (const auto& [k, v] : mc.as_record()) os << k << " = " << v << "\n";
        }
      }
      emit(cfg, os.str());
    } else if (*asy) {
      run_cells(asy_f, {RiskMethod::Asy0, RiskMethod::Asy1, RiskMethod::Asy2});
    } else if (*exact) {
      run_cells(exact_f, {RiskMethod::ExactC, RiskMethod::ExactD});
    } else if (*sim) {
      const RunConfig cfg = resolve(sim_f);
      std::ostringstream os;
      std::ofstream diag;
      if (sim_diag) {
        diag.open(*sim_diag, std::ios::binary);
        diag << "run_index,k_contaminated,estimate\n";
      }
      os << "n,r,c,method,value,ci_low,ci_high\n";
      for (long n : cfg.n_list) {
        for (double r : cfg.r_list) {
          SimConfig s;
          s.runs = cfg.runs;
          s.seed = cfg.seed;
          s.threads = cfg.threads;
          s.spec.n = n;
          s.spec.radius_r = r;
          s.spec.contaminating_point = cfg.contaminating_point;
          s.estimator = sim_estimator == "median" ? Estimator::median() : Estimator::hampel(cfg.c);
          RunObserver obs;
          if (sim_diag) {
            obs = [&diag](std::uint64_t j, long k, double est) {
              diag << j << "," << k << "," << format_full(est) << "\n";
            };
          }
          const RiskEstimate e = empirical_mse(s, obs);
          os << n << "," << format_full(r) << ","
             << (sim_estimator == "median" ? std::string("med") : format_full(cfg.c)) << ",mc,"
             << format_full(e.value) << "," << format_full(e.ci_low) << "," << format_full(e.ci_high)
             << "\n";
        }
      }
      emit(cfg, os.str());
    } else if (*table) {
      TableRequest req;
      req.config = resolve(table_f);
      req.kind = kind == "T2" ? TableKind::OverN : (kind == "T6" ? TableKind::OverRadius : TableKind::OverEstimators);
      req.relative = relative;
      for (const std::string& e : estimators) req.estimators.push_back(parse_estimator(e));
      if (!table_f.methods.empty() || table_f.order) req.methods = methods_of(table_f, req.methods);
      const TableArtifact t = run_table(req);
      emit(req.config, req.config.format == OutputFormat::Csv ? render_csv(t, req.config.provenance)
                                                              : render_text(t));
    } else if (*relerr) {
      RelerrRequest req;
      req.config = resolve(relerr_f);
      req.c = req.config.c;
      if (relerr_f.r) req.r_list = req.config.r_list;
      req.n_max = n_max;
      req.thresholds = parse_real_list(thresholds);
      req.orders.clear();
      for (long o : parse_int_list(orders)) req.orders.push_back(static_cast<int>(o));
      const RelerrResult res = relerr_scan(req);
      emit(req.config, req.config.format == OutputFormat::Csv ? render_relerr_csv(res)
                                                              : render_relerr_text(res));
    } else if (*figure) {
      const RunConfig cfg = resolve(figure_f);
      emit(cfg, emit_figure_data(cfg.c, cfg.r_list, fig_n_min, fig_n_max, cfg));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
