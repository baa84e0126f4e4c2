#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "robmse/config.hpp"
#include "robmse/mc_sim.hpp"
#include "robmse/risk_estimate.hpp"

namespace robmse {

enum class TableKind {
  /// Fixed (c, r); rows over n, each with an ideal and a contaminated line.
  OverN,
  /// Fixed (n, c); one row per radius.
  OverRadius,
  /// Fixed (n, r); rows over estimators, ideal and contaminated lines.
  OverEstimators,
};

/// Row estimator for OverEstimators tables.
struct EstimatorChoice {
  enum class Kind { Hampel, OptimalC0, Median } kind = Kind::Hampel;
  double c = 0.7;
};

EstimatorChoice parse_estimator(const std::string& s);

struct TableRequest {
  TableKind kind = TableKind::OverN;
  RunConfig config;
  std::vector<EstimatorChoice> estimators;
  /// Columns, in the canonical order mc, exactC, exactD, asy0, asy1, asy2.
  std::vector<RiskMethod> methods{RiskMethod::MonteCarlo, RiskMethod::ExactC, RiskMethod::ExactD,
                                  RiskMethod::Asy0,       RiskMethod::Asy1,   RiskMethod::Asy2};
  /// Divide each cell by the same method's value for the c0(r) estimator.
  bool relative = false;
};

struct TableCell {
  std::optional<double> value;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  /// Mixture value standing in for the conditional one beyond exact_c_limit.
  bool substituted = false;
  std::string provenance;
};

struct TableRow {
  long n = 0;
  double r = 0.0;
  /// Empty for the median.
  std::optional<double> c;
  std::string label;
  std::string situation;  // "id" or "cont"
  std::vector<TableCell> cells;  // parallel to TableArtifact::methods
};

struct TableArtifact {
  std::string title;
  std::vector<RiskMethod> methods;
  std::vector<TableRow> rows;
};

/// Computes every requested cell; cells that cannot be computed stay empty.
TableArtifact run_table(const TableRequest& req);

std::string render_text(const TableArtifact& t);
/// Long format n,r,c,method,value,ci_low,ci_high (+provenance).
std::string render_csv(const TableArtifact& t, bool provenance);

/// Shortest decimal that round-trips the double.
std::string format_full(double v);

enum class AsyOrder { First = 0, Second = 1, Third = 2 };

struct RelerrEntry {
  double r = 0.0;
  int order = 0;  // 0, 1, 2 for n^0, n^-1/2, n^-1
  double threshold = 0.0;
  /// Smallest n0 in the scanned range, or empty if even n_max fails.
  std::optional<long> n0;
};

struct RelerrResult {
  long n_max = 0;
  std::vector<RelerrEntry> entries;
  /// True when some exact values above exact_c_limit came from the mixture algorithm.
  bool substituted = false;
};

struct RelerrRequest {
  double c = 0.7;
  std::vector<double> r_list{0.0, 0.1, 0.25, 0.5};
  std::vector<int> orders{0, 1, 2};
  std::vector<double> thresholds{0.01, 0.05};
  long n_max = 200;
  RunConfig config;
};

/// Relative error asy(n)/exact(n) - 1 at every n in [1, n_max], scanned
/// downward and stopped once every (order, threshold) pair has failed.
RelerrResult relerr_scan(const RelerrRequest& req);

std::string render_relerr_text(const RelerrResult& res);
std::string render_relerr_csv(const RelerrResult& res);

/// CSV "n,r,order,rel_error" over n in [n_min, n_max].
std::string emit_figure_data(double c, const std::vector<double>& r_list, long n_min, long n_max,
                             const RunConfig& config);

/// asy(n) / exact(n) - 1 for one (c, r, n) and the three orders.
struct RelErrorPoint {
  long n = 0;
  double exact = 0.0;
  double rel[3] = {0.0, 0.0, 0.0};
  bool substituted = false;
};
RelErrorPoint relative_error(double c, double r, long n, const RunConfig& config);

}  // namespace robmse
