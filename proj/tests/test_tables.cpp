#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "robmse/config.hpp"
#include "robmse/risk_estimate.hpp"
#include "robmse/tables.hpp"

using namespace robmse;

namespace {

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

TableRequest asy_request(TableKind kind, double c, std::vector<double> r, std::vector<long> n) {
  TableRequest req;
  req.kind = kind;
  req.config.c = c;
  req.config.r_list = std::move(r);
  req.config.n_list = std::move(n);
  req.methods = {RiskMethod::Asy0, RiskMethod::Asy1, RiskMethod::Asy2};
  return req;
}

std::string write_temp(const std::string& name, const std::string& body) {
  const std::string path = testing::TempDir() + name;
  std::ofstream(path) << body;
  return path;
}

}  // namespace

TEST(RunTable, OverNRowsMatchReferenceCells) {
  const TableArtifact t = run_table(asy_request(TableKind::OverN, 0.7, {0.1}, {30}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0].situation, "id");
  EXPECT_EQ(t.rows[1].situation, "cont");
  const double id[] = {1.187, 1.187, 1.184};
  const double cont[] = {1.205, 1.261, 1.261};
  for (int j = 0; j < 3; ++j) {
    EXPECT_NEAR(round3(*t.rows[0].cells[j].value), id[j], 1e-9);
    EXPECT_NEAR(round3(*t.rows[1].cells[j].value), cont[j], 1e-9);
  }
}

TEST(RunTable, OverEstimatorsCells) {
  TableRequest req = asy_request(TableKind::OverEstimators, 0.7, {0.25}, {30});
  req.estimators = {parse_estimator("2.0"), parse_estimator("med")};
  const TableArtifact t = run_table(req);
  ASSERT_EQ(t.rows.size(), 4u);
  const double cont[] = {1.285, 1.556, 1.604};
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(round3(*t.rows[1].cells[j].value), cont[j], 1e-9);
  EXPECT_NEAR(round3(*t.rows[3].cells[0].value), 1.669, 1e-9);
  EXPECT_NEAR(round3(*t.rows[3].cells[1].value), 1.821, 1e-9);
  EXPECT_FALSE(t.rows[3].cells[2].value.has_value());
  EXPECT_FALSE(t.rows[3].c.has_value());
}

TEST(RunTable, OverRadiusOneRowPerRadius) {
  const TableArtifact t = run_table(asy_request(TableKind::OverRadius, 0.5, {0.0, 0.5, 1.0}, {30}));
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_NEAR(round3(*t.rows[1].cells[2].value), 2.128, 1e-9);
  EXPECT_NEAR(round3(*t.rows[2].cells[1].value), 4.132, 1e-9);
}

TEST(RunTable, RelativeCell) {
  TableRequest req = asy_request(TableKind::OverN, 0.7, {0.1}, {30});
  req.methods = {RiskMethod::Asy1};
  req.relative = true;
  const TableArtifact t = run_table(req);
  EXPECT_NEAR(round3(*t.rows[1].cells[0].value), 1.095, 1e-9);
  EXPECT_FALSE(t.rows[1].cells[0].ci_low.has_value());
}

TEST(RunTable, CsvIsStableAndCarriesProvenance) {
  TableRequest req = asy_request(TableKind::OverN, 0.7, {0.1}, {5, 10});
  req.methods = {RiskMethod::MonteCarlo, RiskMethod::Asy2};
  req.config.runs = 500;
  const std::string a = render_csv(run_table(req), false);
  req.config.threads = 2;
  const std::string b = render_csv(run_table(req), false);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.substr(0, a.find('\n')), "n,r,c,method,value,ci_low,ci_high");
  std::istringstream lines(a);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) ++count;
  EXPECT_EQ(count, 1 + 4 * 2);
  const std::string p = render_csv(run_table(req), true);
  EXPECT_EQ(p.substr(0, p.find('\n')), "n,r,c,method,value,ci_low,ci_high,provenance");
  EXPECT_NE(p.find("asy_risk::risk_expansion"), std::string::npos);
  EXPECT_NE(p.find("mc_sim::empirical_mse"), std::string::npos);
}

TEST(RunTable, ConditionalAlgorithmSubstitutedAboveLimit) {
  TableRequest req;
  req.kind = TableKind::OverN;
  req.config.c = 0.7;
  req.config.r_list = {0.1};
  req.config.n_list = {4, 6};
  req.config.exact_c_limit = 5;
  req.methods = {RiskMethod::ExactC, RiskMethod::ExactD};
  const TableArtifact t = run_table(req);
  EXPECT_FALSE(t.rows[1].cells[0].substituted);
  EXPECT_TRUE(t.rows[3].cells[0].substituted);
  EXPECT_EQ(*t.rows[3].cells[0].value, *t.rows[3].cells[1].value);
  const std::string text = render_text(t);
  EXPECT_NE(text.find("*"), std::string::npos);
  EXPECT_NE(text.find("mixture algorithm"), std::string::npos);
}

TEST(RunTable, EmptyListsRejected) {
  TableRequest req = asy_request(TableKind::OverN, 0.7, {}, {5});
  EXPECT_THROW(run_table(req), std::invalid_argument);
}

TEST(Config, LoadsAndKeepsDefaults) {
  const std::string path = write_temp("ok.ini",
                                      "[model]\nc = 1.5\nr = 0, 0.25\nn = 7 9\n"
                                      "[grid]\ngrid_size = 512\n[sim]\nruns = 123\nseed = 7\n"
                                      "[output]\nformat = csv\nprovenance = true\n");
  const RunConfig cfg = load_config(path);
  EXPECT_EQ(cfg.c, 1.5);
  EXPECT_EQ(cfg.r_list, (std::vector<double>{0.0, 0.25}));
  EXPECT_EQ(cfg.n_list, (std::vector<long>{7, 9}));
  EXPECT_EQ(cfg.grid.grid_size, 512);
  EXPECT_EQ(cfg.runs, 123);
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.format, OutputFormat::Csv);
  EXPECT_TRUE(cfg.provenance);
  EXPECT_EQ(cfg.contaminating_point, 100.0);
  EXPECT_EQ(cfg.exact_c_limit, 200);
}

TEST(Config, MalformedValueNamesTheKey) {
  const std::string path = write_temp("bad.ini", "[model]\nc = abc\n");
  try {
    load_config(path);
    FAIL() << "expected an error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("model.c"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_config(write_temp("bad2.ini", "[output]\nformat = xml\n")), std::runtime_error);
  EXPECT_THROW(load_config(write_temp("bad3.ini", "[grid]\ngrid_size = 300\n")), std::exception);
}

TEST(Config, ListParsing) {
  EXPECT_EQ(parse_real_list("0,0.1, 0.5"), (std::vector<double>{0.0, 0.1, 0.5}));
  EXPECT_EQ(parse_int_list("5 10,30"), (std::vector<long>{5, 10, 30}));
  EXPECT_THROW(parse_int_list("5,x"), std::invalid_argument);
  EXPECT_THROW(parse_real_list("0.1,0.2q"), std::invalid_argument);
}

TEST(Parsing, MethodsAndEstimators) {
  for (const char* s : {"asy0", "asy1", "asy2", "exactC", "exactD", "mc"}) {
    const auto m = parse_method(s);
    ASSERT_TRUE(m.has_value()) << s;
    EXPECT_EQ(to_string(*m), s);
  }
  EXPECT_FALSE(parse_method("asy3").has_value());
  EXPECT_EQ(parse_estimator("med").kind, EstimatorChoice::Kind::Median);
  EXPECT_EQ(parse_estimator("c0").kind, EstimatorChoice::Kind::OptimalC0);
  EXPECT_EQ(parse_estimator("1.5").c, 1.5);
  EXPECT_THROW(parse_estimator("-1"), std::invalid_argument);
  EXPECT_THROW(parse_estimator("1.5x"), std::invalid_argument);
}

TEST(Figure, HeaderAndIdealModelAccuracy) {
  const std::string csv = emit_figure_data(0.7, {0.0}, 9, 12, RunConfig{});
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "n,r,order,rel_error");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    long n = 0;
    double r = 0.0, rel = 0.0;
    int order = 0;
    ASSERT_EQ(std::sscanf(line.c_str(), "%ld,%lf,%d,%lf", &n, &r, &order, &rel), 4) << line;
    if (order == 2) {
      EXPECT_LT(std::abs(rel), 0.01) << n;
    }
  }
  EXPECT_EQ(rows, 4 * 3);
  EXPECT_THROW(emit_figure_data(0.7, {0.0}, 5, 4, RunConfig{}), std::invalid_argument);
}

TEST(Relerr, SmallScanAndRendering) {
  RelerrRequest req;
  req.r_list = {0.0, 0.1};
  req.orders = {0};
  req.thresholds = {0.01};
  req.n_max = 20;
  const RelerrResult res = relerr_scan(req);
  ASSERT_EQ(res.entries.size(), 2u);
  ASSERT_TRUE(res.entries[0].n0.has_value());
  EXPECT_NEAR(*res.entries[0].n0, 9, 2);
  EXPECT_FALSE(res.entries[1].n0.has_value());
  const std::string text = render_relerr_text(res);
  EXPECT_NE(text.find(">20*"), std::string::npos) << text;
  EXPECT_NE(text.find("1st order asy."), std::string::npos);
  const std::string csv = render_relerr_csv(res);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "r,order,threshold,n0");
}

TEST(Relerr, InvalidRequests) {
  RelerrRequest req;
  req.n_max = 5;
  req.thresholds = {1.5};
  EXPECT_THROW(relerr_scan(req), std::invalid_argument);
  req.thresholds = {0.05};
  req.orders = {3};
  EXPECT_THROW(relerr_scan(req), std::invalid_argument);
  req.orders = {0};
  req.n_max = 0;
  EXPECT_THROW(relerr_scan(req), std::invalid_argument);
}
