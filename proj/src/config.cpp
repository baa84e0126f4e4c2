#include "robmse/config.hpp"

#include <sstream>
#include <stdexcept>
#include <type_traits>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace robmse {
namespace {

std::vector<std::string> split(const std::string& s) {
  std::string cleaned = s;
  for (char& ch : cleaned) {
    if (ch == ',' || ch == ';') ch = ' ';
  }
  std::istringstream in(cleaned);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

}  // namespace

std::vector<double> parse_real_list(const std::string& s) {
  std::vector<double> out;
  for (const std::string& tok : split(s)) {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("not a number: " + tok);
    out.push_back(v);
  }
  return out;
}

std::vector<long> parse_int_list(const std::string& s) {
  std::vector<long> out;
  for (const std::string& tok : split(s)) {
    std::size_t used = 0;
    const long v = std::stol(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("not an integer: " + tok);
    out.push_back(v);
  }
  return out;
}

RunConfig load_config(const std::string& path, RunConfig cfg) {
  boost::property_tree::ptree tree;
  boost::property_tree::ini_parser::read_ini(path, tree);

  // Parses key with fn when present; any failure is reported with the key.
  auto with = [&](const char* key, auto fn) {
    const auto raw = tree.get_optional<std::string>(key);
    if (!raw) return;
    try {
      fn(*raw);
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ": bad value for " + key + " (" + *raw + "): " + e.what());
    }
  };
  auto real = [&](const char* key, double& slot) {
    with(key, [&](const std::string& v) {
      const auto xs = parse_real_list(v);
      if (xs.size() != 1) throw std::invalid_argument("expected one number");
      slot = xs[0];
    });
  };
  auto integer = [&](const char* key, auto& slot) {
    with(key, [&](const std::string& v) {
      const auto xs = parse_int_list(v);
      if (xs.size() != 1 || xs[0] < 0) throw std::invalid_argument("expected one non-negative integer");
      slot = static_cast<std::remove_reference_t<decltype(slot)>>(xs[0]);
    });
  };

  real("model.c", cfg.c);
  with("model.r", [&](const std::string& v) { cfg.r_list = parse_real_list(v); });
  with("model.n", [&](const std::string& v) { cfg.n_list = parse_int_list(v); });
  real("model.contaminating_point", cfg.contaminating_point);
  integer("model.exact_c_limit", cfg.exact_c_limit);

  integer("grid.grid_size", cfg.grid.grid_size);
  integer("grid.u_points", cfg.grid.u_points);
  real("grid.tail_tolerance", cfg.grid.tail_tolerance);
  real("grid.estimator_range", cfg.grid.estimator_range);
  real("grid.weight_cutoff", cfg.grid.weight_cutoff);

  integer("sim.runs", cfg.runs);
  with("sim.seed", [&](const std::string& v) {
    std::size_t used = 0;
    cfg.seed = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument("not an integer");
  });
  integer("sim.threads", cfg.threads);

  with("output.path", [&](const std::string& v) { cfg.out_path = v; });
  with("output.format", [&](const std::string& v) {
    if (v == "csv") {
      cfg.format = OutputFormat::Csv;
    } else if (v == "text") {
      cfg.format = OutputFormat::Text;
    } else {
      throw std::invalid_argument("must be text or csv");
    }
  });
  with("output.provenance", [&](const std::string& v) {
    if (v == "true" || v == "1") {
      cfg.provenance = true;
    } else if (v == "false" || v == "0") {
      cfg.provenance = false;
    } else {
      throw std::invalid_argument("must be true or false");
    }
  });
  try {
    cfg.grid.validate();
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return cfg;
}

}  // namespace robmse
