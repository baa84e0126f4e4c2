#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "robmse/exact_dist.hpp"

namespace robmse {

enum class OutputFormat { Text, Csv };

/// Settings shared by all subcommands. Loaded from an INI file with
/// sections [model], [grid], [sim] and [output]; command-line flags
/// override individual values afterwards.
struct RunConfig {
  double c = 0.7;
  std::vector<double> r_list{0.1};
  std::vector<long> n_list{5, 10, 30};
  double contaminating_point = 100.0;
  /// Exact conditional risk is replaced by the mixture variant above this n.
  long exact_c_limit = 200;

  GridConfig grid;

  long runs = 10000;
  std::uint64_t seed = 20240101;
  unsigned threads = 1;

  std::string out_path;
  OutputFormat format = OutputFormat::Text;
  bool provenance = false;
};

/// Throws std::runtime_error with the offending key on malformed input.
RunConfig load_config(const std::string& path, RunConfig defaults = {});

/// Comma or whitespace separated lists.
std::vector<double> parse_real_list(const std::string& s);
std::vector<long> parse_int_list(const std::string& s);

}  // namespace robmse
