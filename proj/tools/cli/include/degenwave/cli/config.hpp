#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "degenwave/weight_model.hpp"

namespace degenwave::cli {

/// Everything a subcommand needs. Fields default to the reference
/// configuration (alpha = 1, eps = 0.1 on a 61 x 61 grid over (-1, 1)^2).
struct RunConfig {
  std::string subcommand;
  double alpha = 1.0;
  double epsilon = 0.1;
  std::vector<double> epsilons{0.2, 0.1, 0.05};  // approx sweep
  int dimension = 2;
  int n = 61;
  double L = 1.0;
  double R0 = 0.12;
  double T = 8.0;
  std::vector<double> T_list;  // observe sweep; empty means {T}
  double dt = 0.0;             // 0 picks half the CFL step
  int steps = 2000;            // spectral solver samples
  int modes = 0;               // 0 keeps every mode passing the filter
  double gamma = 0.5;
  double slack = 0.05;
  int draws = 20;
  std::uint64_t seed = 20240917;
  std::string data = "bump";        // bump | mode | random
  std::string solver = "spectral";  // spectral | leapfrog
  double tolerance = 1e-6;
  int max_iterations = 200;
  bool export_matrix = false;
  bool full = false;
  std::string output_dir = "degenwave_out";
  bool cache = true;

  WeightParams weight_params() const;
  /// Throws ConfigError naming the first violated precondition.
  void validate() const;
};

/// Parses `key = value` lines. `#` starts a comment, `[section]` prefixes
/// the following keys with "section.", and keys may also be written dotted
/// (grid.n = 61). Unknown keys are rejected.
void apply_config_file(std::istream& in, RunConfig& config);
void apply_config_value(const std::string& key, const std::string& value, RunConfig& config);

/// FNV-1a hash (16 hex digits) of every field that influences the numbers;
/// the output directory, the cache toggle and the subcommand are excluded.
std::string cache_key(const RunConfig& config);

nlohmann::ordered_json to_json(const RunConfig& config);

}  // namespace degenwave::cli
