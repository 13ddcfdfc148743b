#include "degenwave/cli/config.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "degenwave/error.hpp"

namespace degenwave::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError("config key '" + key + "': '" + v + "' is not a number");
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != static_cast<double>(static_cast<int>(x))) throw ConfigError("config key '" + key + "' must be an integer");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ConfigError("config key '" + key + "': '" + v + "' is not a boolean");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

// Canonical dotted keys; the last component alone is accepted too.
const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"weight.alpha", [](RunConfig& c, auto& k, auto& v) { c.alpha = to_double(k, v); }},
      {"weight.epsilon", [](RunConfig& c, auto& k, auto& v) { c.epsilon = to_double(k, v); }},
      {"weight.R0", [](RunConfig& c, auto& k, auto& v) { c.R0 = to_double(k, v); }},
      {"approx.epsilons", [](RunConfig& c, auto& k, auto& v) { c.epsilons = to_list(k, v); }},
      {"grid.dimension", [](RunConfig& c, auto& k, auto& v) { c.dimension = to_int(k, v); }},
      {"grid.n", [](RunConfig& c, auto& k, auto& v) { c.n = to_int(k, v); }},
      {"grid.L", [](RunConfig& c, auto& k, auto& v) { c.L = to_double(k, v); }},
      {"time.T", [](RunConfig& c, auto& k, auto& v) { c.T = to_double(k, v); }},
      {"time.dt", [](RunConfig& c, auto& k, auto& v) { c.dt = to_double(k, v); }},
      {"time.steps", [](RunConfig& c, auto& k, auto& v) { c.steps = to_int(k, v); }},
      {"observe.T_list", [](RunConfig& c, auto& k, auto& v) { c.T_list = to_list(k, v); }},
      {"observe.slack", [](RunConfig& c, auto& k, auto& v) { c.slack = to_double(k, v); }},
      {"observe.draws", [](RunConfig& c, auto& k, auto& v) { c.draws = to_int(k, v); }},
      {"modes.count", [](RunConfig& c, auto& k, auto& v) { c.modes = to_int(k, v); }},
      {"modes.gamma", [](RunConfig& c, auto& k, auto& v) { c.gamma = to_double(k, v); }},
      {"run.seed", [](RunConfig& c, auto& k, auto& v) { c.seed = static_cast<std::uint64_t>(to_double(k, v)); }},
      {"run.data", [](RunConfig& c, auto&, auto& v) { c.data = v; }},
      {"run.solver", [](RunConfig& c, auto&, auto& v) { c.solver = v; }},
      {"hum.tolerance", [](RunConfig& c, auto& k, auto& v) { c.tolerance = to_double(k, v); }},
      {"hum.max_iterations", [](RunConfig& c, auto& k, auto& v) { c.max_iterations = to_int(k, v); }},
      {"output.dir", [](RunConfig& c, auto&, auto& v) { c.output_dir = v; }},
      {"output.cache", [](RunConfig& c, auto& k, auto& v) { c.cache = to_bool(k, v); }},
      {"output.export_matrix", [](RunConfig& c, auto& k, auto& v) { c.export_matrix = to_bool(k, v); }},
  };
  return table;
}

}  // namespace

WeightParams RunConfig::weight_params() const {
  WeightParams p;
  p.alpha = alpha;
  p.epsilon = epsilon;
  p.dimension = dimension;
  p.half_width = L;
  p.R0 = R0;
  return p;
}

void RunConfig::validate() const {
  weight_params().validate();
  if (n < 3) throw ConfigError("n must be at least 3 interior nodes per axis");
  if (!(T > 0.0)) throw ConfigError("T must be positive");
  for (double t : T_list) {
    if (!(t > 0.0)) throw ConfigError("every entry of the T list must be positive");
  }
  if (dt < 0.0) throw ConfigError("dt must be nonnegative (0 selects half the CFL step)");
  if (steps < 2) throw ConfigError("steps must be at least 2");
  if (modes < 0) throw ConfigError("modes must be nonnegative");
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (!(slack >= 0.0 && slack < 1.0)) throw ConfigError("slack must lie in [0, 1)");
  if (draws < 1) throw ConfigError("draws must be at least 1");
  if (epsilons.empty()) throw ConfigError("the epsilon list must not be empty");
  for (double e : epsilons) {
    if (!(e > 0.0)) throw ConfigError("every epsilon in the sweep must be positive");
    weight_params().with_epsilon(e).validate();
  }
  if (data != "bump" && data != "mode" && data != "random") {
    throw ConfigError("data must be one of bump, mode, random (got '" + data + "')");
  }
  if (solver != "spectral" && solver != "leapfrog") {
    throw ConfigError("solver must be spectral or leapfrog (got '" + solver + "')");
  }
  if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  if (max_iterations < 1) throw ConfigError("max_iterations must be at least 1");
}

void apply_config_value(const std::string& raw_key, const std::string& value, RunConfig& config) {
  std::string key = raw_key;  // max-iterations and max_iterations name the same key
  std::replace(key.begin(), key.end(), '-', '_');
  static const std::map<std::string, std::string> aliases{
      {"modes", "modes.count"}, {"N", "grid.dimension"}, {"out", "output.dir"}, {"T_list", "observe.T_list"}};
  if (auto a = aliases.find(key); a != aliases.end()) return apply_config_value(a->second, value, config);
  const auto& table = setters();
  if (auto it = table.find(key); it != table.end()) {
    it->second(config, key, value);
    return;
  }
  // Bare field name, or an unknown section with a known field.
  const std::string field = key.substr(key.rfind('.') == std::string::npos ? 0 : key.rfind('.') + 1);
  for (const auto& [name, set] : table) {
    if (name.substr(name.rfind('.') + 1) == field) {
      set(config, key, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

void apply_config_file(std::istream& in, RunConfig& config) {
  std::string line, section;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config line " + std::to_string(number) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(number) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(number) + ": empty key");
    apply_config_value(section.empty() ? key : section + "." + key, value, config);
  }
}

std::string cache_key(const RunConfig& c) {
  std::ostringstream os;
  auto put = [&os](const char* name, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s=%.17g;", name, v);
    os << buf;
  };
  put("alpha", c.alpha);
  put("epsilon", c.epsilon);
  for (double e : c.epsilons) put("eps_list", e);
  put("N", c.dimension);
  put("n", c.n);
  put("L", c.L);
  put("R0", c.R0);
  put("T", c.T);
  for (double t : c.T_list) put("T_list", t);
  put("dt", c.dt);
  put("steps", c.steps);
  put("modes", c.modes);
  put("gamma", c.gamma);
  put("slack", c.slack);
  put("draws", c.draws);
  put("seed", static_cast<double>(c.seed));
  put("tolerance", c.tolerance);
  put("max_iterations", c.max_iterations);
  os << "data=" << c.data << ";solver=" << c.solver << ";";

  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : os.str()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["subcommand"] = c.subcommand;
  j["alpha"] = c.alpha;
  j["epsilon"] = c.epsilon;
  j["epsilons"] = c.epsilons;
  j["dimension"] = c.dimension;
  j["n"] = c.n;
  j["L"] = c.L;
  j["R0"] = c.R0;
  j["T"] = c.T;
  j["T_list"] = c.T_list;
  j["dt"] = c.dt;
  j["steps"] = c.steps;
  j["modes"] = c.modes;
  j["gamma"] = c.gamma;
  j["slack"] = c.slack;
  j["draws"] = c.draws;
  j["seed"] = c.seed;
  j["data"] = c.data;
  j["solver"] = c.solver;
  j["tolerance"] = c.tolerance;
  j["max_iterations"] = c.max_iterations;
  j["export_matrix"] = c.export_matrix;
  j["output_dir"] = c.output_dir;
  j["cache"] = c.cache;
  j["cache_key"] = cache_key(c);
  return j;
}

}  // namespace degenwave::cli
