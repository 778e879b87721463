#include "nullcone/report.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace nullcone {

std::string RunConfig::get(const std::string& key, const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double RunConfig::get_num(const std::string& key, double fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (...) {
    throw ConfigError("config key " + key + ": not a number: " + it->second);
  }
}

int RunConfig::get_int(const std::string& key, int fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  try {
    return std::stoi(it->second);
  } catch (...) {
    throw ConfigError("config key " + key + ": not an integer: " + it->second);
  }
}

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = {
      // background suite
      "background.M", "background.a", "background.r_min", "background.r_max",
      "background.n_samples",
      // hodge suite
      "hodge.L", "hodge.trials", "hodge.eps", "hodge.seed",
      // decay checker
      "decay.s_min", "decay.s_max", "decay.db",
      // frames
      "frames.f_amplitude", "frames.lambda", "frames.seed",
      // energy
      "energy.pair", "energy.p", "energy.levels",
      // grid / evolution
      "grid.u0", "grid.u1", "grid.ub0", "grid.ub_max", "grid.n_u", "grid.n_ub",
      "grid.L", "grid.background", "grid.M", "grid.s", "grid.data_profile",
      "grid.data_l", "grid.data_m", "grid.amplitude",
      // output
      "output.json", "output.csv",
  };
  return keys;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  bool any = false;
  const auto& known = known_config_keys();
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto strip = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = strip(line);
    if (line.empty()) continue;
    any = true;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": malformed section header");
      section = strip(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    std::string key = strip(line.substr(0, eq));
    std::string val = strip(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key or value");
    std::string full = section.empty() ? key : section + "." + key;
    if (std::find(known.begin(), known.end(), full) == known.end())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": unknown key '" + full + "'");
    cfg.values[full] = val;
  }
  if (!any) throw ConfigError("config: empty file");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace nullcone
