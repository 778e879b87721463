#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "nullcone/common.hpp"

namespace nullcone {

// Deterministic report container: ordered keys, fixed float formatting, so
// identical runs produce byte-identical files.
struct Report {
  using Value = std::variant<double, std::int64_t, bool, std::string>;
  std::string id;
  std::map<std::string, Value> scalars;
  std::vector<std::string> columns;               // CSV schema
  std::vector<std::vector<Value>> rows;
  std::map<std::string, bool> checks;             // rule id -> pass

  bool all_pass() const {
    for (const auto& [k, v] : checks)
      if (!v) return false;
    return true;
  }
};

std::string format_value(const Report::Value& v);
std::string to_json(const Report& rep);
std::string to_csv(const Report& rep);
void write_file(const std::string& path, const std::string& content);
Report parse_json_report(const std::string& text);  // round-trip reader

// ---- run configuration (key = value with [section] headers) ----

struct RunConfig {
  std::map<std::string, std::string> values;  // "section.key" -> value

  bool has(const std::string& key) const { return values.count(key) > 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_num(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
};

// Throws ConfigError with line diagnostics on malformed input or on keys
// outside the known schema.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

const std::vector<std::string>& known_config_keys();

}  // namespace nullcone
