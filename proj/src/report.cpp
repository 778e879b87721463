#include "nullcone/report.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>

namespace nullcone {

std::string format_value(const Report::Value& v) {
  if (std::holds_alternative<double>(v)) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", std::get<double>(v));
    return buf;
  }
  if (std::holds_alternative<std::int64_t>(v))
    return std::to_string(std::get<std::int64_t>(v));
  if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? "true" : "false";
  return std::get<std::string>(v);
}

namespace {

nlohmann::json value_json(const Report::Value& v) {
  if (std::holds_alternative<double>(v)) {
    // fixed decimal text keeps the output byte-stable across platforms
    return nlohmann::json(format_value(v));
  }
  if (std::holds_alternative<std::int64_t>(v)) return std::get<std::int64_t>(v);
  if (std::holds_alternative<bool>(v)) return std::get<bool>(v);
  return std::get<std::string>(v);
}

}  // namespace

std::string to_json(const Report& rep) {
  nlohmann::json j;  // nlohmann::json orders object keys
  j["id"] = rep.id;
  for (const auto& [k, v] : rep.scalars) j["scalars"][k] = value_json(v);
  if (!rep.columns.empty()) {
    j["columns"] = rep.columns;
    auto rows = nlohmann::json::array();
    for (const auto& row : rep.rows) {
      auto r = nlohmann::json::array();
      for (const auto& v : row) r.push_back(value_json(v));
      rows.push_back(r);
    }
    j["rows"] = rows;
  }
  for (const auto& [k, v] : rep.checks) j["checks"][k] = v;
  j["pass"] = rep.all_pass();
  return j.dump(2) + "\n";
}

std::string to_csv(const Report& rep) {
  std::string out;
  for (std::size_t c = 0; c < rep.columns.size(); ++c) {
    if (c) out += ",";
    out += rep.columns[c];
  }
  out += "\n";
  for (const auto& row : rep.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ",";
      out += format_value(row[c]);
    }
    out += "\n";
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

Report parse_json_report(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  Report rep;
  rep.id = j.value("id", "");
  if (j.contains("scalars"))
    for (auto it = j["scalars"].begin(); it != j["scalars"].end(); ++it) {
      const auto& v = it.value();
      if (v.is_boolean()) rep.scalars[it.key()] = v.get<bool>();
      else if (v.is_number_integer()) rep.scalars[it.key()] = v.get<std::int64_t>();
      else if (v.is_string()) {
        // numeric strings come back as doubles when they parse cleanly
        const std::string s = v.get<std::string>();
        char* end = nullptr;
        double d = std::strtod(s.c_str(), &end);
        if (end && *end == '\0' && end != s.c_str()) rep.scalars[it.key()] = d;
        else rep.scalars[it.key()] = s;
      } else rep.scalars[it.key()] = v.get<double>();
    }
  if (j.contains("columns")) rep.columns = j["columns"].get<std::vector<std::string>>();
  if (j.contains("rows"))
    for (const auto& row : j["rows"]) {
      std::vector<Report::Value> r;
      for (const auto& v : row) {
        if (v.is_boolean()) r.push_back(v.get<bool>());
        else if (v.is_number_integer()) r.push_back(v.get<std::int64_t>());
        else if (v.is_string()) {
          const std::string s = v.get<std::string>();
          char* end = nullptr;
          double d = std::strtod(s.c_str(), &end);
          if (end && *end == '\0' && end != s.c_str()) r.push_back(d);
          else r.push_back(s);
        } else r.push_back(v.get<double>());
      }
      rep.rows.push_back(r);
    }
  if (j.contains("checks"))
    for (auto it = j["checks"].begin(); it != j["checks"].end(); ++it)
      rep.checks[it.key()] = it.value().get<bool>();
  return rep;
}

}  // namespace nullcone
