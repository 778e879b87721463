#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nullcone/report.hpp"

using namespace nullcone;

namespace {
Report sample_report() {
  Report rep;
  rep.id = "demo";
  rep.scalars["alpha"] = 0.1 + 0.2;
  rep.scalars["count"] = std::int64_t(42);
  rep.scalars["label"] = std::string("run");
  rep.columns = {"r", "quantity", "value"};
  rep.rows.push_back({10.0, std::string("rho"), -0.002});
  rep.rows.push_back({20.0, std::string("rho"), -0.00025});
  rep.checks["demo-rule"] = true;
  return rep;
}
}  // namespace

TEST_CASE("reports are byte-stable") {
  auto a = to_json(sample_report());
  auto b = to_json(sample_report());
  CHECK(a == b);
  CHECK(to_csv(sample_report()) == to_csv(sample_report()));
  // keys are emitted sorted, floats with fixed formatting
  CHECK(a.find("\"alpha\"") < a.find("\"count\""));
  CHECK(a.find("0.3") != std::string::npos);
}

TEST_CASE("json round trip") {
  auto rep = sample_report();
  auto back = parse_json_report(to_json(rep));
  CHECK(back.id == rep.id);
  CHECK(std::get<double>(back.scalars["alpha"]) ==
        doctest::Approx(std::get<double>(rep.scalars["alpha"])));
  CHECK(std::get<std::int64_t>(back.scalars["count"]) == 42);
  CHECK(back.columns == rep.columns);
  REQUIRE(back.rows.size() == 2);
  CHECK(std::get<double>(back.rows[1][0]) == doctest::Approx(20.0));
  CHECK(back.checks.at("demo-rule"));
  // re-serializing the parsed report reproduces the bytes
  CHECK(to_json(back) == to_json(rep));
}

TEST_CASE("csv schema order") {
  auto csv = to_csv(sample_report());
  CHECK(csv.rfind("r,quantity,value\n", 0) == 0);
  CHECK(csv.find("10,rho,-0.002\n") != std::string::npos);
}

TEST_CASE("config parsing") {
  auto cfg = parse_config("[background]\nM = 1.0\na = 0\n[grid]\nn_u = 16\n");
  CHECK(cfg.get_num("background.M", 0.0) == 1.0);
  CHECK(cfg.get_int("grid.n_u", 0) == 16);
  CHECK(cfg.get_num("grid.s", 5.0) == 5.0);  // fallback

  CHECK_THROWS_AS(parse_config(""), ConfigError);                 // empty file
  CHECK_THROWS_AS(parse_config("[background]\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[background]\nM 1.0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[background\nM = 1\n"), ConfigError);
  try {
    parse_config("[background]\nM = 1\nwhat = 2\n");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    CHECK(std::string(e.what()).find("background.what") != std::string::npos);
  }
}
