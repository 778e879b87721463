// nullcone: verification suites for double-null Kerr/Schwarzschild machinery.
//
// Subcommands: background, hodge, decaycheck, frames, energy, evolve, report.
// Exit status: 0 all checks pass, 1 a numeric check failed, 2 bad usage or
// configuration.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "nullcone/suites.hpp"

using namespace nullcone;

namespace {

#ifndef NULLCONE_EQDB
#define NULLCONE_EQDB "data/equations.txt"
#endif

int finish(const Report& rep, const std::string& json_path,
           const std::string& csv_path) {
  for (const auto& [rule, ok] : rep.checks)
    std::cout << (ok ? "pass  " : "FAIL  ") << rule << "\n";
  for (const auto& [k, v] : rep.scalars)
    std::cout << "  " << k << " = " << format_value(v) << "\n";
  if (!json_path.empty()) write_file(json_path, to_json(rep));
  if (!csv_path.empty()) write_file(csv_path, to_csv(rep));
  if (!rep.all_pass()) {
    for (const auto& [rule, ok] : rep.checks)
      if (!ok) std::cerr << "failing rule: " << rule << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nullcone verification suites"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, json_path, csv_path;
  std::uint64_t seed = 7;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--json", json_path, "write the JSON report here");
  app.add_option("--csv", csv_path, "write the CSV table here");
  app.add_option("--seed", seed, "seed for randomized checks");

  auto* bg = app.add_subcommand("background", "background geometry and decay classes");
  double M = 1.0, a = 0.0, r_min = 10.0, r_max = 1000.0;
  int n_samples = 200;
  bg->add_option("--M", M)->capture_default_str();
  bg->add_option("--a", a)->capture_default_str();
  bg->add_option("--r-min", r_min)->capture_default_str();
  bg->add_option("--r-max", r_max)->capture_default_str();
  bg->add_option("--n", n_samples)->capture_default_str();

  auto* hodge = app.add_subcommand("hodge", "sphere Hodge calculus checks");
  auto* hverify = hodge->add_subcommand("verify", "the four operator identities");
  auto* hpoincare = hodge->add_subcommand("poincare", "spin-2 Poincare minimum");
  auto* hdump = hodge->add_subcommand("dump", "spectral dump of a random field");
  int L = 16, trials = 100;
  int dump_rank = 1;
  std::string dump_path = "spectral.csv";
  double eps = 0.01;
  hdump->add_option("--L", L);
  hdump->add_option("--rank", dump_rank, "tensor rank 0, 1 or 2");
  hdump->add_option("--out", dump_path);
  hverify->add_option("--L", L)->capture_default_str();
  hverify->add_option("--trials", trials)->capture_default_str();
  hpoincare->add_option("--L", L)->capture_default_str();
  hpoincare->add_option("--trials", trials)->capture_default_str();
  hpoincare->add_option("--eps", eps)->capture_default_str();

  auto* dec = app.add_subcommand("decaycheck", "schematic decay type-checker");
  std::string db_path = NULLCONE_EQDB, eq_id;
  bool dec_all = false;
  dec->add_flag("--all", dec_all, "check every equation in the database");
  dec->add_option("--eq", eq_id, "check a single equation id");
  dec->add_option("--db", db_path, "equation database file");

  auto* fr = app.add_subcommand("frames", "null-frame transformation checks");
  double f_amp = 1e-2, lam = 1.05;
  fr->add_option("--f", f_amp)->capture_default_str();
  fr->add_option("--lambda", lam)->capture_default_str();

  auto* en = app.add_subcommand("energy", "Bianchi pairs and weighted fluxes");
  auto* erun = en->add_subcommand("run", "divergence identity on one pair");
  auto* ediv = en->add_subcommand("divergence", "convergence across grid halvings");
  auto* ecase = en->add_subcommand("cases", "canonical case-selection tables");
  auto* epeel = en->add_subcommand("peeling", "peeling exponent tables");
  std::string pair_name = "alpha-beta";
  double pweight = 5.0;
  erun->add_option("--pair", pair_name)->capture_default_str();
  erun->add_option("--p", pweight)->capture_default_str();

  auto* ev = app.add_subcommand("evolve", "characteristic transport and evolution");
  auto* etr = ev->add_subcommand("transport", "evolution-lemma conservation");
  auto* ebi = ev->add_subcommand("bianchi", "linear Bianchi system driver");
  (void)etr;

  auto* rp = app.add_subcommand("report", "re-emit a stored JSON report");
  std::string in_path, format = "json";
  rp->add_option("--in", in_path)->required();
  rp->add_option("--format", format, "json or csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);

    if (*bg) {
      M = cfg.get_num("background.M", M);
      a = cfg.get_num("background.a", a);
      r_min = cfg.get_num("background.r_min", r_min);
      r_max = cfg.get_num("background.r_max", r_max);
      n_samples = cfg.get_int("background.n_samples", n_samples);
      return finish(background_suite(M, a, r_min, r_max, n_samples), json_path,
                    csv_path);
    }
    if (*hverify)
      return finish(hodge_verify_suite(cfg.get_int("hodge.L", L),
                                       cfg.get_int("hodge.trials", trials), seed),
                    json_path, csv_path);
    if (*hpoincare)
      return finish(hodge_poincare_suite(cfg.get_int("hodge.L", L),
                                         cfg.get_num("hodge.eps", eps),
                                         cfg.get_int("hodge.trials", trials), seed),
                    json_path, csv_path);
    if (*hdump) {
      std::mt19937_64 rng(seed);
      auto geom = make_geometry(cfg.get_int("hodge.L", L), 1.0);
      auto f = random_field(Rank(dump_rank), geom, rng);
      Report rep;
      rep.id = "spectral-dump";
      rep.columns = {"l", "m", "spin", "re", "im"};
      for (const auto& row : spectral_rows(f))
        rep.rows.push_back(
            {Report::Value(std::int64_t(row.l)), Report::Value(std::int64_t(row.m)),
             Report::Value(std::int64_t(row.spin)), Report::Value(row.re),
             Report::Value(row.im)});
      write_file(dump_path, to_csv(rep));
      std::cout << "wrote " << dump_path << "\n";
      return 0;
    }
    if (*dec) {
      double s_lo = cfg.get_num("decay.s_min", 4.0);
      double s_hi = cfg.get_num("decay.s_max", 6.0);
      db_path = cfg.get("decay.db", db_path);
      if (!eq_id.empty()) {
        auto db = load_equation_db(db_path);
        for (const auto& eq : db)
          if (eq.id == eq_id) {
            auto v = check_equation(eq, SInterval{s_lo, s_hi});
            Report rep;
            rep.id = "decaycheck-" + eq_id;
            rep.columns = {"term", "side", "pass", "matched", "margin_r",
                           "margin_total"};
            for (const auto& t : v.terms)
              rep.rows.push_back({t.term, t.side, t.pass, t.matched, t.margin_r,
                                  t.margin_total});
            rep.checks["decay-eq-" + eq_id] = v.pass;
            return finish(rep, json_path, csv_path);
          }
        throw ConfigError("unknown equation id: " + eq_id);
      }
      auto rep = decay_suite(db_path, s_lo, s_hi);
      std::cout << format_value(rep.scalars["passed"]) << "/"
                << format_value(rep.scalars["equations"]) << " equations pass\n";
      return finish(rep, json_path, csv_path);
    }
    if (*fr)
      return finish(frames_suite(seed, cfg.get_num("frames.f_amplitude", f_amp),
                                 cfg.get_num("frames.lambda", lam)),
                    json_path, csv_path);
    if (*erun) {
      GridSpec gs;
      gs.params = KerrParams(0.0, 0.0);
      gs.u0 = cfg.get_num("grid.u0", -40.0);
      gs.u1 = cfg.get_num("grid.u1", -24.0);
      gs.ub0 = cfg.get_num("grid.ub0", 40.0);
      gs.ub1 = cfg.get_num("grid.ub_max", 72.0);
      gs.n_u = cfg.get_int("grid.n_u", 33);
      gs.n_ub = cfg.get_int("grid.n_ub", 33);
      gs.L = cfg.get_int("grid.L", 5);
      return finish(energy_run_suite(cfg.get("energy.pair", pair_name),
                                     cfg.get_num("energy.p", pweight), gs),
                    json_path, csv_path);
    }
    if (*ediv) {
      GridSpec base;
      base.params = KerrParams(0.0, 0.0);
      base.u0 = -40;
      base.u1 = -24;
      base.ub0 = 40;
      base.ub1 = 72;
      base.L = 5;
      return finish(energy_divergence_suite(base, {17, 33, 65, 129}), json_path,
                    csv_path);
    }
    if (*ecase) return finish(energy_cases_suite(), json_path, csv_path);
    if (*epeel) return finish(energy_peeling_suite(), json_path, csv_path);
    if (*etr) return finish(transport_suite(), json_path, csv_path);
    if (*ebi) {
      GridSpec gs = grid_from_config(cfg);
      double s = cfg.get_num("grid.s", 5.0);
      return finish(bianchi_suite(gs, s, cfg.get("grid.data_profile", "radiative"),
                                  cfg.get_int("grid.data_l", 2),
                                  cfg.get_int("grid.data_m", 1),
                                  cfg.get_num("grid.amplitude", 1e-3)),
                    json_path, csv_path);
    }
    if (*rp) {
      std::ifstream in(in_path);
      if (!in) throw ConfigError("cannot open report: " + in_path);
      std::stringstream ss;
      ss << in.rdbuf();
      auto rep = parse_json_report(ss.str());
      if (format == "csv")
        std::cout << to_csv(rep);
      else
        std::cout << to_json(rep);
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
