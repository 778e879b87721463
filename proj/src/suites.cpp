#include "nullcone/suites.hpp"

namespace nullcone {

namespace {

double rel(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace

Report background_suite(double M, double a, double r_min, double r_max,
                        int n_samples) {
  KerrParams p(M, a);
  Report rep;
  rep.id = "background";
  rep.columns = {"r", "quantity", "value", "class_q", "class_p",
                 "normalized_constant"};

  std::vector<DecaySample> trchi_dev, rho_s, omega_s;
  double worst_fd = 0.0;
  std::vector<double> rs(n_samples);
  for (int i = 0; i < n_samples; ++i)
    rs[i] = r_min * std::pow(r_max / r_min, double(i) / (n_samples - 1));

  std::vector<RicciCoeffs> rc(n_samples);
  std::vector<CurvatureComps> cc(n_samples);
  parallel_for(n_samples, [&](std::size_t i) {
    rc[i] = background_ricci(p, rs[i], 1.0, 0.3);
    cc[i] = background_curvature(p, rs[i], 1.0, 0.3);
  });
  for (int i = 0; i < n_samples; ++i) {
    double r = rs[i];
    if (a == 0.0 && M > 0.0) {
      auto cf = schwarzschild_ricci_closed(p, r);
      worst_fd = std::max({worst_fd, rel(rc[i].trchi, cf.trchi),
                           rel(rc[i].trchib, cf.trchib), rel(rc[i].omega, cf.omega),
                           rel(rc[i].omegab, cf.omegab)});
    }
    trchi_dev.push_back({r, rc[i].trchi - 2.0 / r});
    omega_s.push_back({r, rc[i].omega});
    rho_s.push_back({r, cc[i].rho});
  }
  double mp = M > 0.0 ? M : 1.0;
  auto rep_tr = verify_decay_class(trchi_dev, 2.0, M > 0 ? 1 : 0, mp, 3.0);
  auto rep_rho = verify_decay_class(rho_s, 3.0, M > 0 ? 1 : 0, mp, 2.1);
  auto rep_om = verify_decay_class(omega_s, 2.0, M > 0 ? 1 : 0, mp, 3.0);
  for (int i = 0; i < n_samples; ++i) {
    rep.rows.push_back({rs[i], std::string("trchi_dev"), trchi_dev[i].value,
                        2.0, std::int64_t(1),
                        std::abs(trchi_dev[i].value) * sq(rs[i]) / mp});
    rep.rows.push_back({rs[i], std::string("rho"), rho_s[i].value, 3.0,
                        std::int64_t(1),
                        std::abs(rho_s[i].value) * std::pow(rs[i], 3) / mp});
  }
  rep.scalars["fd_vs_closed_rel"] = worst_fd;
  rep.scalars["trchi_constant"] = rep_tr.constant;
  rep.scalars["rho_constant"] = rep_rho.constant;
  rep.scalars["omega_constant"] = rep_om.constant;
  rep.checks["bg-fd-closed-1e8"] = (a != 0.0) || worst_fd < 1e-8;
  rep.checks["bg-trchi-class"] = rep_tr.pass;
  rep.checks["bg-rho-class"] = rep_rho.pass;
  return rep;
}

Report hodge_verify_suite(int L, int trials, std::uint64_t seed) {
  Report rep;
  rep.id = "hodge-verify";
  auto geom = make_geometry(L, 1.0);
  auto hv = verify_hodge_identities(geom, trials, seed);
  rep.columns = {"identity", "residual"};
  for (std::size_t i = 0; i < hv.identity.size(); ++i)
    rep.rows.push_back({hv.identity[i], hv.residuals[i]});
  rep.scalars["max_residual"] = hv.max_residual;
  rep.scalars["trials"] = std::int64_t(trials);
  rep.checks["hodge-identities-1e9"] = hv.max_residual < 1e-9;

  // elliptic solver forward residuals over random right-hand sides
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  double worst = 0.0;
  for (int t = 0; t < 8; ++t) {
    auto f = random_field(Rank::ScalarPair, geom, rng);
    f.coef[SwshEngine::idx(0, 0)] = 0.0;
    worst = std::max(worst, solve_hodge(HodgeSystem::Laplacian, f).residual);
    auto g1 = random_field(Rank::ScalarPair, geom, rng);
    g1.coef[SwshEngine::idx(0, 0)] = 0.0;
    worst = std::max(worst, solve_hodge(HodgeSystem::D1, g1).residual);
    auto g2 = random_field(Rank::OneForm, geom, rng);
    for (int m = -1; m <= 1; ++m) g2.coef[SwshEngine::idx(1, m)] = 0.0;
    worst = std::max(worst, solve_hodge(HodgeSystem::D2, g2).residual);
  }
  rep.scalars["solver_residual"] = worst;
  rep.checks["hodge-solver-1e9"] = worst < 1e-9;
  return rep;
}

Report hodge_poincare_suite(int L, double eps, int trials, std::uint64_t seed) {
  Report rep;
  rep.id = "hodge-poincare";
  auto round_geom = make_geometry(L, 1.0);
  auto round = poincare_min(round_geom, trials, seed);
  rep.scalars["round_min"] = round.min_ratio;
  rep.checks["poincare-round-399"] = round.min_ratio >= 3.99;

  std::vector<cplx> phi(get_engine(L)->ncoef(), cplx(0.0));
  phi[SwshEngine::idx(2, 1)] = cplx(0.7 * eps, 0.4 * eps);
  phi[SwshEngine::idx(4, 0)] = cplx(0.5 * eps, 0.0);
  phi[SwshEngine::idx(3, -2)] = cplx(0.0, 0.5 * eps);
  auto pert = poincare_min(make_geometry(L, 1.0, phi), trials, seed);
  rep.scalars["perturbed_min"] = pert.min_ratio;
  rep.scalars["eps"] = eps;
  rep.checks["poincare-perturbed-35"] = pert.min_ratio >= 3.5;
  return rep;
}

Report decay_suite(const std::string& db_path, double s_lo, double s_hi) {
  Report rep;
  rep.id = "decaycheck";
  SInterval si{s_lo, s_hi};
  auto db = load_equation_db(db_path);
  rep.columns = {"equation", "pass", "terms"};
  int npass = 0;
  for (const auto& eq : db) {
    auto v = check_equation(eq, si);
    npass += v.pass;
    rep.rows.push_back({eq.id, v.pass, std::int64_t(v.terms.size())});
  }
  rep.scalars["equations"] = std::int64_t(db.size());
  rep.scalars["passed"] = std::int64_t(npass);
  rep.checks["decay-all-pass"] = npass == int(db.size());

  auto mutants = make_mutants(db, 10);
  int mfail = 0;
  for (const auto& m : mutants) mfail += !check_equation(m, si).pass;
  rep.scalars["mutants"] = std::int64_t(mutants.size());
  rep.scalars["mutants_failed"] = std::int64_t(mfail);
  rep.checks["decay-mutants-fail"] =
      mfail == int(mutants.size()) && mutants.size() == 10;
  return rep;
}

Report frames_suite(std::uint64_t seed, double f_amp, double lambda) {
  Report rep;
  rep.id = "frames";
  KerrParams schw(1.0, 0.0);
  double r = 15.0, th = 1.2, ph = 0.5;
  double rs = tortoise_coords(schw, r, th).r_star;
  auto fr = double_null_frame(schw, -rs, rs, th, ph);
  auto g = bl_metric(schw, r, th);
  auto dot = [&](const std::array<double, 4>& X, const std::array<double, 4>& Y) {
    double acc = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) acc += g[i][j] * X[i] * Y[j];
    return acc;
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> un(-f_amp, f_amp);
  double worst_rt = 0.0, worst_null = 0.0;
  for (int t = 0; t < 50; ++t) {
    FrameTransform T(lambda + un(rng), {un(rng), un(rng)});
    auto pr = apply_frame(T, fr);
    worst_null = std::max({worst_null, std::abs(dot(pr.e4, pr.e4)),
                           std::abs(dot(pr.e3, pr.e3)),
                           std::abs(dot(pr.e3, pr.e4) + 2.0)});
    auto back = apply_frame_inverse(T, pr);
    for (int i = 0; i < 4; ++i) {
      worst_rt = std::max(worst_rt, std::abs(back.e3[i] - fr.e3[i]));
      worst_rt = std::max(worst_rt, std::abs(back.e4[i] - fr.e4[i]));
      worst_rt = std::max(worst_rt, std::abs(back.e1[i] - fr.e1[i]));
      worst_rt = std::max(worst_rt, std::abs(back.e2[i] - fr.e2[i]));
    }
  }
  rep.scalars["roundtrip_max"] = worst_rt;
  rep.scalars["null_max"] = worst_null;
  rep.checks["frames-roundtrip-1e12"] = worst_rt < 1e-12;

  // exact laws through the field algebra: compose with the inverse transform
  auto geom = make_geometry(12, r);
  std::mt19937_64 rng2(seed + 1);
  auto R = make_background_curv(geom, schwarzschild_rho_closed(schw, r));
  R.alphab = random_field(Rank::TwoTensor, geom, rng2);
  R.betab = random_field(Rank::OneForm, geom, rng2);
  auto f = f_amp * random_field(Rank::OneForm, geom, rng2, 4);
  FrameTransform T(lambda, {0, 0});
  auto out = transform_curvature(T, f, R);
  double exact1 = sup_norm(sq(lambda) * out.alphab - R.alphab);
  auto chib_in = SphereField(Rank::ScalarPair, geom);
  chib_in.coef[SwshEngine::idx(0, 0)] = 1.0;
  auto rc = schwarzschild_ricci_closed(schw, r);
  auto tr = transform_ricci(T, f, rc);
  double exact2 = std::abs(lambda * tr.trchib.coef[SwshEngine::idx(0, 0)].real() /
                               std::sqrt(4.0 * M_PI) -
                           rc.trchib);
  rep.scalars["alphab_exact"] = exact1;
  rep.scalars["trchib_exact"] = exact2;
  rep.checks["frames-exact-laws-1e12"] = exact1 < 1e-12 && exact2 < 1e-12;

  // quadratic scaling of the trchi' residual under f -> f/2
  auto fprofile = [](double t, double p2) {
    auto sy = [&](int l, int m) {
      double lam = -std::sqrt((2.0 * l + 1) / (4 * M_PI)) * wigner_d(l, m, -1, t);
      return lam * std::exp(cplx(0.0, m * p2));
    };
    cplx eta = sy(2, 1) + cplx(0.4, 0.25) * sy(3, -2) + cplx(0.0, 0.6) * sy(1, 0);
    return std::array<double, 2>{eta.real(), eta.imag()};
  };
  auto residual = [&](double eps) {
    auto ffn = [&](double t, double p2) {
      auto v = fprofile(t, p2);
      return std::array<double, 2>{eps * v[0], eps * v[1]};
    };
    auto geom16 = make_geometry(16, r);
    const auto& eng = *geom16->eng;
    std::vector<cplx> grid(eng.ngrid());
    for (int j = 0; j < eng.ntheta(); ++j)
      for (int k = 0; k < eng.nphi(); ++k) {
        auto v = ffn(eng.theta(j), eng.phi(k));
        grid[std::size_t(j) * eng.nphi() + k] = cplx(v[0], v[1]);
      }
    auto ff = SphereField::from_grid(Rank::OneForm, geom16, grid);
    auto trf = transform_ricci(FrameTransform(lambda, {0, 0}), ff, rc);
    cplx formula = 0.0;
    for (int l = 0; l <= eng.bandlimit(); ++l)
      for (int m = -l; m <= l; ++m)
        formula += trf.trchi.coef[SwshEngine::idx(l, m)] *
                   std::sqrt((2.0 * l + 1) / (4 * M_PI)) * wigner_d(l, m, 0, th) *
                   std::exp(cplx(0, m * ph));
    double direct = direct_trchi_primed(schw, r, th, ph, lambda, ffn);
    return std::abs(direct - formula.real());
  };
  double factor = residual(2.0 * f_amp) / residual(f_amp);
  rep.scalars["quadratic_factor"] = factor;
  rep.checks["frames-quadratic-36-44"] = factor > 3.6 && factor < 4.4;
  return rep;
}

namespace {

// manufactured exact pair solution (same construction as the test oracle)
PairFieldSet manufacture_pair(const NullGrid& g, const BianchiPair& pair, int l,
                              int m) {
  PairFieldSet fs;
  std::size_t N = g.nu() * g.nub();
  fs.psi1.assign(N, SphereField());
  fs.psi2.assign(N, SphereField());
  fs.h1.assign(N, SphereField());
  fs.h2.assign(N, SphereField());
  auto basis_of = [&](Rank rk, GeomPtr geom) {
    switch (rk) {
      case Rank::TwoTensor: return basis_twotensor(geom, l, m, false);
      case Rank::OneForm: return basis_oneform(geom, l, m, false);
      default: return basis_scalar(geom, l, m, false);
    }
  };
  auto c1 = [](double u, double ub) {
    return std::cos(0.03 * (u + ub)) * std::pow(0.5 * (ub - u), -2.5);
  };
  auto c2 = [](double u, double ub) {
    return std::sin(0.02 * (u + ub) + 0.4) * std::pow(0.5 * (ub - u), -3.0);
  };
  double h = 1e-6;
  for (std::size_t i = 0; i < g.nu(); ++i)
    for (std::size_t j = 0; j < g.nub(); ++j) {
      std::size_t id = g.idx(i, j);
      auto geom = g.geom_at(i, j);
      double u = g.u[i], ub = g.ub[j];
      double r = g.r[id], Om = g.Om[id];
      double trchi = g.trchi(i, j), trchib = g.trchib(i, j);
      auto B1 = basis_of(pair.rank1, geom), B2 = basis_of(pair.rank2, geom);
      double p1 = c1(u, ub) * r, p2 = c2(u, ub) * r;
      fs.psi1[id] = p1 * B1;
      fs.psi2[id] = p2 * B2;
      double d3p1 = (c1(u + h, ub) - c1(u - h, ub)) / (2.0 * h) * r / Om;
      double d4p2 = (c2(u, ub + h) - c2(u, ub - h)) / (2.0 * h) * r / Om;
      SphereField ang1(pair.rank1, geom), ang2(pair.rank2, geom);
      if (pair.shape == 1) {
        ang1 = pair.k == 2 ? SphereField(p2 * 2.0 * d2_star(B2))
                           : SphereField(p2 * 1.0 * d1_star(B2));
        ang2 = pair.k == 2 ? SphereField((-p1) * d2(B1))
                           : SphereField((-p1) * d1(B1));
      } else {
        ang1 = pair.k == 2 ? SphereField((-p2) * d2(B2))
                           : SphereField((-p2) * d1(B2));
        ang2 = pair.k == 2 ? SphereField(p1 * 2.0 * d2_star(B1))
                           : SphereField(p1 * 1.0 * d1_star(B1));
      }
      fs.h1[id] = (d3p1 + pair.a1.value() * trchib * p1) * B1 + ang1;
      fs.h2[id] = (d4p2 + pair.a2.value() * trchi * p2) * B2 + ang2;
    }
  return fs;
}

const BianchiPair& pair_by_name(const std::string& name) {
  for (const auto& p : canonical_pairs())
    if (p.name == name) return p;
  static BianchiPair tout = teukolsky_pair_outgoing();
  static BianchiPair tin = teukolsky_pair_ingoing();
  if (name == tout.name) return tout;
  if (name == tin.name) return tin;
  throw std::invalid_argument("unknown Bianchi pair: " + name);
}

}  // namespace

Report energy_run_suite(const std::string& pair_name, double p,
                        const GridSpec& gs) {
  const auto& pair = pair_by_name(pair_name);
  Report rep;
  rep.id = "energy-run";
  rep.scalars["pair"] = pair_name;
  rep.scalars["p"] = p;
  rep.scalars["case"] = case_name(select_case(pair, p));

  auto g = make_background_grid(gs);
  auto fs = manufacture_pair(g, pair, 2, 1);
  auto dr = divergence_residual(g, pair, p, fs);
  rep.scalars["residual_linf"] = dr.residual_linf;

  GridSpec half = gs;
  half.n_u = 2 * (gs.n_u - 1) + 1;
  half.n_ub = 2 * (gs.n_ub - 1) + 1;
  auto g2 = make_background_grid(half);
  auto fs2 = manufacture_pair(g2, pair, 2, 1);
  auto dr2 = divergence_residual(g2, pair, p, fs2);
  double order = std::log2(dr.residual_linf / dr2.residual_linf);
  rep.scalars["convergence_order"] = order;

  auto fb = pair_flux_balance(g, pair, p, fs);
  rep.scalars["out_flux"] = fb.out_flux;
  rep.scalars["in_flux"] = fb.in_flux;
  rep.scalars["bulk"] = fb.bulk;
  rep.scalars["initial"] = fb.initial;
  rep.checks["energy-convergence-19"] = order >= 1.9;
  return rep;
}

Report energy_divergence_suite(const GridSpec& base, const std::vector<int>& levels) {
  Report rep;
  rep.id = "energy-divergence";
  const auto& cp = canonical_pairs();
  std::vector<double> ps{5.0, 4.0, 2.0, 0.0};
  rep.columns = {"pair", "p", "order"};
  bool ok = true;
  for (std::size_t pi = 0; pi < cp.size(); ++pi) {
    std::vector<double> hs, resid;
    for (int n : levels) {
      GridSpec spec = base;
      spec.n_u = n;
      spec.n_ub = n;
      auto g = make_background_grid(spec);
      auto fs = manufacture_pair(g, cp[pi], 2, 1);
      hs.push_back((base.ub1 - base.ub0) / (n - 1));
      resid.push_back(divergence_residual(g, cp[pi], ps[pi], fs).residual_linf);
    }
    double order = fit_loglog(hs, resid).first;
    rep.rows.push_back({cp[pi].name, ps[pi], order});
    ok = ok && order >= 1.9;
  }
  rep.checks["energy-divergence-order-19"] = ok;
  return rep;
}

Report energy_cases_suite() {
  Report rep;
  rep.id = "energy-cases";
  rep.columns = {"regime", "pair", "p", "case"};
  struct Expect {
    double s;
    std::vector<double> p;
    std::vector<std::string> c;
  };
  // the three regimes and the additional Teukolsky pair above s = 6
  std::vector<Expect> expects = {
      {3.5, {3.5, 3.5, 2, 0}, {"a", "a", "c", "c"}},
      {5.0, {5, 4, 2, 0}, {"a", "b", "c", "c"}},
      {7.0, {6, 4, 2, 0, 7.0}, {"b", "b", "c", "c", "a"}},
      {8.0, {6, 4, 2, 0, 7.5}, {"b", "b", "c", "c", "a"}},
  };
  bool ok = true;
  for (const auto& e : expects) {
    auto table = canonical_case_table(e.s);
    if (table.size() != e.p.size()) {
      ok = false;
      continue;
    }
    for (std::size_t i = 0; i < table.size(); ++i) {
      rep.rows.push_back({std::to_string(e.s), table[i].pair, table[i].p,
                          case_name(table[i].c)});
      ok = ok && std::abs(table[i].p - e.p[i]) < 1e-12 &&
           case_name(table[i].c) == e.c[i];
    }
  }
  rep.checks["energy-case-table"] = ok;
  return rep;
}

Report energy_peeling_suite() {
  Report rep;
  rep.id = "energy-peeling";
  rep.columns = {"s", "quantity", "l2_r", "l2_u", "log_flag", "sup_r", "sup_u"};
  bool ok = true;
  auto expect = [&](double s, const std::string& q, double l2r, double l2u,
                    bool logf) {
    for (const auto& e : peeling_exponents(s))
      if (e.quantity == q)
        return e.has_l2 && std::abs(e.l2_r - l2r) < 1e-12 &&
               std::abs(e.l2_u - l2u) < 1e-12 && e.log_flag == logf;
    return false;
  };
  // pinned rows of the three displayed tables
  ok = ok && expect(8.0, "ac", 4.0, 0.5, false);
  ok = ok && expect(7.0, "ac", 4.0, 0.0, true);
  ok = ok && expect(6.5, "ac", 3.75, 0.0, false);
  ok = ok && expect(5.0, "bbc", 1.0, 2.0, false);
  ok = ok && expect(3.5, "bc", 2.75, 0.0, false);
  ok = ok && expect(8.0, "aac", 0.0, 4.5, false);
  // strong-peeling sup rows at s = 8
  for (const auto& e : peeling_exponents(8.0)) {
    if (e.quantity == "ac")
      ok = ok && e.has_sup && e.sup_r == 5.0 && std::abs(e.sup_u - 0.5) < 1e-12;
    if (e.quantity == "bbc")
      ok = ok && e.has_sup && e.sup_r == 2.0 && std::abs(e.sup_u - 3.5) < 1e-12;
  }
  for (double s : {3.5, 5.0, 6.5, 7.0, 8.0})
    for (const auto& e : peeling_exponents(s))
      rep.rows.push_back({s, e.quantity, e.l2_r, e.l2_u, e.log_flag, e.sup_r,
                          e.sup_u});
  rep.checks["peeling-tables"] = ok;
  return rep;
}

Report transport_suite() {
  Report rep;
  rep.id = "transport";
  ConeBackground bg{KerrParams(0.0, 0.0), -40.0, true};
  int L = 4;
  std::vector<double> nodes;
  for (int j = 0; j <= 720; ++j) nodes.push_back(40.0 + j * 1.0);
  auto U0 = basis_oneform(make_geometry(L, bg.r_of(nodes[0])), 2, 1, false);
  auto res = propagate_outgoing(bg, U0, nullptr, 1.0, 2, nodes);
  double dev = 0.0;
  for (double tr : res.trace)
    dev = std::max(dev, std::abs(tr - res.trace[0]) / res.trace[0]);
  rep.scalars["trace_rel_drift"] = dev;
  rep.checks["transport-conserved-1e6"] = dev < 1e-6;

  ForcingFn F = [&](double, double r) {
    SphereField f(Rank::OneForm, make_geometry(L, r));
    f.coef[SwshEngine::idx(2, 1)] = std::pow(r, -3.0);
    return f;
  };
  std::vector<double> coarse{40, 50, 60, 70, 80};
  std::vector<double> fine{40, 45, 50, 55, 60, 65, 70, 75, 80};
  std::vector<double> refn;
  for (int j = 0; j <= 640; ++j) refn.push_back(40.0 + j * 40.0 / 640.0);
  auto rc = propagate_outgoing(bg, U0, F, 1.0, 2, coarse);
  auto rf = propagate_outgoing(bg, U0, F, 1.0, 2, fine);
  auto rr = propagate_outgoing(bg, U0, F, 1.0, 2, refn);
  double eC = std::abs(rc.values.back().coef[SwshEngine::idx(2, 1)].real() -
                       rr.values.back().coef[SwshEngine::idx(2, 1)].real());
  double eF = std::abs(rf.values.back().coef[SwshEngine::idx(2, 1)].real() -
                       rr.values.back().coef[SwshEngine::idx(2, 1)].real());
  rep.scalars["halving_gain"] = eC / eF;
  rep.checks["transport-4th-order"] = eC / eF >= 15.0;
  return rep;
}

Report bianchi_suite(const GridSpec& spec, double s, const std::string& profile,
                     int l, int m, double amplitude) {
  Report rep;
  rep.id = "evolve-bianchi";
  auto data = make_profile_data(spec, s, l, m, profile, amplitude);
  auto res = evolve_linear_bianchi(spec, data, s);
  const auto& g = res.grid;

  // per-(l,m) oracle
  auto oracle = evolve_mode_oracle(spec, data, l, m);
  double dmax = 0.0, scale = 0.0;
  for (std::size_t n = 0; n < oracle.bbc.size(); ++n) {
    dmax = std::max(dmax,
                    std::abs(g.fields.at("bbc")[n].coef[SwshEngine::idx(l, m)] -
                             oracle.bbc[n]));
    dmax = std::max(dmax,
                    std::abs(g.fields.at("ac")[n].coef[SwshEngine::idx(l, m)] -
                             oracle.ac[n]));
    scale = std::max({scale, std::abs(oracle.bbc[n]), std::abs(oracle.ac[n])});
  }
  rep.scalars["oracle_diff"] = dmax;
  rep.scalars["oracle_scale"] = scale;
  rep.checks["bianchi-oracle-1e6"] = scale > 0 && dmax < 1e-6 * std::max(1.0, scale);
  // profile-dependent gates: radiating corner-free data carries the decay
  // slope; corner-seeded data carries the flux-boundedness comparison
  bool gate_slope = profile == "radiative" || profile == "moment";

  // R norms bounded by twice the initial fluxes
  auto val = [&](const std::string& name, double coord) {
    for (const auto& v : res.norms.values)
      if (v.name == name && v.coord == coord) return v.value;
    return -1.0;
  };
  bool bounded = true;
  for (const char* fam : {"bc", "rsc", "bbc"}) {
    double first = val("R0[" + std::string(fam) + "]", g.u.front());
    double last = val("R0[" + std::string(fam) + "]", g.u.back());
    rep.scalars[std::string("R0_") + fam + "_initial"] = first;
    rep.scalars[std::string("R0_") + fam + "_final"] = last;
    bounded = bounded && last <= 2.0 * std::max(first, 1e-30) + 1e-20;
  }
  rep.scalars["r0_bounded"] = bounded;
  if (!gate_slope) rep.checks["bianchi-r0-bounded"] = bounded;

  // |betab|_{2,S} decay along a constant-r diagonal, fitted on the window
  // where the weighted-norm sup is attained: |u| in [0.75, 2.2] r_diag
  double du = g.u[1] - g.u[0], dub = g.ub[1] - g.ub[0];
  rep.scalars["du_matches_dub"] = std::abs(du - dub);
  int off = int(g.nub()) - 1 - int(0.18 * g.nu());  // diagonal j = i + off - (nub-1)
  std::vector<double> fx, fy;
  double rdiag = 0.0;
  for (std::size_t i = 0; i < g.nu(); ++i) {
    int j = int(i) + off - int(g.nub() - 1);
    if (j < 0 || j >= int(g.nub())) continue;
    std::size_t id = g.idx(i, std::size_t(j));
    rdiag = g.r[id];
    double uu = std::abs(g.u[i]);
    double l2 = lp_norm(g.fields.at("bbc")[id], 2);
    if (l2 > 0) {
      fx.push_back(uu);
      fy.push_back(l2);
    }
  }
  std::vector<double> wx, wy;
  for (std::size_t n = 0; n < fx.size(); ++n)
    if (fx[n] >= 0.75 * rdiag && fx[n] <= 2.2 * rdiag) {
      wx.push_back(fx[n]);
      wy.push_back(fy[n]);
    }
  double slope = 0.0, r2fit = 0.0;
  if (wx.size() >= 6) {
    auto [sl, rr2] = fit_loglog(wx, wy);
    slope = sl;
    r2fit = rr2;
  }
  double target = -0.5 * (s - 1.0);
  rep.scalars["bbc_slope"] = slope;
  rep.scalars["bbc_slope_target"] = target;
  rep.scalars["bbc_slope_r2"] = r2fit;
  rep.scalars["bbc_slope_rdiag"] = rdiag;
  if (gate_slope)
    rep.checks["bianchi-bbc-slope-15pct"] =
        wx.size() >= 6 && std::abs(slope - target) <= 0.15 * std::abs(target);
  rep.scalars["constraint_residual"] = res.constraint_residual;
  // per-cone norm table: (u or ub, norm name, value)
  rep.columns = {"coord", "norm", "value"};
  for (const auto& v : res.norms.values)
    rep.rows.push_back({v.coord, v.name, v.value});
  return rep;
}

GridSpec grid_from_config(const RunConfig& cfg) {
  GridSpec gs;
  gs.u0 = cfg.get_num("grid.u0", -640.0);
  gs.u1 = cfg.get_num("grid.u1", -160.0);
  gs.ub0 = cfg.get_num("grid.ub0", 20.0);
  gs.ub1 = cfg.get_num("grid.ub_max", 500.0);
  gs.n_u = cfg.get_int("grid.n_u", 64);
  gs.n_ub = cfg.get_int("grid.n_ub", 64);
  gs.L = cfg.get_int("grid.L", 8);
  std::string bgname = cfg.get("grid.background", "minkowski");
  if (bgname == "minkowski") {
    gs.params = KerrParams(0.0, 0.0);
  } else if (bgname == "schwarzschild") {
    gs.params = KerrParams(cfg.get_num("grid.M", 1.0), 0.0);
  } else {
    throw ConfigError("grid.background must be minkowski or schwarzschild");
  }
  return gs;
}

}  // namespace nullcone
