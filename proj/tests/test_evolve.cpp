#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nullcone/evolve.hpp"

using namespace nullcone;

TEST_CASE("area radius transport") {
  GridSpec mink;
  mink.params = KerrParams(0.0, 0.0);
  mink.u0 = -60; mink.u1 = -30; mink.ub0 = 60; mink.ub1 = 120;
  mink.n_u = 7; mink.n_ub = 31; mink.L = 4;
  auto r = evolve_area_radius(mink);
  auto ref = make_background_grid(mink);
  for (std::size_t n = 0; n < r.size(); ++n)
    CHECK(r[n] == doctest::Approx(ref.r[n]).epsilon(1e-12));  // linear RHS: exact

  GridSpec schw = mink;
  schw.params = KerrParams(1.0, 0.0);
  auto rs = evolve_area_radius(schw);
  auto refs = make_background_grid(schw);  // tortoise-inversion oracle
  double err = 0.0;
  for (std::size_t n = 0; n < rs.size(); ++n)
    err = std::max(err, std::abs(rs[n] - refs.r[n]) / refs.r[n]);
  CHECK(err < 1e-8);

  // 4th order: doubling resolution reduces the error by >= 15x
  GridSpec coarse = schw;
  coarse.n_ub = 9;
  GridSpec fine = schw;
  fine.n_ub = 17;
  auto rc = evolve_area_radius(coarse);
  auto rf = evolve_area_radius(fine);
  auto bc = make_background_grid(coarse);
  auto bf = make_background_grid(fine);
  double ec = 0.0, ef = 0.0;
  for (std::size_t n = 0; n < rc.size(); ++n)
    ec = std::max(ec, std::abs(rc[n] - bc.r[n]));
  for (std::size_t n = 0; n < rf.size(); ++n)
    ef = std::max(ef, std::abs(rf[n] - bf.r[n]));
  CHECK(ec / ef >= 15.0);
}

TEST_CASE("outgoing transport conservation and Duhamel") {
  ConeBackground bg{KerrParams(0.0, 0.0), -40.0, true};
  int L = 4;
  std::vector<double> nodes;
  // one decade of r growth: r from 40 to 400
  for (int j = 0; j <= 720; ++j) nodes.push_back(40.0 + j * 1.0);
  auto geom0 = make_geometry(L, bg.r_of(nodes[0]));
  auto U0 = basis_oneform(geom0, 2, 1, false);

  // lam0 = 1, p = 2, F = 0: |r U|_{2,S} constant to relative 1e-6
  auto res = propagate_outgoing(bg, U0, nullptr, 1.0, 2, nodes);
  for (double tr : res.trace)
    CHECK(tr == doctest::Approx(res.trace[0]).epsilon(1e-6));

  // lam0 = 1/2, p = 2: lam1 = 0, |U|_{2,S} constant
  auto res2 = propagate_outgoing(bg, U0, nullptr, 0.5, 2, nodes);
  for (double tr : res2.trace)
    CHECK(tr == doctest::Approx(res2.trace[0]).epsilon(1e-6));

  // forcing r^{-3}: closed-form Duhamel integral for the mode amplitude:
  // with Omega = 1/2 and r = (ub - u)/2, dU/dr + (2 lam0 / r) U = F, so
  // r^2 U = r0^2 U0 + int r'^2 F(r') dr' = r0^2 U0 + log(r/r0)
  double lam0 = 1.0;
  ForcingFn F = [&](double, double r) {
    SphereField f(Rank::OneForm, make_geometry(L, r));
    f.coef[SwshEngine::idx(2, 1)] = std::pow(r, -3.0);
    return f;
  };
  auto res3 = propagate_outgoing(bg, U0, F, lam0, 2, nodes);
  double r0 = bg.r_of(nodes[0]), r1 = bg.r_of(nodes.back());
  double u0coef = -1.0 / r0;  // electric basis coefficient
  double exact_coef = (r0 * r0 * u0coef + std::log(r1 / r0)) / (r1 * r1);
  double got = res3.values.back().coef[SwshEngine::idx(2, 1)].real();
  CHECK(got == doctest::Approx(exact_coef).epsilon(1e-6));
  // trace stays below the Duhamel majorant (with a discretization margin)
  for (std::size_t j = 0; j < res3.trace.size(); ++j)
    CHECK(res3.trace[j] <= res3.duhamel_bound[j] * (1.0 + 1e-3) + 1e-12);

  // 4th-order convergence of the integrator on a forced run
  std::vector<double> coarse_nodes{40, 50, 60, 70, 80};
  std::vector<double> fine_nodes{40, 45, 50, 55, 60, 65, 70, 75, 80};
  std::vector<double> ref_nodes;
  for (int j = 0; j <= 640; ++j) ref_nodes.push_back(40.0 + j * 40.0 / 640.0);
  auto rc = propagate_outgoing(bg, U0, F, 1.0, 2, coarse_nodes);
  auto rf = propagate_outgoing(bg, U0, F, 1.0, 2, fine_nodes);
  auto rr = propagate_outgoing(bg, U0, F, 1.0, 2, ref_nodes);
  double eC = std::abs(rc.values.back().coef[SwshEngine::idx(2, 1)].real() -
                       rr.values.back().coef[SwshEngine::idx(2, 1)].real());
  double eF = std::abs(rf.values.back().coef[SwshEngine::idx(2, 1)].real() -
                       rr.values.back().coef[SwshEngine::idx(2, 1)].real());
  CHECK(eC / eF >= 15.0);

  CHECK_THROWS_AS(propagate_outgoing(bg, U0, nullptr, -1.0, 2, nodes), DomainError);
  CHECK_THROWS_AS(propagate_outgoing(bg, U0, nullptr, 1.0, 3, nodes), DomainError);
}

TEST_CASE("ingoing transport mirrors and Gronwall") {
  ConeBackground bg{KerrParams(0.0, 0.0), 120.0, false};
  int L = 4;
  std::vector<double> nodes;
  for (int i = 0; i <= 400; ++i) nodes.push_back(-80.0 + i * 0.1);
  auto geom0 = make_geometry(L, bg.r_of(nodes[0]));
  auto V0 = basis_oneform(geom0, 2, 1, false);
  auto res = propagate_ingoing(bg, V0, nullptr, 1.0, 2, nodes);
  // lam1 = 1: the weighted trace |r V|_{2,S} is conserved here as well
  for (double tr : res.trace)
    CHECK(tr == doctest::Approx(res.trace[0]).epsilon(1e-6));
  // unweighted |V|_{2,S} grows as r shrinks (trchib < 0 drives growth)
  CHECK(lp_norm(res.values.back(), 2) > lp_norm(res.values.front(), 2));

  ConeBackground bgs{KerrParams(1.0, 0.0), 120.0, false};
  auto ress = propagate_ingoing(bgs, V0, nullptr, 1.0, 2, nodes);
  for (double tr : ress.trace)
    CHECK(tr == doctest::Approx(ress.trace[0]).epsilon(2e-4));

  // Gronwall utility on a' = k a with k = 1/(1+t): a = c (1+t)
  std::vector<double> t, k;
  for (int i = 0; i <= 100; ++i) {
    t.push_back(i * 0.03);
    k.push_back(1.0 / (1.0 + t.back()));
  }
  auto bound = gronwall_bound(2.0, t, k);
  for (std::size_t i = 0; i < t.size(); ++i)
    CHECK(bound[i] == doctest::Approx(2.0 * (1.0 + t[i])).epsilon(1e-4));
}

TEST_CASE("linear Bianchi evolution") {
  GridSpec spec;
  spec.params = KerrParams(0.0, 0.0);
  spec.u0 = -80; spec.u1 = -30; spec.ub0 = 80; spec.ub1 = 160;
  spec.n_u = 25; spec.n_ub = 25; spec.L = 6;
  double s = 5.0;

  // zero data stays zero
  {
    BianchiData zero;
    auto ref = make_background_grid(spec);
    for (int q = 0; q < spec.n_ub; ++q)
      zero.ac_out.push_back(
          SphereField(Rank::TwoTensor, make_geometry(spec.L, ref.r[ref.idx(0, q)])));
    for (int q = 0; q < spec.n_u; ++q) {
      auto geom = make_geometry(spec.L, ref.r[ref.idx(q, 0)]);
      zero.bc_in.push_back(SphereField(Rank::OneForm, geom));
      zero.rsc_in.push_back(SphereField(Rank::ScalarPair, geom));
      zero.bbc_in.push_back(SphereField(Rank::OneForm, geom));
      zero.aac_in.push_back(SphereField(Rank::TwoTensor, geom));
    }
    auto res0 = evolve_linear_bianchi(spec, zero, s);
    for (const auto& v : res0.norms.values) CHECK(v.value == 0.0);
  }

  auto data = make_profile_data(spec, s, 2, 1, "family", 1e-3);
  auto res = evolve_linear_bianchi(spec, data, s);

  // mode support: only the (l, +-m) = (2, +-1) block is populated
  for (const char* key : {"ac", "bc", "rsc", "bbc", "aac"}) {
    const auto& f = res.grid.fields.at(key);
    double leak = 0.0;
    for (const auto& x : f)
      for (int l = 0; l <= spec.L; ++l)
        for (int m = -l; m <= l; ++m) {
          if (l == 2 && std::abs(m) == 1) continue;
          leak = std::max(leak, std::abs(x.coef[SwshEngine::idx(l, m)]));
        }
    CHECK(leak < 1e-12);
  }

  // per-(l,m) oracle agreement
  auto oracle = evolve_mode_oracle(spec, data, 2, 1);
  double dmax = 0.0, scale = 0.0;
  for (std::size_t n = 0; n < oracle.bbc.size(); ++n) {
    dmax = std::max(dmax, std::abs(res.grid.fields.at("bbc")[n].coef[SwshEngine::idx(2, 1)] -
                                   oracle.bbc[n]));
    dmax = std::max(dmax, std::abs(res.grid.fields.at("ac")[n].coef[SwshEngine::idx(2, 1)] -
                                   oracle.ac[n]));
    scale = std::max(scale, std::abs(oracle.bbc[n]));
  }
  CHECK(scale > 0.0);
  CHECK(dmax < 1e-6 * std::max(1.0, scale));

  // constraint transport equations hold to truncation error
  CHECK(res.constraint_residual < 1e-5);

  // R norms bounded: final outgoing fluxes at most 2x the initial ones
  auto val = [&](const std::string& name, double coord) {
    for (const auto& v : res.norms.values)
      if (v.name == name && v.coord == coord) return v.value;
    return -1.0;
  };
  for (const char* fam : {"bc", "rsc", "bbc"}) {
    double first = val("R0[" + std::string(fam) + "]", res.grid.u.front());
    double last = val("R0[" + std::string(fam) + "]", res.grid.u.back());
    CHECK(first >= 0.0);
    CHECK(last <= 2.0 * std::max(first, 1e-30) + 1e-20);
  }

  // case inequalities of the four pairs on the evolved solution
  const auto& cp = canonical_pairs();
  std::vector<double> ps{s, 4.0, 2.0, 0.0};
  std::vector<std::pair<std::string, std::string>> keys{
      {"ac", "bc"}, {"bc", "rsc"}, {"rsc", "bbc"}, {"bbc", "aac"}};
  for (std::size_t pi = 0; pi < cp.size(); ++pi) {
    PairFieldSet fs;
    fs.psi1 = res.grid.fields.at(keys[pi].first);
    fs.psi2 = res.grid.fields.at(keys[pi].second);
    for (std::size_t n = 0; n < fs.psi1.size(); ++n) {
      fs.h1.push_back(SphereField(cp[pi].rank1, fs.psi1[n].geom));
      fs.h2.push_back(SphereField(cp[pi].rank2, fs.psi2[n].geom));
    }
    auto fb = pair_flux_balance(res.grid, cp[pi], ps[pi], fs);
    INFO("pair ", cp[pi].name, " slack ", fb.slack, " initial ", fb.initial);
    CHECK(fb.slack >= -0.05 * fb.initial);
  }

  // CFL guard trips when the step ignores the band limit
  GridSpec bad = spec;
  bad.L = 24;
  bad.n_ub = 9;
  CHECK_THROWS_AS(evolve_linear_bianchi(bad, data, s), NumericError);
}

TEST_CASE("teukolsky pair equation on evolved data") {
  // the residual of the first pair equation is pure differencing error on
  // the linear flat solution: second-order convergence under refinement
  GridSpec spec;
  spec.params = KerrParams(0.0, 0.0);
  spec.u0 = -80; spec.u1 = -40; spec.ub0 = 80; spec.ub1 = 120;
  spec.L = 5;
  std::vector<double> resid;
  for (int n : {17, 33, 65}) {
    GridSpec sp = spec;
    sp.n_u = n;
    sp.n_ub = n;
    auto data = make_profile_data(sp, 5.0, 2, 1, "family", 1e-3);
    auto res = evolve_linear_bianchi(sp, data, 5.0);
    resid.push_back(teukolsky_residual(res.grid, "ac"));
  }
  for (std::size_t k = 0; k + 1 < resid.size(); ++k) {
    double order = std::log2(resid[k] / resid[k + 1]);
    INFO("level ", k, " order ", order);
    CHECK(order >= 1.7);
  }
}

TEST_CASE("linear Bianchi on a Schwarzschild background") {
  GridSpec spec;
  spec.params = KerrParams(1.0, 0.0);
  spec.u0 = -120; spec.u1 = -60; spec.ub0 = 120; spec.ub1 = 200;
  spec.n_u = 17; spec.n_ub = 17; spec.L = 5;
  auto data = make_profile_data(spec, 5.0, 2, 1, "family", 1e-3);
  auto res = evolve_linear_bianchi(spec, data, 5.0);
  auto oracle = evolve_mode_oracle(spec, data, 2, 1);
  double dmax = 0.0;
  for (std::size_t n = 0; n < oracle.bbc.size(); ++n)
    dmax = std::max(dmax,
                    std::abs(res.grid.fields.at("bbc")[n].coef[SwshEngine::idx(2, 1)] -
                             oracle.bbc[n]));
  CHECK(dmax < 1e-10);
  CHECK(res.constraint_residual < 1e-4);
}

TEST_CASE("sobolev spot checks") {
  GridSpec spec;
  spec.params = KerrParams(0.0, 0.0);
  spec.u0 = -80; spec.u1 = -40; spec.ub0 = 80; spec.ub1 = 160;
  spec.n_u = 9; spec.n_ub = 33; spec.L = 8;
  auto g = make_background_grid(spec);

  // pointwise-constant scalar field: both ratios finite and <= 2
  std::vector<SphereField> f(g.nu() * g.nub());
  for (std::size_t i = 0; i < g.nu(); ++i)
    for (std::size_t j = 0; j < g.nub(); ++j) {
      SphereField x(Rank::ScalarPair, g.geom_at(i, j));
      x.coef[SwshEngine::idx(0, 0)] = std::sqrt(4.0 * M_PI);
      f[g.idx(i, j)] = x;
    }
  g.fields["const"] = f;
  auto rep = sobolev_check(g, "const", 2, g.nub() - 2);
  CHECK(rep.ratio_l4 > 0.0);
  CHECK(rep.ratio_l4 <= 2.0);
  CHECK(rep.ratio_sup > 0.0);
  CHECK(rep.ratio_sup <= 2.0);

  // zero field: pass by convention
  std::vector<SphereField> z(g.nu() * g.nub());
  for (std::size_t i = 0; i < g.nu(); ++i)
    for (std::size_t j = 0; j < g.nub(); ++j)
      z[g.idx(i, j)] = SphereField(Rank::OneForm, g.geom_at(i, j));
  g.fields["zero"] = z;
  CHECK(sobolev_check(g, "zero", 2, 5).pass_by_convention);

  // band-limit sweep: ratios stay bounded as L grows
  std::mt19937_64 rng(77);
  double worst = 0.0;
  for (int L : {8, 16, 24}) {
    GridSpec sw = spec;
    sw.L = L;
    auto gl = make_background_grid(sw);
    std::vector<SphereField> rf(gl.nu() * gl.nub());
    auto shape = random_field(Rank::OneForm, make_geometry(L, 1.0), rng);
    for (std::size_t i = 0; i < gl.nu(); ++i)
      for (std::size_t j = 0; j < gl.nub(); ++j) {
        SphereField x = shape;
        x.geom = gl.geom_at(i, j);
        x *= std::pow(gl.r[gl.idx(i, j)], -2.0);
        rf[gl.idx(i, j)] = x;
      }
    gl.fields["rand"] = rf;
    auto r2 = sobolev_check(gl, "rand", 3, gl.nub() - 2);
    worst = std::max(worst, std::max(r2.ratio_l4, r2.ratio_sup));
  }
  CHECK(worst < 10.0);
}
