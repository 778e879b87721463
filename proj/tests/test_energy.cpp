#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nullcone/energy.hpp"

#include "manufactured.hpp"

using namespace nullcone;

TEST_CASE("canonical pair records") {
  const auto& cp = canonical_pairs();
  REQUIRE(cp.size() == 4);
  CHECK(cp[0].k == 2);
  CHECK(cp[0].a1 == Rational(1, 2));
  CHECK(cp[0].a2 == Rational(2));
  CHECK(cp[0].shape == 1);
  CHECK(cp[1].k == 1);
  CHECK(cp[1].a1 == Rational(1));
  CHECK(cp[1].a2 == Rational(3, 2));
  CHECK(cp[2].a1 == Rational(3, 2));
  CHECK(cp[2].shape == 2);
  CHECK(cp[3].a1 == Rational(2));
  CHECK(cp[3].a2 == Rational(1, 2));
}

TEST_CASE("case selection") {
  const auto& cp = canonical_pairs();
  CHECK(select_case(cp[0], 5.0) == WeightCase::A);  // (ac,bc), p = s = 5
  CHECK(select_case(cp[1], 4.0) == WeightCase::B);  // 4a2-2-p = 0
  CHECK(select_case(cp[2], 2.0) == WeightCase::C);
  CHECK(select_case(cp[3], 0.0) == WeightCase::C);
  CHECK(select_case(cp[0], 6.5) == WeightCase::D);
  CHECK(select_case(cp[2], 3.0) == WeightCase::None);

  auto t46 = canonical_case_table(5.0);
  REQUIRE(t46.size() == 4);
  CHECK(t46[0].p == 5.0);
  CHECK(t46[1].p == 4.0);
  CHECK(t46[2].p == 2.0);
  CHECK(t46[3].p == 0.0);
  CHECK(t46[0].c == WeightCase::A);
  CHECK(t46[1].c == WeightCase::B);
  CHECK(t46[2].c == WeightCase::C);
  CHECK(t46[3].c == WeightCase::C);

  auto t34 = canonical_case_table(3.5);
  CHECK(t34[0].p == 3.5);
  CHECK(t34[1].p == 3.5);
  CHECK(t34[1].c == WeightCase::A);  // 4 - s > 0 for s < 4

  auto t7 = canonical_case_table(7.0);
  REQUIRE(t7.size() == 5);
  CHECK(t7[0].p == 6.0);
  CHECK(t7[4].pair == "teukolsky-out");
  CHECK(t7[4].p == 7.0);  // s0 = min(s, 15/2)
  CHECK(t7[4].c == WeightCase::A);
  CHECK(canonical_case_table(8.0)[4].p == 7.5);
}

TEST_CASE("rp_flux examples") {
  GridSpec spec;
  spec.params = KerrParams(0.0, 0.0);
  spec.u0 = -40; spec.u1 = -20; spec.ub0 = 40; spec.ub1 = 80;
  spec.n_u = 9; spec.n_ub = 257; spec.L = 4;
  auto g = make_background_grid(spec);

  std::vector<SphereField> cone, cone2;
  std::vector<double> coord, r, Om;
  double s = 5.0;
  for (std::size_t j = 0; j < g.nub(); ++j) {
    auto geom = g.geom_at(0, j);
    double rr = g.r[g.idx(0, j)];
    SphereField one(Rank::ScalarPair, geom);
    one.coef[SwshEngine::idx(0, 0)] = std::sqrt(4.0 * M_PI);
    cone.push_back(one);
    SphereField f(Rank::ScalarPair, geom);
    f.coef[SwshEngine::idx(0, 0)] = std::pow(rr, -0.5 * s - 1.0) / rr;  // |f|_{2,S} profile
    cone2.push_back(f);
    coord.push_back(g.ub[j]);
    r.push_back(rr);
    Om.push_back(g.Om[g.idx(0, j)]);
  }
  // |psi| = 1, p = 0: the flux is the cone volume int 4 pi r^2 dub
  double flux = rp_flux(g, cone, coord, r, Om, 0.0);
  double exact = 8.0 * M_PI / 3.0 * (std::pow(r.back(), 3) - std::pow(r.front(), 3));
  CHECK(flux == doctest::Approx(exact).epsilon(1e-4));

  // |psi|_{2,S} = r^{-s/2-1} at p = s: integrand r^{-2} dub, finite as ub grows
  double f_full = rp_flux(g, cone2, coord, r, Om, s);
  double exact2 = 2.0 * (1.0 / r.front() - 1.0 / r.back());
  CHECK(f_full == doctest::Approx(exact2).epsilon(1e-4));

  // monotone in the upper endpoint
  double prev = 0.0;
  for (std::size_t hi = 1; hi < g.nub(); hi += 64) {
    std::vector<SphereField> c2(cone2.begin(), cone2.begin() + hi + 1);
    std::vector<double> cc(coord.begin(), coord.begin() + hi + 1),
        rr(r.begin(), r.begin() + hi + 1), oo(Om.begin(), Om.begin() + hi + 1);
    double cur = rp_flux(g, c2, cc, rr, oo, s);
    CHECK(cur >= prev);
    prev = cur;
  }
  CHECK_THROWS_AS(rp_flux(g, {}, {}, {}, {}, 0.0), std::invalid_argument);
}

TEST_CASE("divergence identity residual") {
  GridSpec base;
  base.params = KerrParams(0.0, 0.0);
  base.u0 = -40; base.u1 = -24; base.ub0 = 40; base.ub1 = 72;
  base.L = 5;

  const auto& cp = canonical_pairs();
  // zero fields give zero residual
  {
    GridSpec spec = base;
    spec.n_u = 5; spec.n_ub = 5;
    auto g = make_background_grid(spec);
    PairFieldSet fs;
    for (std::size_t i = 0; i < g.nu(); ++i)
      for (std::size_t j = 0; j < g.nub(); ++j) {
        auto geom = g.geom_at(i, j);
        fs.psi1.push_back(SphereField(cp[0].rank1, geom));
        fs.psi2.push_back(SphereField(cp[0].rank2, geom));
        fs.h1.push_back(SphereField(cp[0].rank1, geom));
        fs.h2.push_back(SphereField(cp[0].rank2, geom));
      }
    auto rep = divergence_residual(g, cp[0], 5.0, fs);
    CHECK(rep.residual_linf == 0.0);
    // rank mismatch is rejected
    std::swap(fs.psi1, fs.psi2);
    CHECK_THROWS_AS(divergence_residual(g, cp[0], 5.0, fs), RankError);
  }

  // manufactured solutions: fitted order >= 1.9 across three halvings
  std::vector<double> ps{5.0, 4.0, 2.0, 0.0};
  for (std::size_t pi = 0; pi < cp.size(); ++pi) {
    double order =
        mfg::fitted_divergence_order(cp[pi], ps[pi], base, {17, 33, 65, 129});
    INFO("pair ", cp[pi].name, " fitted order ", order);
    CHECK(order >= 1.9);
  }
}

TEST_CASE("norm suite weights and closed-form check") {
  auto w = sphere_norm_weight("bc", 5.0);
  CHECK(w.r_pow == doctest::Approx(2.5));
  CHECK(w.u_pow == doctest::Approx(0.5));

  GridSpec spec;
  spec.params = KerrParams(0.0, 0.0);
  spec.u0 = -50; spec.u1 = -30; spec.ub0 = 50; spec.ub1 = 90;
  spec.n_u = 5; spec.n_ub = 321; spec.L = 4;
  auto g = make_background_grid(spec);
  std::vector<SphereField> f(g.nu() * g.nub());
  for (std::size_t i = 0; i < g.nu(); ++i)
    for (std::size_t j = 0; j < g.nub(); ++j) {
      SphereField x(Rank::OneForm, g.geom_at(i, j));
      double rr = g.r[g.idx(i, j)];
      x.coef[SwshEngine::idx(2, 1)] = std::pow(rr, -1.5) / rr;  // |x|_{2,S} = r^{-3/2}
      f[g.idx(i, j)] = x;
    }
  g.fields["bc"] = f;

  // R0[bc] at s = 5: flux of r^2 |u|^{1/2} bc over C_u:
  // int 2 Om r^4 |u| r^{-3} dub = |u| (r1^2 - r0^2)
  auto rep = norm_suite(g, 5.0);
  double r0 = g.r[g.idx(0, 0)], r1 = g.r[g.idx(0, g.nub() - 1)];
  double exact = std::sqrt(std::abs(g.u[0]) * (r1 * r1 - r0 * r0));
  bool found = false;
  for (const auto& v : rep.values)
    if (v.name == "R0[bc]" && v.coord == g.u[0]) {
      CHECK(v.value == doctest::Approx(exact).epsilon(1e-5));
      found = true;
    }
  CHECK(found);

  // regime consistency at s = 4 for the families shared by both tables
  auto above = norm_suite(g, 4.0 + 1e-9);
  auto below = norm_suite(g, 4.0 - 1e-9);
  for (const auto& v : above.values) {
    if (v.name != "R0[bc]" && v.name != "Rb0[rsc]") continue;
    for (const auto& w2 : below.values)
      if (w2.name == v.name && w2.coord == v.coord)
        CHECK(v.value == doctest::Approx(w2.value).epsilon(1e-6));
  }

  // zero fields: all norms zero
  NullGrid g0 = make_background_grid(spec);
  std::vector<SphereField> zf(g0.nu() * g0.nub());
  for (std::size_t i = 0; i < g0.nu(); ++i)
    for (std::size_t j = 0; j < g0.nub(); ++j)
      zf[g0.idx(i, j)] = SphereField(Rank::OneForm, g0.geom_at(i, j));
  g0.fields["bc"] = zf;
  for (const auto& v : norm_suite(g0, 5.0).values) CHECK(v.value == 0.0);

  CHECK_THROWS_AS(norm_suite(g0, 2.0), DomainError);
}

TEST_CASE("homogeneity of the norm suite") {
  GridSpec spec;
  spec.params = KerrParams(0.0, 0.0);
  spec.u0 = -40; spec.u1 = -24; spec.ub0 = 40; spec.ub1 = 72;
  spec.n_u = 5; spec.n_ub = 9; spec.L = 4;
  auto g = make_background_grid(spec);
  std::vector<SphereField> f(g.nu() * g.nub());
  std::mt19937_64 rng(4);
  for (std::size_t i = 0; i < g.nu(); ++i)
    for (std::size_t j = 0; j < g.nub(); ++j) {
      auto geom = g.geom_at(i, j);
      f[g.idx(i, j)] = random_field(Rank::OneForm, geom, rng);
    }
  g.fields["bc"] = f;
  auto r1 = norm_suite(g, 5.0);
  for (auto& x : g.fields["bc"]) x *= -3.0;
  auto r3 = norm_suite(g, 5.0);
  for (std::size_t n = 0; n < r1.values.size(); ++n)
    CHECK(r3.values[n].value ==
          doctest::Approx(3.0 * r1.values[n].value).epsilon(1e-12));
}

TEST_CASE("coefficient O norms") {
  // weight table rows
  auto w = coeff_norm_weight("O", "chih", 5.0, 1, 2);
  CHECK(w.r_pow == doctest::Approx(2.0));  // 2 + q - 2/p = 2 + 1 - 1
  CHECK(w.u_pow == doctest::Approx(1.0));
  auto wb = coeff_norm_weight("O", "chibh", 5.0, 0, 4);
  CHECK(wb.r_pow == doctest::Approx(0.5));
  CHECK(wb.u_pow == doctest::Approx(2.0));
  auto ws = coeff_norm_weight("O*", "mub", 5.0, 0, 2);
  CHECK(ws.r_pow == doctest::Approx(2.0));
  auto w0 = coeff_norm_weight("O0", "etab", 5.0, 1, 2);
  CHECK(w0.r_pow == doctest::Approx(3.0));  // (s+1)/2 + 1 - 1
  CHECK_FALSE(coeff_norm_weight("O", "nonsense", 5.0, 0, 2).defined);

  // a synthetic chih field saturating its own weight: the O_0 sup is the
  // amplitude, attained everywhere (weights cancel)
  GridSpec spec;
  spec.params = KerrParams(0.0, 0.0);
  spec.u0 = -60; spec.u1 = -40; spec.ub0 = 60; spec.ub1 = 100;
  spec.n_u = 5; spec.n_ub = 5; spec.L = 4;
  auto g = make_background_grid(spec);
  std::vector<SphereField> f(g.nu() * g.nub());
  double amp = 7.5e-4;
  for (std::size_t i = 0; i < g.nu(); ++i)
    for (std::size_t j = 0; j < g.nub(); ++j) {
      SphereField x(Rank::TwoTensor, g.geom_at(i, j));
      double rr = g.r[g.idx(i, j)], uu = std::abs(g.u[i]);
      // |X|_{2,S} = amp r^{-1} |u|^{-1}: the O_0 p=2 weight is r^{1}|u|^{1}
      x.coef[SwshEngine::idx(2, 0)] =
          amp / (std::sqrt(2.0) * rr) / (rr * uu);
      f[g.idx(i, j)] = x;
    }
  g.fields["chih"] = f;
  auto rep = norm_suite(g, 5.0);
  bool found = false;
  for (const auto& v : rep.values)
    if (v.name == "O0[chih]") {
      found = true;
      // sup over p in {2,4}: the p = 4 entry dominates a single-mode field
      CHECK(v.value >= amp * 0.99);
      CHECK(v.value <= amp * 3.0);
    }
  CHECK(found);
}

TEST_CASE("teukolsky quantities") {
  GridSpec spec;
  spec.params = KerrParams(0.0, 0.0);
  spec.u0 = -40; spec.u1 = -24; spec.ub0 = 40; spec.ub1 = 72;
  spec.n_u = 9; spec.n_ub = 9; spec.L = 5;
  auto g = make_background_grid(spec);
  std::vector<SphereField> f(g.nu() * g.nub());
  for (std::size_t i = 0; i < g.nu(); ++i)
    for (std::size_t j = 0; j < g.nub(); ++j) {
      auto geom = g.geom_at(i, j);
      double rr = g.r[g.idx(i, j)];
      SphereField x(Rank::TwoTensor, geom);
      x.coef[SwshEngine::idx(2, 0)] = std::pow(rr, -5.0);  // r^5 alpha constant
      f[g.idx(i, j)] = x;
    }
  g.fields["ac"] = f;
  auto tf = teukolsky_quantities(g, "ac", true);
  for (std::size_t i = tf.i_lo; i <= tf.i_hi; ++i)
    for (std::size_t j = tf.j_lo; j <= tf.j_hi; ++j)
      CHECK(sup_norm(tf.ring[g.idx(i, j)]) < 1e-13);

  GridSpec tiny = spec;
  tiny.n_ub = 2;
  auto g2 = make_background_grid(tiny);
  g2.fields["ac"].assign(g2.nu() * g2.nub(),
                         SphereField(Rank::TwoTensor, g2.geom_at(0, 0)));
  CHECK_THROWS_AS(teukolsky_quantities(g2, "ac", true), NumericError);
}

TEST_CASE("peeling exponents") {
  auto t8 = peeling_exponents(8.0);
  REQUIRE(t8.size() == 5);
  CHECK(t8[0].quantity == "ac");
  CHECK(t8[0].has_sup);
  CHECK(t8[0].sup_r == doctest::Approx(5.0));
  CHECK(t8[0].sup_u == doctest::Approx(0.5));
  CHECK(t8[0].l2_r == doctest::Approx(4.0));
  CHECK(t8[0].l2_u == doctest::Approx(0.5));
  CHECK_FALSE(t8[0].log_flag);

  auto t7 = peeling_exponents(7.0);
  CHECK(t7[0].log_flag);
  CHECK(t7[0].l2_r == doctest::Approx(4.0));

  auto t65 = peeling_exponents(6.5);
  CHECK(t65[0].l2_r == doctest::Approx(3.75));
  CHECK_FALSE(t65[0].log_flag);

  auto t5 = peeling_exponents(5.0);
  CHECK(t5[3].quantity == "bbc");
  CHECK(t5[3].has_sup);
  CHECK(t5[3].sup_r == doctest::Approx(2.0));
  CHECK(t5[3].sup_u == doctest::Approx(2.0));
  CHECK_FALSE(t5[0].has_l2);  // alpha has no sphere-norm row in [4,6]

  auto t35 = peeling_exponents(3.5);
  CHECK(t35[1].quantity == "bc");
  CHECK(t35[1].l2_r == doctest::Approx(0.5 * (3.5 + 2.0)));
  CHECK(t35[2].l2_u == doctest::Approx(0.5));
}
