#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nullcone/kerr.hpp"

using namespace nullcone;

TEST_CASE("horizon radius") {
  CHECK(horizon_radius(KerrParams(1.0, 0.0)) == doctest::Approx(2.0));
  CHECK(horizon_radius(KerrParams(1.0, 1.0)) == doctest::Approx(1.0));
  CHECK(horizon_radius(KerrParams(1.0, 0.6)) == doctest::Approx(1.8));
  CHECK_THROWS_AS(KerrParams(1.0, 1.2), DomainError);
  CHECK_THROWS_AS(KerrParams(-1.0, 0.0), DomainError);
}

TEST_CASE("Boyer-Lindquist metric") {
  KerrParams schw(1.0, 0.0);
  auto g = bl_metric(schw, 4.0, M_PI / 2);
  CHECK(g[0][0] == doctest::Approx(-0.5));
  CHECK(g[1][1] == doctest::Approx(2.0));
  CHECK(g[3][3] == doctest::Approx(16.0));
  CHECK(g[0][3] == 0.0);

  // Minkowski limit through the metric function
  auto mink = bl_metric_fn(KerrParams(0.0, 0.0))({0.0, 3.0, 1.0, 0.0});
  CHECK(mink[0][0] == doctest::Approx(-1.0));
  CHECK(mink[1][1] == doctest::Approx(1.0));
  CHECK(mink[2][2] == doctest::Approx(9.0));

  // inverse oracle: direct 4x4 inversion, g g^{-1} = id to 1e-12
  KerrParams kerr(1.0, 0.5);
  auto gk = bl_metric(kerr, 10.0, 1.0);
  auto gi = invert4(gk);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += gk[i][k] * gi[k][j];
      CHECK(std::abs(acc - (i == j ? 1.0 : 0.0)) < 1e-12);
    }

  CHECK_THROWS_AS(bl_metric(kerr, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(bl_metric(kerr, 10.0, 0.0), DomainError);
}

TEST_CASE("tortoise coordinate") {
  KerrParams schw(1.0, 0.0);
  CHECK(tortoise_coords(schw, 4.0, 1.0).r_star == doctest::Approx(4.0));
  CHECK(tortoise_coords(KerrParams(0.0, 0.0), 7.0, 1.0).r_star ==
        doctest::Approx(7.0));

  // FD oracle on the module output: dr*/dr = (r^2+a^2)/Delta to 1e-6
  KerrParams kerr(1.0, 0.3);
  double r = 50.0, h = 1e-3;
  double d = (tortoise_coords(kerr, r + h, M_PI / 2).r_star -
              tortoise_coords(kerr, r - h, M_PI / 2).r_star) /
             (2.0 * h);
  CHECK(d == doctest::Approx((r * r + 0.09) / kerr.delta(r)).epsilon(1e-6));

  // a -> 0 continuity of the closed form
  KerrParams tiny(1.0, 1e-8);
  CHECK(tortoise_coords(tiny, 25.0, 1.0).r_star ==
        doctest::Approx(tortoise_coords(schw, 25.0, 1.0).r_star).epsilon(1e-10));

  // monotone increasing in r
  double prev = tortoise_coords(kerr, 3.0, 1.0).r_star;
  for (double rr = 4.0; rr < 40.0; rr += 2.0) {
    double cur = tortoise_coords(kerr, rr, 1.0).r_star;
    CHECK(cur > prev);
    prev = cur;
  }

  // Newton inversion round trip
  for (double rr : {2.5, 4.0, 30.0, 500.0}) {
    double rs = tortoise_coords(schw, rr, 1.0).r_star;
    CHECK(r_from_rstar(schw, rs) == doctest::Approx(rr).epsilon(1e-12));
  }
}

TEST_CASE("double-null frame normalization") {
  KerrParams schw(1.0, 0.0);
  // flat limit: Omega = 1/2 everywhere
  CHECK(dn_omega(KerrParams(0.0, 0.0), 17.0) == doctest::Approx(0.5));
  // M=1, r=100: Omega = 0.5 sqrt(0.98)
  CHECK(dn_omega(schw, 100.0) == doctest::Approx(0.5 * std::sqrt(0.98)));

  for (double rr : {6.0, 30.0, 250.0}) {
    double rs = tortoise_coords(schw, rr, 1.0).r_star;
    double u = -rs, ub = rs;  // t = 0
    auto fr = double_null_frame(schw, u, ub, 1.0, 0.3);
    auto g = bl_metric(schw, rr, 1.0);
    auto dot = [&](const std::array<double, 4>& X, const std::array<double, 4>& Y) {
      double acc = 0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) acc += g[i][j] * X[i] * Y[j];
      return acc;
    };
    CHECK(std::abs(dot(fr.e3, fr.e3)) < 1e-10);
    CHECK(std::abs(dot(fr.e4, fr.e4)) < 1e-10);
    CHECK(std::abs(dot(fr.e3, fr.e4) + 2.0) < 1e-10);
    CHECK(std::abs(dot(fr.e1, fr.e1) - 1.0) < 1e-10);
    CHECK(std::abs(dot(fr.e2, fr.e2) - 1.0) < 1e-10);
    CHECK(std::abs(dot(fr.e1, fr.e2)) < 1e-10);
    CHECK(std::abs(dot(fr.e1, fr.e3)) < 1e-10);
    CHECK(std::abs(dot(fr.e2, fr.e4)) < 1e-10);
  }
  CHECK_THROWS_AS(dn_omega(schw, 1.9), DomainError);
}

TEST_CASE("background Ricci coefficients") {
  // Minkowski cone values, exact through the FD path
  KerrParams mink(0.0, 0.0);
  auto rc0 = background_ricci(mink, 7.0, 1.1, 0.4);
  CHECK(rc0.trchi == doctest::Approx(2.0 / 7.0).epsilon(1e-10));
  CHECK(rc0.trchib == doctest::Approx(-2.0 / 7.0).epsilon(1e-10));
  CHECK(std::abs(rc0.omega) < 1e-10);

  KerrParams schw(1.0, 0.0);
  for (double r : {10.0, 40.0, 300.0}) {
    auto rc = background_ricci(schw, r, 1.0, 0.2);
    auto cf = schwarzschild_ricci_closed(schw, r);
    CHECK(rc.trchi == doctest::Approx(cf.trchi).epsilon(1e-9));
    CHECK(rc.trchib == doctest::Approx(cf.trchib).epsilon(1e-9));
    CHECK(rc.omega == doctest::Approx(cf.omega).epsilon(1e-8));
    CHECK(rc.omegab == doctest::Approx(cf.omegab).epsilon(1e-8));
    // symmetry: 1-forms and hatted tensors vanish
    for (int A = 0; A < 2; ++A) {
      CHECK(std::abs(rc.eta[A]) < 1e-9);
      CHECK(std::abs(rc.etab[A]) < 1e-9);
      CHECK(std::abs(rc.zeta[A]) < 1e-9);
      CHECK(std::abs(rc.xi[A]) < 1e-9);
      CHECK(std::abs(rc.xib[A]) < 1e-9);
      CHECK(std::abs(rc.chihat[A]) < 1e-9);
      CHECK(std::abs(rc.chibhat[A]) < 1e-9);
    }
    CHECK(rc.trchi * rc.trchib < 0.0);
  }

  // omega decay class at r = 20: r^2 |omega| / M bounded
  auto rc20 = background_ricci(schw, 20.0, 1.0, 0.0);
  CHECK(400.0 * std::abs(rc20.omega) / schw.M <= 3.0);

  // FD stencil collides with the horizon
  CHECK_THROWS_AS(background_ricci(schw, 2.0000001, 1.0, 0.0), NumericError);
}

TEST_CASE("background curvature") {
  KerrParams mink(0.0, 0.0);
  auto c0 = background_curvature(mink, 9.0, 1.2, 0.1);
  CHECK(std::abs(c0.rho) < 1e-9);
  CHECK(std::abs(c0.sigma) < 1e-9);
  CHECK(std::abs(c0.alpha[0]) < 1e-9);

  KerrParams schw(1.0, 0.0);
  auto cc = background_curvature(schw, 10.0, 1.0, 0.0);
  CHECK(cc.rho == doctest::Approx(-0.002).epsilon(1e-6));
  CHECK(std::abs(cc.sigma) < 1e-8);
  CHECK(std::abs(cc.alpha[0]) < 1e-8);
  CHECK(std::abs(cc.alphab[1]) < 1e-8);
  CHECK(std::abs(cc.beta[0]) < 1e-8);
  CHECK(std::abs(cc.betab[1]) < 1e-8);
}

TEST_CASE("e4(r) from the area-radius integral formula") {
  // e4(r) = avg(Omega trchi)/(2 Omega) r; spherical symmetry makes the
  // average trivial, e4(r) = 2 Omega
  KerrParams schw(1.0, 0.0);
  for (double r : {8.0, 64.0}) {
    auto rc = background_ricci(schw, r, 1.0, 0.0);
    double Om = dn_omega(schw, r);
    CHECK(Om * rc.trchi / (2.0 * Om) * r ==
          doctest::Approx(2.0 * Om).epsilon(1e-9));
  }
}

TEST_CASE("decay class verification") {
  KerrParams schw(1.0, 0.0);
  std::vector<DecaySample> tr, rho, ones;
  for (int i = 0; i < 40; ++i) {
    double r = 10.0 * std::pow(100.0, i / 39.0);
    auto cf = schwarzschild_ricci_closed(schw, r);
    tr.push_back({r, cf.trchi - 2.0 / r});
    rho.push_back({r, schwarzschild_rho_closed(schw, r)});
    ones.push_back({r, 1.0});
  }
  auto rep = verify_decay_class(tr, 2.0, 1, schw.M, 3.0);
  CHECK(rep.pass);
  CHECK(rep.constant <= 3.0);
  auto repr = verify_decay_class(rho, 3.0, 1, schw.M, 2.1);
  CHECK(repr.pass);
  CHECK(repr.constant == doctest::Approx(2.0).epsilon(1e-2));
  // a constant field is not O_1^0
  auto repc = verify_decay_class(ones, 1.0, 0, schw.M, 50.0);
  CHECK_FALSE(repc.pass);

  CHECK_THROWS_AS(verify_decay_class({}, 1.0, 0, 1.0, 1.0),
                  std::invalid_argument);
  std::vector<DecaySample> narrow{{10.0, 1.0}, {20.0, 1.0}};
  CHECK_THROWS_AS(verify_decay_class(narrow, 1.0, 0, 1.0, 1.0),
                  std::invalid_argument);
}
