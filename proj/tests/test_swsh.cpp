#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "nullcone/swsh.hpp"

using namespace nullcone;

namespace {

// Brute-force inner product on the collocation grid.
cplx grid_dot(const SwshEngine& eng, const std::vector<cplx>& a,
              const std::vector<cplx>& b) {
  cplx acc = 0.0;
  for (int j = 0; j < eng.ntheta(); ++j)
    for (int k = 0; k < eng.nphi(); ++k)
      acc += eng.quad_weight(j) * std::conj(a[std::size_t(j) * eng.nphi() + k]) *
             b[std::size_t(j) * eng.nphi() + k];
  return acc;
}

std::vector<cplx> harmonic_grid(const SwshEngine& eng, int spin, int l, int m) {
  std::vector<cplx> g(eng.ngrid());
  for (int j = 0; j < eng.ntheta(); ++j)
    for (int k = 0; k < eng.nphi(); ++k)
      g[std::size_t(j) * eng.nphi() + k] = eng.harmonic(spin, l, m, j, k);
  return g;
}

}  // namespace

TEST_CASE("wigner d special values") {
  // d^1_{00} = cos(theta), d^1_{10} = -sin(theta)/sqrt(2)
  double th = 0.7;
  CHECK(wigner_d(1, 0, 0, th) == doctest::Approx(std::cos(th)).epsilon(1e-13));
  CHECK(wigner_d(1, 1, 0, th) ==
        doctest::Approx(-std::sin(th) / std::sqrt(2.0)).epsilon(1e-13));
  // d^2_{2,-2} = sin^4(theta/2)... check against the closed form
  CHECK(wigner_d(2, 2, -2, th) ==
        doctest::Approx(std::pow(std::sin(th / 2), 4)).epsilon(1e-12));
}

TEST_CASE("harmonics are orthonormal on the grid") {
  auto eng = get_engine(12);
  for (int spin : {0, 1, 2, -1, -2}) {
    auto y1 = harmonic_grid(*eng, spin, std::max(2, std::abs(spin)), 1);
    auto y2 = harmonic_grid(*eng, spin, 5, -3);
    CHECK(std::abs(grid_dot(*eng, y1, y1) - 1.0) < 1e-12);
    CHECK(std::abs(grid_dot(*eng, y2, y2) - 1.0) < 1e-12);
    CHECK(std::abs(grid_dot(*eng, y1, y2)) < 1e-12);
  }
}

TEST_CASE("analyze/synthesize round trip at machine precision") {
  auto eng = get_engine(16);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  for (int spin : {0, 1, 2}) {
    std::vector<cplx> coef(eng->ncoef(), cplx(0.0));
    for (int l = std::abs(spin); l <= eng->bandlimit(); ++l)
      for (int m = -l; m <= l; ++m)
        coef[SwshEngine::idx(l, m)] = cplx(gauss(rng), gauss(rng));
    auto grid = eng->synthesize(spin, coef);
    auto back = eng->analyze(spin, grid);
    double err = 0.0;
    for (std::size_t i = 0; i < coef.size(); ++i)
      err = std::max(err, std::abs(coef[i] - back[i]));
    CHECK(err < 1e-11);
  }
}

TEST_CASE("eth ladder against finite differences in theta") {
  // eth f = -(sin^s)(d_theta + i/sin d_phi)(sin^{-s} f) applied to sYlm
  // must equal eth_coef(l,s) * (s+1)Ylm. Check pointwise via FD in theta.
  auto eng = get_engine(10);
  int l = 4, m = 2;
  for (int spin : {0, 1}) {
    double th = 1.1, ph = 0.4, h = 1e-6;
    auto val = [&](int s, int ll, int mm, double t) {
      return wigner_d(ll, mm, -s, t) *
             ((s % 2 == 0) ? 1.0 : -1.0) *
             std::sqrt((2.0 * ll + 1) / (4 * M_PI)) *
             std::exp(cplx(0, mm * ph));
    };
    cplx f0 = val(spin, l, m, th);
    cplx dfdth = (val(spin, l, m, th + h) - val(spin, l, m, th - h)) / (2 * h);
    // d_phi -> i*m
    cplx eth = -(dfdth + cplx(0, 1) * (cplx(0, double(m)) * f0) / std::sin(th) -
                 double(spin) * (std::cos(th) / std::sin(th)) * f0);
    cplx expect = SwshEngine::eth_coef(l, spin) * val(spin + 1, l, m, th);
    CHECK(std::abs(eth - expect) < 1e-6);
  }
}
