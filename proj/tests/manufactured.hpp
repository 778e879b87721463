#pragma once

#include "nullcone/energy.hpp"

// Shared manufactured-solution helper for the divergence-identity checks.
namespace mfg {

using namespace nullcone;

// Manufactured pair solution on Minkowski: smooth closed-form profiles times
// one angular mode, with h1, h2 defined so the transport system holds exactly.
struct Manufactured {
  NullGrid grid;
  PairFieldSet fs;
};

Manufactured manufacture(const BianchiPair& pair, const GridSpec& spec, int l,
                         int m) {
  Manufactured mf;
  mf.grid = make_background_grid(spec);
  auto& g = mf.grid;
  std::size_t N = g.nu() * g.nub();
  mf.fs.psi1.assign(N, SphereField());
  mf.fs.psi2.assign(N, SphereField());
  mf.fs.h1.assign(N, SphereField());
  mf.fs.h2.assign(N, SphereField());

  auto basis_of = [&](Rank rk, GeomPtr geom) {
    switch (rk) {
      case Rank::TwoTensor: return basis_twotensor(geom, l, m, false);
      case Rank::OneForm: return basis_oneform(geom, l, m, false);
      default: return basis_scalar(geom, l, m, false);
    }
  };

  // profiles c1, c2 multiply r-independent basis directions r * B(r), so the
  // exact null derivative only differentiates the scalar profile
  auto c1 = [](double u, double ub) {
    double r = 0.5 * (ub - u);
    return std::cos(0.03 * (u + ub)) * std::pow(r, -2.5);
  };
  auto c2 = [](double u, double ub) {
    double r = 0.5 * (ub - u);
    return std::sin(0.02 * (u + ub) + 0.4) * std::pow(r, -3.0);
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
      // psi = c(u, ub) * (r B): coefficient value c * r * (basis coef)
      double p1 = c1(u, ub) * r, p2 = c2(u, ub) * r;
      mf.fs.psi1[id] = p1 * B1;
      mf.fs.psi2[id] = p2 * B2;
      double d3p1 = (c1(u + h, ub) - c1(u - h, ub)) / (2.0 * h) * r / Om;
      double d4p2 = (c2(u, ub + h) - c2(u, ub - h)) / (2.0 * h) * r / Om;

      // shape 1: h1 = nab3 psi1 + a1 trchib psi1 + k dk* psi2
      //          h2 = nab4 psi2 + a2 trchi psi2 - dk psi1
      // shape 2: h1 = nab3 psi1 + a1 trchib psi1 - dk psi2
      //          h2 = nab4 psi2 + a2 trchi psi2 + k dk* psi1
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
      mf.fs.h1[id] = (d3p1 + pair.a1.value() * trchib * p1) * B1 + ang1;
      mf.fs.h2[id] = (d4p2 + pair.a2.value() * trchi * p2) * B2 + ang2;
    }
  return mf;
}


// fitted convergence order of the divergence residual across grid halvings
inline double fitted_divergence_order(const BianchiPair& pair, double p,
                                      const GridSpec& base,
                                      const std::vector<int>& nodes) {
  std::vector<double> hs, resid;
  for (int n : nodes) {
    GridSpec spec = base;
    spec.n_u = n;
    spec.n_ub = n;
    auto mf = manufacture(pair, spec, 2, 1);
    hs.push_back((base.ub1 - base.ub0) / (n - 1));
    resid.push_back(divergence_residual(mf.grid, pair, p, mf.fs).residual_linf);
  }
  return fit_loglog(hs, resid).first;
}

}  // namespace mfg
