#include "nullcone/frame.hpp"

namespace nullcone {

namespace {

std::array<double, 4> axpy(double a, const std::array<double, 4>& x,
                           const std::array<double, 4>& y) {
  return {a * x[0] + y[0], a * x[1] + y[1], a * x[2] + y[2], a * x[3] + y[3]};
}

// multiply a field by one real slot of a scalar pair, anti-aliased
SphereField mul_scalar_slot(const SphereField& x, const SphereField& g, int slot) {
  auto eng = x.geom->fine();
  auto gx = eng->synthesize(spin_of(x.rank), [&] {
    std::vector<cplx> c(eng->ncoef(), cplx(0.0));
    for (int l = std::abs(spin_of(x.rank)); l <= x.bandlimit(); ++l)
      for (int m = -l; m <= l; ++m)
        c[SwshEngine::idx(l, m)] = x.coef[SwshEngine::idx(l, m)];
    return c;
  }());
  auto gg = eng->synthesize(0, [&] {
    std::vector<cplx> c(eng->ncoef(), cplx(0.0));
    for (int l = 0; l <= g.bandlimit(); ++l)
      for (int m = -l; m <= l; ++m)
        c[SwshEngine::idx(l, m)] = g.coef[SwshEngine::idx(l, m)];
    return c;
  }());
  for (std::size_t i = 0; i < gx.size(); ++i)
    gx[i] *= (slot == 0 ? gg[i].real() : gg[i].imag());
  auto cc = eng->analyze(spin_of(x.rank), gx);
  SphereField out(x.rank, x.geom);
  for (int l = std::abs(spin_of(x.rank)); l <= x.bandlimit(); ++l)
    for (int m = -l; m <= l; ++m)
      out.coef[SwshEngine::idx(l, m)] = cc[SwshEngine::idx(l, m)];
  return out;
}

}  // namespace

NullFrame apply_frame(const FrameTransform& T, const NullFrame& fr) {
  if (T.lam <= 0.0) throw DomainError("apply_frame: lambda must be positive");
  NullFrame out = fr;
  double f2 = sq(T.f[0]) + sq(T.f[1]);
  std::array<double, 4> fB =
      axpy(T.f[0], fr.e1, {T.f[1] * fr.e2[0], T.f[1] * fr.e2[1],
                           T.f[1] * fr.e2[2], T.f[1] * fr.e2[3]});
  // e4' = lam (e4 + f^B e_B + 1/4 |f|^2 e3)
  std::array<double, 4> e4p = axpy(0.25 * f2, fr.e3, axpy(1.0, fB, fr.e4));
  for (auto& v : e4p) v *= T.lam;
  out.e4 = e4p;
  // e3' = lam^{-1} e3
  for (int i = 0; i < 4; ++i) out.e3[i] = fr.e3[i] / T.lam;
  // e_A' = e_A + 1/2 f_A e3
  out.e1 = axpy(0.5 * T.f[0], fr.e3, fr.e1);
  out.e2 = axpy(0.5 * T.f[1], fr.e3, fr.e2);
  out.Omega = fr.Omega / T.lam;  // lambda = Omega / Omega'
  return out;
}

NullFrame apply_frame_inverse(const FrameTransform& T, const NullFrame& fr) {
  if (T.lam <= 0.0) throw DomainError("apply_frame_inverse: lambda must be positive");
  NullFrame out = fr;
  double f2 = sq(T.f[0]) + sq(T.f[1]);
  // e3 = lam e3'
  for (int i = 0; i < 4; ++i) out.e3[i] = fr.e3[i] * T.lam;
  // e_A = e_A' - lam/2 f_A e3'
  out.e1 = axpy(-0.5 * T.lam * T.f[0], fr.e3, fr.e1);
  out.e2 = axpy(-0.5 * T.lam * T.f[1], fr.e3, fr.e2);
  // e4 = lam^{-1} e4' - f^A e_A' + lam/4 |f|^2 e3'
  std::array<double, 4> acc{};
  for (int i = 0; i < 4; ++i)
    acc[i] = fr.e4[i] / T.lam - T.f[0] * fr.e1[i] - T.f[1] * fr.e2[i] +
             0.25 * T.lam * f2 * fr.e3[i];
  out.e4 = acc;
  out.Omega = fr.Omega * T.lam;
  return out;
}

CurvFields make_background_curv(const GeomPtr& geom, double rho_value) {
  CurvFields R;
  R.alpha = SphereField(Rank::TwoTensor, geom);
  R.beta = SphereField(Rank::OneForm, geom);
  R.rho_sigma = SphereField(Rank::ScalarPair, geom);
  R.betab = SphereField(Rank::OneForm, geom);
  R.alphab = SphereField(Rank::TwoTensor, geom);
  R.rho_sigma.coef[SwshEngine::idx(0, 0)] = std::sqrt(4.0 * M_PI) * rho_value;
  return R;
}

RicciTransformed transform_ricci(const FrameTransform& T, const SphereField& f_field,
                                 const RicciCoeffs& bg, double f_threshold) {
  if (sup_norm(f_field) > f_threshold)
    throw DomainError("transform_ricci: |f| above the perturbative threshold");
  double lam = T.lam;
  auto geom = f_field.geom;
  RicciTransformed out;
  auto d1f = d1(f_field);  // (div f, curl f)
  // lam^{-1} trchi' = trchi + div' f  (div' replaced by div, the difference
  // is quadratic in f and lands in the measured residual)
  out.trchi = SphereField(Rank::ScalarPair, geom);
  out.curlf = SphereField(Rank::ScalarPair, geom);
  {
    auto gdiv = d1f.grid();
    std::vector<cplx> tg(gdiv.size()), cg(gdiv.size());
    for (std::size_t i = 0; i < gdiv.size(); ++i) {
      tg[i] = lam * (bg.trchi + gdiv[i].real());
      cg[i] = gdiv[i].imag();
    }
    out.trchi = SphereField::from_grid(Rank::ScalarPair, geom, tg);
    out.curlf = SphereField::from_grid(Rank::ScalarPair, geom, cg);
  }
  // lam chib' = chib, exactly
  out.trchib = SphereField(Rank::ScalarPair, geom);
  out.trchib.coef[SwshEngine::idx(0, 0)] =
      std::sqrt(4.0 * M_PI) * bg.trchib / lam;
  out.chibhat = SphereField(Rank::TwoTensor, geom);  // zero on the background
  // eta' = eta + 1/2 lam nab3' f: f is static along the cones here
  out.eta = SphereField(Rank::OneForm, geom);
  // etab' = etab + 1/4 trchib f
  out.etab = 0.25 * bg.trchib * f_field;
  // lam^{-2} xi' = xi + 1/2 nab4' f + 1/4 trchi f
  out.xi = (0.25 * bg.trchi * sq(lam)) * f_field;
  // lam^{-1} om' = om
  out.omega = SphereField(Rank::ScalarPair, geom);
  out.omega.coef[SwshEngine::idx(0, 0)] = std::sqrt(4.0 * M_PI) * bg.omega * lam;
  return out;
}

CurvFields transform_curvature(const FrameTransform& T, const SphereField& f_field,
                               const CurvFields& R, double f_threshold) {
  if (sup_norm(f_field) > f_threshold)
    throw DomainError("transform_curvature: |f| above the perturbative threshold");
  double lam = T.lam;
  CurvFields out;
  auto fstar = hodge_dual(f_field);
  // alpha' = lam^2 [alpha + (f oh beta - *f oh *beta)
  //                 + (f oh f - 1/2 *f oh *f) rho + 3/2 (f oh *f) sigma]
  {
    auto term = R.alpha;
    term += otimes_hat(f_field, R.beta) -
            otimes_hat(fstar, hodge_dual(R.beta));
    auto ff = otimes_hat(f_field, f_field) -
              0.5 * otimes_hat(fstar, fstar);
    term += mul_scalar_slot(ff, R.rho_sigma, 0);
    term += 1.5 * mul_scalar_slot(otimes_hat(f_field, fstar), R.rho_sigma, 1);
    out.alpha = sq(lam) * term;
  }
  // beta' = lam [beta + 3/2 (rho f + sigma *f)]
  out.beta = lam * (R.beta + 1.5 * mul_scalar_slot(f_field, R.rho_sigma, 0) +
                    1.5 * mul_scalar_slot(fstar, R.rho_sigma, 1));
  // (rho', sigma') = (rho - f.betab, sigma - f.(*betab)) = g - f.betab as a pair
  out.rho_sigma = R.rho_sigma - dot11(f_field, R.betab);
  // betab' = lam^{-1} [betab - 1/2 alphab . f]
  out.betab = (1.0 / lam) * (R.betab - 0.5 * dot12(f_field, R.alphab));
  // alphab' = lam^{-2} alphab, exactly
  out.alphab = (1.0 / sq(lam)) * R.alphab;
  return out;
}

namespace {

// transformed frame as coordinate vector fields over Schwarzschild
struct PrimedFrameField {
  KerrParams p;
  double lam;
  FFieldFn f;

  NullFrame eval(const std::array<double, 4>& x) const {
    double r = x[1], th = x[2];
    double Om = dn_omega(p, r);
    NullFrame base{};
    base.Omega = Om;
    base.e4 = {1.0 / (2.0 * Om), 2.0 * Om, 0.0, 0.0};
    base.e3 = {1.0 / (2.0 * Om), -2.0 * Om, 0.0, 0.0};
    base.e1 = {0.0, 0.0, 1.0 / r, 0.0};
    base.e2 = {0.0, 0.0, 0.0, 1.0 / (r * std::sin(th))};
    return apply_frame(FrameTransform(lam, f(th, x[3])), base);
  }
};

}  // namespace

CurvatureComps direct_curvature_primed(const KerrParams& p, double r,
                                       double theta, double phi, double lam,
                                       const FFieldFn& f) {
  std::array<double, 4> x{0.0, r, theta, phi};
  PrimedFrameField F{p, lam, f};
  auto fr = F.eval(x);
  auto R = riemann_fd(bl_metric_fn(p), x);
  CurvatureComps cc;
  std::array<std::array<double, 4>, 2> eA{fr.e1, fr.e2};
  double a11 = riemann_contract(R, fr.e1, fr.e4, fr.e1, fr.e4);
  double a12 = riemann_contract(R, fr.e1, fr.e4, fr.e2, fr.e4);
  double a22 = riemann_contract(R, fr.e2, fr.e4, fr.e2, fr.e4);
  double ab11 = riemann_contract(R, fr.e1, fr.e3, fr.e1, fr.e3);
  double ab12 = riemann_contract(R, fr.e1, fr.e3, fr.e2, fr.e3);
  double ab22 = riemann_contract(R, fr.e2, fr.e3, fr.e2, fr.e3);
  cc.alpha = {0.5 * (a11 - a22), a12};
  cc.alphab = {0.5 * (ab11 - ab22), ab12};
  for (int A = 0; A < 2; ++A) {
    cc.beta[A] = 0.5 * riemann_contract(R, eA[A], fr.e4, fr.e3, fr.e4);
    cc.betab[A] = 0.5 * riemann_contract(R, eA[A], fr.e3, fr.e3, fr.e4);
  }
  cc.rho = 0.25 * riemann_contract(R, fr.e3, fr.e4, fr.e3, fr.e4);
  cc.sigma = 0.5 * riemann_contract(R, fr.e1, fr.e2, fr.e3, fr.e4);
  return cc;
}

double direct_trchi_primed(const KerrParams& p, double r, double theta,
                           double phi, double lam, const FFieldFn& f) {
  std::array<double, 4> x{0.0, r, theta, phi};
  PrimedFrameField F{p, lam, f};
  auto gfn = bl_metric_fn(p);
  Metric4 g = gfn(x);
  auto Gamma = christoffel_fd(gfn, x);
  auto fr = F.eval(x);
  std::array<std::array<double, 4>, 2> eA{fr.e1, fr.e2};

  double tr = 0.0;
  for (int A = 0; A < 2; ++A) {
    // D_{e_A'} e4' with partial derivatives of the primed-frame components
    std::array<std::array<double, 4>, 4> dV{};
    for (int mu = 1; mu <= 3; ++mu) {
      double h = 1e-6 * (mu == 1 ? std::max(r, 1.0) : 1.0);
      auto xp = x, xm = x;
      xp[mu] += h;
      xm[mu] -= h;
      auto vp = F.eval(xp).e4, vm = F.eval(xm).e4;
      auto xp2 = x, xm2 = x;
      xp2[mu] += 0.5 * h;
      xm2[mu] -= 0.5 * h;
      auto vp2 = F.eval(xp2).e4, vm2 = F.eval(xm2).e4;
      for (int nu = 0; nu < 4; ++nu) {
        double coarse = (vp[nu] - vm[nu]) / (2.0 * h);
        double fine = (vp2[nu] - vm2[nu]) / h;
        dV[mu][nu] = (4.0 * fine - coarse) / 3.0;
      }
    }
    std::array<double, 4> D{};
    for (int nu = 0; nu < 4; ++nu) {
      double acc = 0.0;
      for (int mu = 0; mu < 4; ++mu) {
        acc += eA[A][mu] * dV[mu][nu];
        for (int rho = 0; rho < 4; ++rho)
          acc += eA[A][mu] * Gamma[nu][mu][rho] * fr.e4[rho];
      }
      D[nu] = acc;
    }
    double chi = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) chi += g[i][j] * D[i] * eA[A][j];
    tr += chi;
  }
  return tr;
}

}  // namespace nullcone
