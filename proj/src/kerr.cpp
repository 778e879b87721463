#include "nullcone/kerr.hpp"

namespace nullcone {

namespace {

// Relative steps for the two finite-difference layers. The Richardson step
// makes the truncation error ~h^4, so the steps sit near the roundoff
// crossover of the double-precision metric values.
constexpr double kStep1 = 2e-4;  // metric -> Christoffel
constexpr double kStep2 = 2e-3;  // Christoffel -> Riemann

double coord_scale(const std::array<double, 4>& x, int mu) {
  // t and r carry the length scale r; angles are O(1)
  return (mu <= 1) ? std::max(std::abs(x[1]), 1.0) : 1.0;
}

}  // namespace

double horizon_radius(const KerrParams& p) { return p.r_plus(); }

Metric4 bl_metric(const KerrParams& p, double r, double theta) {
  if (r <= p.r_plus())
    throw DomainError("bl_metric: r <= r_plus (outside the exterior chart)");
  if (theta <= 0.0 || theta >= M_PI)
    throw DomainError("bl_metric: coordinate singularity at theta = 0, pi");
  double Sig = p.sigma_bl(r, theta);
  double R2 = p.rsq_bl(r, theta);
  double s2 = sq(std::sin(theta));
  Metric4 g{};
  g[0][0] = -(1.0 - 2.0 * p.M * r / Sig);
  g[1][1] = Sig / p.delta(r);
  g[2][2] = Sig;
  g[3][3] = R2 * s2;
  g[0][3] = g[3][0] = -2.0 * p.M * p.a * r * s2 / Sig;
  return g;
}

Metric4 invert4(const Metric4& g) {
  // Gaussian elimination with partial pivoting on [g | I]
  double a[4][8];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      a[i][j] = g[i][j];
      a[i][j + 4] = (i == j) ? 1.0 : 0.0;
    }
  for (int c = 0; c < 4; ++c) {
    int piv = c;
    for (int rw = c + 1; rw < 4; ++rw)
      if (std::abs(a[rw][c]) > std::abs(a[piv][c])) piv = rw;
    if (a[piv][c] == 0.0) throw NumericError("invert4: singular metric");
    if (piv != c)
      for (int j = 0; j < 8; ++j) std::swap(a[c][j], a[piv][j]);
    double d = a[c][c];
    for (int j = 0; j < 8; ++j) a[c][j] /= d;
    for (int rw = 0; rw < 4; ++rw) {
      if (rw == c) continue;
      double f = a[rw][c];
      for (int j = 0; j < 8; ++j) a[rw][j] -= f * a[c][j];
    }
  }
  Metric4 inv{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) inv[i][j] = a[i][j + 4];
  return inv;
}

TortoiseCoords tortoise_coords(const KerrParams& p, double r, double theta) {
  if (r <= p.r_plus()) throw DomainError("tortoise_coords: r <= r_plus");
  double rs;
  if (p.M == 0.0) {
    rs = r;
  } else if (p.a == 0.0) {
    rs = r + 2.0 * p.M * std::log(r / (2.0 * p.M) - 1.0);
  } else {
    // dr*/dr = (r^2+a^2)/Delta integrated in closed form via the roots of Delta
    double rp = p.r_plus();
    double rm = p.M - std::sqrt(p.M * p.M - p.a * p.a);
    rs = r +
         (2.0 * p.M * rp) / (rp - rm) * std::log((r - rp) / (2.0 * p.M)) -
         (2.0 * p.M * rm) / (rp - rm) * std::log((r - rm) / (2.0 * p.M));
  }
  return {rs, theta};
}

double r_from_rstar(const KerrParams& p, double r_star) {
  if (p.a != 0.0)
    throw DomainError("r_from_rstar: closed-form inversion requires a = 0");
  if (p.M == 0.0) return r_star;
  // Newton on the monotone map r -> r*(r), seeded outside the horizon
  double r = std::max(2.0 * p.M + 1e-6 * p.M, r_star);
  for (int it = 0; it < 200; ++it) {
    double f = r + 2.0 * p.M * std::log(r / (2.0 * p.M) - 1.0) - r_star;
    double df = r / (r - 2.0 * p.M);
    double dr = f / df;
    // keep iterates outside the horizon
    double rn = r - dr;
    if (rn <= 2.0 * p.M) rn = 0.5 * (r + 2.0 * p.M);
    if (std::abs(rn - r) < 1e-14 * std::max(1.0, r)) return rn;
    r = rn;
  }
  throw NumericError("r_from_rstar: Newton iteration did not converge");
}

double dn_omega(const KerrParams& p, double r) {
  if (p.a != 0.0) throw DomainError("dn_omega: a = 0 only");
  if (r <= 2.0 * p.M) throw DomainError("dn_omega: point inside the horizon");
  return 0.5 * std::sqrt(1.0 - 2.0 * p.M / r);
}

NullFrame double_null_frame(const KerrParams& p, double u, double ub,
                            double theta, double phi) {
  (void)phi;
  if (p.a != 0.0) throw DomainError("double_null_frame: a = 0 only");
  double r_star = 0.5 * (ub - u);
  double r = r_from_rstar(p, r_star);
  double Om = dn_omega(p, r);
  NullFrame fr{};
  fr.Omega = Om;
  fr.e4 = {1.0 / (2.0 * Om), 2.0 * Om, 0.0, 0.0};
  fr.e3 = {1.0 / (2.0 * Om), -2.0 * Om, 0.0, 0.0};
  fr.e1 = {0.0, 0.0, 1.0 / r, 0.0};
  fr.e2 = {0.0, 0.0, 0.0, 1.0 / (r * std::sin(theta))};
  return fr;
}

MetricFn bl_metric_fn(const KerrParams& p) {
  return [p](const std::array<double, 4>& x) {
    if (p.M == 0.0 && p.a == 0.0) {
      // Minkowski in spherical coordinates (bl_metric would reject M = 0)
      Metric4 g{};
      g[0][0] = -1.0;
      g[1][1] = 1.0;
      g[2][2] = sq(x[1]);
      g[3][3] = sq(x[1] * std::sin(x[2]));
      return g;
    }
    return bl_metric(p, x[1], x[2]);
  };
}

namespace {

// central difference with a single Richardson step
template <class F>
auto central_diff(const F& f, const std::array<double, 4>& x, int mu, double h)
    -> decltype(f(x)) {
  auto xp = x, xm = x;
  xp[mu] += h;
  xm[mu] -= h;
  auto d1 = f(xp);
  auto d0 = f(xm);
  // (f(x+h)-f(x-h))/(2h) at h and h/2, Richardson combined
  auto xph = x, xmh = x;
  xph[mu] += 0.5 * h;
  xmh[mu] -= 0.5 * h;
  auto e1 = f(xph);
  auto e0 = f(xmh);
  decltype(f(x)) out{};
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = 0; j < out[i].size(); ++j) {
      double coarse = (d1[i][j] - d0[i][j]) / (2.0 * h);
      double fine = (e1[i][j] - e0[i][j]) / h;
      out[i][j] = (4.0 * fine - coarse) / 3.0;
    }
  return out;
}

}  // namespace

std::array<std::array<std::array<double, 4>, 4>, 4> christoffel_fd(
    const MetricFn& g, const std::array<double, 4>& x) {
  Metric4 gx = g(x);
  Metric4 ginv = invert4(gx);
  std::array<Metric4, 4> dg{};
  for (int mu = 0; mu < 4; ++mu) {
    if (mu == 0 || mu == 3) continue;  // stationary and axisymmetric
    dg[mu] = central_diff(g, x, mu, kStep1 * coord_scale(x, mu));
  }
  std::array<std::array<std::array<double, 4>, 4>, 4> Gamma{};
  for (int nu = 0; nu < 4; ++nu)
    for (int mu = 0; mu < 4; ++mu)
      for (int rho = 0; rho < 4; ++rho) {
        double acc = 0.0;
        for (int lam = 0; lam < 4; ++lam)
          acc += ginv[nu][lam] *
                 (dg[mu][lam][rho] + dg[rho][lam][mu] - dg[lam][mu][rho]);
        Gamma[nu][mu][rho] = 0.5 * acc;
      }
  return Gamma;
}

std::array<std::array<std::array<std::array<double, 4>, 4>, 4>, 4> riemann_fd(
    const MetricFn& g, const std::array<double, 4>& x) {
  auto Gamma = christoffel_fd(g, x);
  // dGamma^s_{n r} / dx^m by central differences of the Christoffel route
  std::array<std::array<std::array<std::array<double, 4>, 4>, 4>, 4> dG{};
  for (int mu = 1; mu <= 2; ++mu) {  // only r, theta derivatives are nonzero
    double h = kStep2 * coord_scale(x, mu);
    auto xp = x, xm = x;
    xp[mu] += h;
    xm[mu] -= h;
    auto Gp = christoffel_fd(g, xp);
    auto Gm = christoffel_fd(g, xm);
    auto xp2 = x, xm2 = x;
    xp2[mu] += 0.5 * h;
    xm2[mu] -= 0.5 * h;
    auto Gp2 = christoffel_fd(g, xp2);
    auto Gm2 = christoffel_fd(g, xm2);
    for (int s = 0; s < 4; ++s)
      for (int n = 0; n < 4; ++n)
        for (int r = 0; r < 4; ++r) {
          double coarse = (Gp[s][n][r] - Gm[s][n][r]) / (2.0 * h);
          double fine = (Gp2[s][n][r] - Gm2[s][n][r]) / h;
          dG[mu][s][n][r] = (4.0 * fine - coarse) / 3.0;
        }
  }
  Metric4 gx = g(x);
  std::array<std::array<std::array<std::array<double, 4>, 4>, 4>, 4> R{};
  for (int s = 0; s < 4; ++s)
    for (int rr = 0; rr < 4; ++rr)
      for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) {
          double v = dG[mu][s][nu][rr] - dG[nu][s][mu][rr];
          for (int lam = 0; lam < 4; ++lam)
            v += Gamma[s][mu][lam] * Gamma[lam][nu][rr] -
                 Gamma[s][nu][lam] * Gamma[lam][mu][rr];
          R[s][rr][mu][nu] = v;
        }
  // lower the first index
  std::array<std::array<std::array<std::array<double, 4>, 4>, 4>, 4> Rl{};
  for (int lam = 0; lam < 4; ++lam)
    for (int rr = 0; rr < 4; ++rr)
      for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) {
          double v = 0.0;
          for (int s = 0; s < 4; ++s) v += gx[lam][s] * R[s][rr][mu][nu];
          Rl[lam][rr][mu][nu] = v;
        }
  return Rl;
}

double riemann_contract(
    const std::array<std::array<std::array<std::array<double, 4>, 4>, 4>, 4>& R,
    const std::array<double, 4>& X, const std::array<double, 4>& Y,
    const std::array<double, 4>& Z, const std::array<double, 4>& W) {
  double acc = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d)
          acc += R[a][b][c][d] * X[a] * Y[b] * Z[c] * W[d];
  return acc;
}

namespace {

struct FrameDeriv {
  // covariant directional derivatives D_X e of the frame fields, as vectors
  std::array<double, 4> d3e3, d3e4, d4e3, d4e4, d1e3, d1e4, d2e3, d2e4;
};

std::array<double, 4> frame_vec(const KerrParams& p, const std::array<double, 4>& x,
                                int which) {
  double r = x[1], th = x[2];
  double Om = dn_omega(p, r);
  switch (which) {
    case 3: return {1.0 / (2.0 * Om), -2.0 * Om, 0.0, 0.0};
    case 4: return {1.0 / (2.0 * Om), 2.0 * Om, 0.0, 0.0};
    case 1: return {0.0, 0.0, 1.0 / r, 0.0};
    default: return {0.0, 0.0, 0.0, 1.0 / (r * std::sin(th))};
  }
}

// D_X V at x for the frame field V(which), Christoffels by FD
std::array<double, 4> cov_deriv(const KerrParams& p, const MetricFn& gfn,
                                const std::array<std::array<std::array<double, 4>, 4>, 4>& Gamma,
                                const std::array<double, 4>& x,
                                const std::array<double, 4>& X, int which) {
  // partial derivatives of the frame components (r and theta only)
  std::array<std::array<double, 4>, 4> dV{};
  for (int mu = 1; mu <= 2; ++mu) {
    double h = kStep1 * coord_scale(x, mu);
    auto fp = [&](double s) {
      auto xx = x;
      xx[mu] += s;
      return frame_vec(p, xx, which);
    };
    auto vp = fp(h), vm = fp(-h), vp2 = fp(0.5 * h), vm2 = fp(-0.5 * h);
    for (int nu = 0; nu < 4; ++nu) {
      double coarse = (vp[nu] - vm[nu]) / (2.0 * h);
      double fine = (vp2[nu] - vm2[nu]) / h;
      dV[mu][nu] = (4.0 * fine - coarse) / 3.0;
    }
  }
  auto V = frame_vec(p, x, which);
  std::array<double, 4> out{};
  for (int nu = 0; nu < 4; ++nu) {
    double acc = 0.0;
    for (int mu = 0; mu < 4; ++mu) {
      acc += X[mu] * dV[mu][nu];
      for (int rho = 0; rho < 4; ++rho)
        acc += X[mu] * Gamma[nu][mu][rho] * V[rho];
    }
    out[nu] = acc;
  }
  (void)gfn;
  return out;
}

double dot(const Metric4& g, const std::array<double, 4>& X,
           const std::array<double, 4>& Y) {
  double acc = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) acc += g[i][j] * X[i] * Y[j];
  return acc;
}

}  // namespace

RicciCoeffs background_ricci(const KerrParams& p, double r, double theta,
                             double phi) {
  if (p.a != 0.0) throw DomainError("background_ricci: a = 0 only");
  std::array<double, 4> x{0.0, r, theta, phi};
  if (p.M > 0.0 && r <= 2.0 * p.M * (1.0 + 10.0 * kStep1))
    throw NumericError("background_ricci: FD stencil collides with the horizon");
  auto gfn = bl_metric_fn(p);
  Metric4 g = gfn(x);
  auto Gamma = christoffel_fd(gfn, x);

  auto e1 = frame_vec(p, x, 1), e2 = frame_vec(p, x, 2);
  auto e3 = frame_vec(p, x, 3), e4 = frame_vec(p, x, 4);
  std::array<std::array<double, 4>, 2> eA{e1, e2};

  RicciCoeffs rc;
  std::array<std::array<double, 4>, 2> DAe4, DAe3;
  for (int A = 0; A < 2; ++A) {
    DAe4[A] = cov_deriv(p, gfn, Gamma, x, eA[A], 4);
    DAe3[A] = cov_deriv(p, gfn, Gamma, x, eA[A], 3);
  }
  double chi11 = dot(g, DAe4[0], e1), chi12 = dot(g, DAe4[0], e2);
  double chi21 = dot(g, DAe4[1], e1), chi22 = dot(g, DAe4[1], e2);
  double chib11 = dot(g, DAe3[0], e1), chib12 = dot(g, DAe3[0], e2);
  double chib21 = dot(g, DAe3[1], e1), chib22 = dot(g, DAe3[1], e2);
  rc.trchi = chi11 + chi22;
  rc.trchib = chib11 + chib22;
  rc.chihat = {0.5 * (chi11 - chi22), 0.5 * (chi12 + chi21)};
  rc.chibhat = {0.5 * (chib11 - chib22), 0.5 * (chib12 + chib21)};

  auto D4e4 = cov_deriv(p, gfn, Gamma, x, e4, 4);
  auto D3e3 = cov_deriv(p, gfn, Gamma, x, e3, 3);
  auto D3e4 = cov_deriv(p, gfn, Gamma, x, e3, 4);
  auto D4e3 = cov_deriv(p, gfn, Gamma, x, e4, 3);
  rc.omega = 0.25 * dot(g, D4e4, e3);
  rc.omegab = 0.25 * dot(g, D3e3, e4);
  for (int A = 0; A < 2; ++A) {
    rc.xi[A] = 0.5 * dot(g, D4e4, eA[A]);
    rc.xib[A] = 0.5 * dot(g, D3e3, eA[A]);
    rc.eta[A] = 0.5 * dot(g, D3e4, eA[A]);
    rc.etab[A] = 0.5 * dot(g, D4e3, eA[A]);
    rc.zeta[A] = 0.5 * dot(g, DAe4[A], e3);
  }
  return rc;
}

CurvatureComps background_curvature(const KerrParams& p, double r, double theta,
                                    double phi) {
  if (p.a != 0.0) throw DomainError("background_curvature: a = 0 only");
  std::array<double, 4> x{0.0, r, theta, phi};
  auto gfn = bl_metric_fn(p);
  auto R = riemann_fd(gfn, x);
  auto e1 = frame_vec(p, x, 1), e2 = frame_vec(p, x, 2);
  auto e3 = frame_vec(p, x, 3), e4 = frame_vec(p, x, 4);
  std::array<std::array<double, 4>, 2> eA{e1, e2};
  CurvatureComps cc;
  double a11 = riemann_contract(R, e1, e4, e1, e4);
  double a12 = riemann_contract(R, e1, e4, e2, e4);
  double a22 = riemann_contract(R, e2, e4, e2, e4);
  double ab11 = riemann_contract(R, e1, e3, e1, e3);
  double ab12 = riemann_contract(R, e1, e3, e2, e3);
  double ab22 = riemann_contract(R, e2, e3, e2, e3);
  cc.alpha = {0.5 * (a11 - a22), a12};
  cc.alphab = {0.5 * (ab11 - ab22), ab12};
  for (int A = 0; A < 2; ++A) {
    cc.beta[A] = 0.5 * riemann_contract(R, eA[A], e4, e3, e4);
    cc.betab[A] = 0.5 * riemann_contract(R, eA[A], e3, e3, e4);
  }
  cc.rho = 0.25 * riemann_contract(R, e3, e4, e3, e4);
  cc.sigma = 0.5 * riemann_contract(R, e1, e2, e3, e4);
  return cc;
}

RicciCoeffs schwarzschild_ricci_closed(const KerrParams& p, double r) {
  if (p.a != 0.0)
    throw DomainError("schwarzschild_ricci_closed: a = 0 only");
  double f = 1.0 - 2.0 * p.M / r;
  double sf = std::sqrt(f);
  RicciCoeffs rc;
  rc.trchi = 2.0 * sf / r;
  rc.trchib = -2.0 * sf / r;
  rc.omega = -p.M / (2.0 * r * r * sf);
  rc.omegab = p.M / (2.0 * r * r * sf);
  return rc;
}

double schwarzschild_rho_closed(const KerrParams& p, double r) {
  return -2.0 * p.M / (r * r * r);
}

DecayReport verify_decay_class(const std::vector<DecaySample>& samples,
                               double q_power, int m_power, double M,
                               double ceiling) {
  if (samples.empty())
    throw std::invalid_argument("verify_decay_class: empty sample list");
  double rmin = samples.front().r, rmax = samples.front().r;
  for (const auto& s : samples) {
    rmin = std::min(rmin, s.r);
    rmax = std::max(rmax, s.r);
  }
  if (rmax < 10.0 * rmin)
    throw std::invalid_argument(
        "verify_decay_class: samples must cover at least one decade in r");
  double mp = std::pow(M, m_power);
  DecayReport rep;
  rep.ceiling = ceiling;
  for (const auto& s : samples)
    rep.constant =
        std::max(rep.constant, std::abs(s.value) * std::pow(s.r, q_power) / mp);
  rep.pass = rep.constant <= ceiling;
  return rep;
}

}  // namespace nullcone
