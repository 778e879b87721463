#include "nullcone/grid.hpp"

namespace nullcone {

void GridSpec::validate() const {
  if (n_u < 2 || n_ub < 2) throw ConfigError("GridSpec: need at least 2 nodes per direction");
  if (u1 <= u0 || ub1 <= ub0) throw ConfigError("GridSpec: empty coordinate ranges");
  if (ub0 - u1 <= 0.0) throw ConfigError("GridSpec: grid must stay in the exterior (ub > u)");
  if (L < 2) throw ConfigError("GridSpec: band limit too small");
  if (params.a != 0.0) throw ConfigError("GridSpec: backgrounds are a = 0 only");
  if (params.M > 0.0 && 0.5 * (ub0 - u1) < 3.0 * params.M)
    throw ConfigError("GridSpec: grid reaches too close to the horizon");
}

namespace {

double radius_at(const KerrParams& p, double u, double ub) {
  double rs = 0.5 * (ub - u);
  return p.M == 0.0 ? rs : r_from_rstar(p, rs);
}

double omega_at(const KerrParams& p, double r) {
  return p.M == 0.0 ? 0.5 : dn_omega(p, r);
}

}  // namespace

NullGrid make_background_grid(const GridSpec& spec) {
  spec.validate();
  NullGrid g;
  g.params = spec.params;
  g.L = spec.L;
  g.u.resize(spec.n_u);
  g.ub.resize(spec.n_ub);
  for (int i = 0; i < spec.n_u; ++i)
    g.u[i] = spec.u0 + (spec.u1 - spec.u0) * i / (spec.n_u - 1);
  for (int j = 0; j < spec.n_ub; ++j)
    g.ub[j] = spec.ub0 + (spec.ub1 - spec.ub0) * j / (spec.n_ub - 1);
  g.r.resize(g.nu() * g.nub());
  g.Om.resize(g.nu() * g.nub());
  for (std::size_t i = 0; i < g.nu(); ++i)
    for (std::size_t j = 0; j < g.nub(); ++j) {
      double r = radius_at(spec.params, g.u[i], g.ub[j]);
      g.r[g.idx(i, j)] = r;
      g.Om[g.idx(i, j)] = omega_at(spec.params, r);
    }
  return g;
}

std::vector<double> evolve_area_radius(const GridSpec& spec) {
  spec.validate();
  NullGrid ref = make_background_grid(spec);
  std::vector<double> out(ref.r.size());
  // e4(r) = avg(Omega trchi)/(2 Omega) r = 2 Omega and d/dub = Omega e4,
  // so dr/dub = 2 Omega^2(r).
  auto rhs = [&](double r) {
    double Om = omega_at(spec.params, r);
    return 2.0 * Om * Om;
  };
  double h = ref.ub[1] - ref.ub[0];
  for (std::size_t i = 0; i < ref.nu(); ++i) {
    double r = ref.r[ref.idx(i, 0)];  // data on the first ingoing cone
    out[ref.idx(i, 0)] = r;
    for (std::size_t j = 1; j < ref.nub(); ++j) {
      double k1 = rhs(r);
      double k2 = rhs(r + 0.5 * h * k1);
      double k3 = rhs(r + 0.5 * h * k2);
      double k4 = rhs(r + h * k3);
      double rn = r + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (rn <= r)
        throw NumericError("evolve_area_radius: r non-monotone along the cone "
                           "(step too large)");
      r = rn;
      out[ref.idx(i, j)] = r;
    }
  }
  return out;
}

double ConeBackground::r_of(double coord) const {
  return outgoing ? radius_at(params, u_fixed, coord)
                  : radius_at(params, coord, u_fixed);
}
double ConeBackground::om_of(double coord) const {
  return omega_at(params, r_of(coord));
}

namespace {

TransportResult propagate(const ConeBackground& bg, const SphereField& X0,
                          const ForcingFn& F, double lam0, int p,
                          const std::vector<double>& nodes, bool outgoing) {
  if (p != 2 && p != 4)
    throw DomainError("propagate: only p in {2,4} is supported");
  if (lam0 < 0.0)
    throw DomainError("propagate: lam0 >= 0 required by the evolution lemma");
  double lam1 = 2.0 * (lam0 - 1.0 / p);
  TransportResult res;
  res.coord = nodes;

  // d/dcoord X = Omega (-lam0 trchi X + F): trchi = +-4 Omega / r. Fields keep
  // spectral coefficients; the transport acts componentwise.
  auto deriv = [&](double c, const std::vector<cplx>& coef,
                   const SphereField& proto) {
    double r = bg.r_of(c), Om = bg.om_of(c);
    double tr = (outgoing ? 4.0 : -4.0) * Om / r;
    std::vector<cplx> d(coef.size());
    for (std::size_t n = 0; n < coef.size(); ++n)
      d[n] = -Om * lam0 * tr * coef[n];
    if (F) {
      auto f = F(c, r);
      for (std::size_t n = 0; n < coef.size(); ++n) d[n] += Om * f.coef[n];
    }
    (void)proto;
    return d;
  };

  auto axpy = [](std::vector<cplx> a, double s, const std::vector<cplx>& b) {
    for (std::size_t n = 0; n < a.size(); ++n) a[n] += s * b[n];
    return a;
  };

  SphereField X = X0;
  double duh = 0.0;
  auto push = [&](double c, const SphereField& Xc) {
    double r = bg.r_of(c);
    SphereField Y = Xc;
    Y.geom = make_geometry(Xc.bandlimit(), r);
    res.values.push_back(Y);
    res.trace.push_back(std::pow(r, lam1) * lp_norm(Y, p));
  };
  push(nodes[0], X);
  res.duhamel_bound.push_back(res.trace[0]);
  for (std::size_t j = 1; j < nodes.size(); ++j) {
    double c0 = nodes[j - 1], h = nodes[j] - nodes[j - 1];
    auto k1 = deriv(c0, X.coef, X);
    auto k2 = deriv(c0 + 0.5 * h, axpy(X.coef, 0.5 * h, k1), X);
    auto k3 = deriv(c0 + 0.5 * h, axpy(X.coef, 0.5 * h, k2), X);
    auto k4 = deriv(c0 + h, axpy(X.coef, h, k3), X);
    for (std::size_t n = 0; n < X.coef.size(); ++n)
      X.coef[n] += h / 6.0 * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
    push(nodes[j], X);
    // Duhamel majorant: trace(0) + integral of Omega |r^{lam1} F|_{p,S}
    if (F) {
      auto fmid = F(c0 + 0.5 * h, bg.r_of(c0 + 0.5 * h));
      SphereField fm = fmid;
      fm.geom = make_geometry(X.bandlimit(), bg.r_of(c0 + 0.5 * h));
      duh += h * bg.om_of(c0 + 0.5 * h) *
             std::pow(bg.r_of(c0 + 0.5 * h), lam1) * lp_norm(fm, p);
    }
    res.duhamel_bound.push_back(res.trace[0] + duh);
  }
  return res;
}

}  // namespace

TransportResult propagate_outgoing(const ConeBackground& bg, const SphereField& U0,
                                   const ForcingFn& F, double lam0, int p,
                                   const std::vector<double>& ub_nodes) {
  return propagate(bg, U0, F, lam0, p, ub_nodes, true);
}

TransportResult propagate_ingoing(const ConeBackground& bg, const SphereField& V0,
                                  const ForcingFn& F, double lam0, int p,
                                  const std::vector<double>& u_nodes) {
  return propagate(bg, V0, F, lam0, p, u_nodes, false);
}

std::vector<double> gronwall_bound(double c, const std::vector<double>& t,
                                   const std::vector<double>& k) {
  if (t.size() != k.size() || t.empty())
    throw std::invalid_argument("gronwall_bound: node mismatch");
  std::vector<double> out(t.size());
  double acc = 0.0;
  out[0] = c;
  for (std::size_t i = 1; i < t.size(); ++i) {
    acc += 0.5 * (t[i] - t[i - 1]) * (k[i] + k[i - 1]);
    out[i] = c * std::exp(acc);
  }
  return out;
}

}  // namespace nullcone
