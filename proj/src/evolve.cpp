#include "nullcone/evolve.hpp"

namespace nullcone {

namespace {

// conjugation of the scalar-pair field: (C g)_{lm} = (-1)^m conj(g_{l,-m}),
// the coefficient form of pointwise complex conjugation
SphereField conj_pair(const SphereField& g) {
  SphereField out(Rank::ScalarPair, g.geom);
  for (int l = 0; l <= g.bandlimit(); ++l)
    for (int m = -l; m <= l; ++m) {
      double sgn = (m % 2 == 0) ? 1.0 : -1.0;
      out.coef[SwshEngine::idx(l, m)] =
          sgn * std::conj(g.coef[SwshEngine::idx(l, -m)]);
    }
  return out;
}

struct Level {
  std::vector<SphereField> ac, bc, rsc, bbc, aac;  // per u node
};

struct Background {
  double r, Om, trchi, trchib, om, omb;
};

Background bg_at(const KerrParams& p, double u, double ub) {
  Background b;
  double rs = 0.5 * (ub - u);
  b.r = p.M == 0.0 ? rs : r_from_rstar(p, rs);
  b.Om = p.M == 0.0 ? 0.5 : dn_omega(p, b.r);
  b.trchi = 4.0 * b.Om / b.r;
  b.trchib = -b.trchi;
  b.om = p.M == 0.0
             ? 0.0
             : -p.M / (2.0 * b.r * b.r * std::sqrt(1.0 - 2.0 * p.M / b.r));
  b.omb = -b.om;
  return b;
}

// nabla_4 right-hand sides of the marched fields (beta, rho/sigma, betab,
// alphab) at one node; alpha enters through d2
struct UbRhs {
  SphereField bc, rsc, bbc, aac;
};

UbRhs rhs_ub(const Background& b, const SphereField& ac, const SphereField& bc,
             const SphereField& rsc, const SphereField& bbc,
             const SphereField& aac) {
  UbRhs d;
  d.bc = b.Om * ((-2.0 * b.trchi - 2.0 * b.om) * bc + d2(ac));
  d.rsc = b.Om * ((-1.5 * b.trchi) * rsc + conj_pair(d1(bc)));
  d.bbc = b.Om * ((-b.trchi + 2.0 * b.om) * bbc + d1_star(rsc));
  // -nabhat(betab) = +2 d2*(betab)
  d.aac = b.Om * ((-0.5 * b.trchi + 4.0 * b.om) * aac + 2.0 * d2_star(bbc));
  return d;
}

// nabla_3 right-hand side of alpha: nab3 ac + 1/2 trchib ac = nabhat(bc) + 4 omb ac
SphereField rhs_u_ac(const Background& b, const SphereField& ac,
                     const SphereField& bc) {
  return b.Om * ((-0.5 * b.trchib + 4.0 * b.omb) * ac + (-2.0) * d2_star(bc));
}

void set_radius(SphereField& f, int L, double r) {
  f.geom = make_geometry(L, r);
}

}  // namespace

BianchiData make_profile_data(const GridSpec& spec, double s, int l, int m,
                              const std::string& profile, double amplitude) {
  NullGrid ref = make_background_grid(spec);
  BianchiData data;
  if (profile != "family" && profile != "power" && profile != "moment" &&
      profile != "radiative")
    throw ConfigError("make_profile_data: unknown profile " + profile);
  // "moment": zero radiative data, one betab corner moment
  // "radiative": family rates with charge-free corners, so no static
  // multipole moment survives on late cones
  bool moment = profile == "moment";
  bool chargefree = moment || profile == "radiative";
  struct Rate {
    double a, b;
  };
  auto rate_of = [&](const std::string& q) -> Rate {
    if (profile == "power") return {0.5 * s, 0.0};
    auto w = sphere_norm_weight(q, s);
    return {w.r_pow, w.u_pow};  // |X|_{2,S} ~ r^{-a} |u|^{-b}
  };
  double rref = ref.r[ref.idx(0, 0)];
  double uref = std::abs(ref.u[0]);
  auto coef_amp = [&](Rank rk, double r, double uu, Rate rt) {
    double l2 = amplitude * std::pow(r / rref, -rt.a) *
                std::pow(uu / uref, -rt.b);
    double cf = rk == Rank::TwoTensor ? std::sqrt(2.0) : 1.0;
    return l2 / (cf * r);
  };
  auto make = [&](Rank rk, double r, double uu, const std::string& q) {
    SphereField f(rk, make_geometry(spec.L, r));
    f.coef[SwshEngine::idx(l, m)] = coef_amp(rk, r, uu, rate_of(q));
    return f;
  };
  data.ac_out.resize(spec.n_ub);
  for (int j = 0; j < spec.n_ub; ++j) {
    double r = ref.r[ref.idx(0, j)];
    data.ac_out[j] = moment ? SphereField(Rank::TwoTensor, make_geometry(spec.L, r))
                            : make(Rank::TwoTensor, r, std::abs(ref.u[0]), "ac");
  }
  // alphab is free data on the ingoing cone
  data.aac_in.resize(spec.n_u);
  for (int i = 0; i < spec.n_u; ++i) {
    double r = ref.r[ref.idx(i, 0)];
    data.aac_in[i] = moment ? SphereField(Rank::TwoTensor, make_geometry(spec.L, r))
                            : make(Rank::TwoTensor, r, std::abs(ref.u[i]), "aac");
  }
  // the remaining families start from corner values and are filled along the
  // ingoing cone by their nabla_3 transport equations, which keeps the data
  // compatible with the constraint subsystem
  data.bc_in.resize(spec.n_u);
  data.rsc_in.resize(spec.n_u);
  data.bbc_in.resize(spec.n_u);
  {
    // charge-free corners: a nonzero corner value of (rho, sigma) would seed
    // a static r^{-3} multipole moment that never decays in |u|
    double r0 = ref.r[ref.idx(0, 0)];
    double uu0 = std::abs(ref.u[0]);
    auto geom0 = make_geometry(spec.L, r0);
    data.bc_in[0] = chargefree ? SphereField(Rank::OneForm, geom0)
                               : make(Rank::OneForm, r0, uu0, "bc");
    data.rsc_in[0] = chargefree ? SphereField(Rank::ScalarPair, geom0)
                                : make(Rank::ScalarPair, r0, uu0, "rsc");
    data.bbc_in[0] = (moment || !chargefree)
                         ? make(Rank::OneForm, r0, uu0, "bbc")
                         : SphereField(Rank::OneForm, geom0);
    double du = ref.u[1] - ref.u[0];
    auto rhs3 = [&](int i, const SphereField& bc, const SphereField& rsc,
                    const SphereField& bbc, const SphereField& aac) {
      auto b = bg_at(spec.params, ref.u[i], ref.ub[0]);
      struct Out {
        SphereField bc, rsc, bbc;
      } d{
          b.Om * ((-b.trchib + 2.0 * b.omb) * bc +
                  (-1.0) * d1_star(conj_pair(rsc))),
          b.Om * ((-1.5 * b.trchib) * rsc + (-1.0) * d1(bbc)),
          b.Om * ((-2.0 * b.trchib - 2.0 * b.omb) * bbc + (-1.0) * d2(aac)),
      };
      return d;
    };
    for (int i = 1; i < spec.n_u; ++i) {
      double r1 = ref.r[ref.idx(i, 0)];
      auto k1 = rhs3(i - 1, data.bc_in[i - 1], data.rsc_in[i - 1],
                     data.bbc_in[i - 1], data.aac_in[i - 1]);
      SphereField pb = data.bc_in[i - 1] + du * k1.bc;
      SphereField pr = data.rsc_in[i - 1] + du * k1.rsc;
      SphereField pbb = data.bbc_in[i - 1] + du * k1.bbc;
      pb.geom = pr.geom = pbb.geom = make_geometry(spec.L, r1);
      auto k2 = rhs3(i, pb, pr, pbb, data.aac_in[i]);
      data.bc_in[i] = data.bc_in[i - 1] + (0.5 * du) * k1.bc + (0.5 * du) * k2.bc;
      data.rsc_in[i] =
          data.rsc_in[i - 1] + (0.5 * du) * k1.rsc + (0.5 * du) * k2.rsc;
      data.bbc_in[i] =
          data.bbc_in[i - 1] + (0.5 * du) * k1.bbc + (0.5 * du) * k2.bbc;
      data.bc_in[i].geom = data.rsc_in[i].geom = data.bbc_in[i].geom =
          make_geometry(spec.L, r1);
    }
  }
  return data;
}

EvolveResult evolve_linear_bianchi(const GridSpec& spec, const BianchiData& data,
                                   double s, const EvolveOptions& opt) {
  spec.validate();
  NullGrid g = make_background_grid(spec);
  std::size_t nu = g.nu(), nub = g.nub();
  double dub = g.ub[1] - g.ub[0];
  double du = g.u[1] - g.u[0];
  double rmin = *std::min_element(g.r.begin(), g.r.end());
  if (dub > opt.cfl_guard * rmin / (spec.L + 1))
    throw NumericError("evolve_linear_bianchi: angular stability guard violated "
                       "(reduce the ub step or the band limit)");

  if (data.ac_out.size() != nub || data.bc_in.size() != nu)
    throw std::invalid_argument("evolve_linear_bianchi: data size mismatch");

  for (const char* key : {"ac", "bc", "rsc", "bbc", "aac"})
    g.fields[key].assign(nu * nub, SphereField());

  auto bgb = [&](std::size_t i, std::size_t j) {
    return bg_at(spec.params, g.u[i], g.ub[j]);
  };

  // level j = 0 from the data cones; alpha marched across u
  Level cur;
  cur.bc = data.bc_in;
  cur.rsc = data.rsc_in;
  cur.bbc = data.bbc_in;
  cur.aac = data.aac_in;
  cur.ac.assign(nu, SphereField());
  cur.ac[0] = data.ac_out[0];
  auto march_ac = [&](Level& lv, std::size_t j) {
    lv.ac[0] = data.ac_out[j];
    for (std::size_t i = 1; i < nu; ++i) {
      auto b0 = bgb(i - 1, j), b1 = bgb(i, j);
      auto k1 = rhs_u_ac(b0, lv.ac[i - 1], lv.bc[i - 1]);
      SphereField pred = lv.ac[i - 1] + du * k1;
      set_radius(pred, spec.L, b1.r);
      auto k2 = rhs_u_ac(b1, pred, lv.bc[i]);
      lv.ac[i] = lv.ac[i - 1] + (0.5 * du) * k1 + (0.5 * du) * k2;
      set_radius(lv.ac[i], spec.L, b1.r);
    }
  };
  march_ac(cur, 0);

  auto store = [&](const Level& lv, std::size_t j) {
    for (std::size_t i = 0; i < nu; ++i) {
      std::size_t id = g.idx(i, j);
      g.fields["ac"][id] = lv.ac[i];
      g.fields["bc"][id] = lv.bc[i];
      g.fields["rsc"][id] = lv.rsc[i];
      g.fields["bbc"][id] = lv.bbc[i];
      g.fields["aac"][id] = lv.aac[i];
    }
  };
  store(cur, 0);

  for (std::size_t j = 1; j < nub; ++j) {
    Level nxt;
    nxt.ac.assign(nu, SphereField());
    nxt.bc.assign(nu, SphereField());
    nxt.rsc.assign(nu, SphereField());
    nxt.bbc.assign(nu, SphereField());
    nxt.aac.assign(nu, SphereField());
    // predictor (Euler) for the ub-marched fields
    Level star = nxt;
    for (std::size_t i = 0; i < nu; ++i) {
      auto b0 = bgb(i, j - 1), b1 = bgb(i, j);
      auto k1 = rhs_ub(b0, cur.ac[i], cur.bc[i], cur.rsc[i], cur.bbc[i],
                       cur.aac[i]);
      star.bc[i] = cur.bc[i] + dub * k1.bc;
      star.rsc[i] = cur.rsc[i] + dub * k1.rsc;
      star.bbc[i] = cur.bbc[i] + dub * k1.bbc;
      star.aac[i] = cur.aac[i] + dub * k1.aac;
      set_radius(star.bc[i], spec.L, b1.r);
      set_radius(star.rsc[i], spec.L, b1.r);
      set_radius(star.bbc[i], spec.L, b1.r);
      set_radius(star.aac[i], spec.L, b1.r);
    }
    march_ac(star, j);
    // corrector (trapezoid)
    for (std::size_t i = 0; i < nu; ++i) {
      auto b0 = bgb(i, j - 1), b1 = bgb(i, j);
      auto k1 = rhs_ub(b0, cur.ac[i], cur.bc[i], cur.rsc[i], cur.bbc[i],
                       cur.aac[i]);
      auto k2 = rhs_ub(b1, star.ac[i], star.bc[i], star.rsc[i], star.bbc[i],
                       star.aac[i]);
      nxt.bc[i] = cur.bc[i] + (0.5 * dub) * k1.bc + (0.5 * dub) * k2.bc;
      nxt.rsc[i] = cur.rsc[i] + (0.5 * dub) * k1.rsc + (0.5 * dub) * k2.rsc;
      nxt.bbc[i] = cur.bbc[i] + (0.5 * dub) * k1.bbc + (0.5 * dub) * k2.bbc;
      nxt.aac[i] = cur.aac[i] + (0.5 * dub) * k1.aac + (0.5 * dub) * k2.aac;
      set_radius(nxt.bc[i], spec.L, b1.r);
      set_radius(nxt.rsc[i], spec.L, b1.r);
      set_radius(nxt.bbc[i], spec.L, b1.r);
      set_radius(nxt.aac[i], spec.L, b1.r);
    }
    march_ac(nxt, j);
    if (opt.check_nan) {
      for (std::size_t i = 0; i < nu; ++i)
        for (const auto* f : {&nxt.ac[i], &nxt.bc[i], &nxt.aac[i]})
          for (auto& c : f->coef)
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
              throw NumericError("evolve_linear_bianchi: divergence (NaN) at "
                                 "ub level " + std::to_string(j));
    }
    store(nxt, j);
    cur = std::move(nxt);
  }

  EvolveResult res;
  res.norms = norm_suite(g, s);

  // constraint residuals: the unused nabla_3 equations, checked by central
  // differences in u at a sample of interior nodes
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < nu; i += std::max<std::size_t>(1, nu / 8)) {
    for (std::size_t j = 1; j + 1 < nub; j += std::max<std::size_t>(1, nub / 8)) {
      auto b = bgb(i, j);
      double h = g.u[i + 1] - g.u[i - 1];
      auto d3 = [&](const std::vector<SphereField>& f) {
        SphereField d(f[g.idx(i, j)].rank, f[g.idx(i, j)].geom);
        for (std::size_t n = 0; n < d.coef.size(); ++n)
          d.coef[n] = (f[g.idx(i + 1, j)].coef[n] - f[g.idx(i - 1, j)].coef[n]) /
                      (b.Om * h);
        return d;
      };
      const auto& bc = g.fields["bc"][g.idx(i, j)];
      const auto& rsc = g.fields["rsc"][g.idx(i, j)];
      const auto& bbc = g.fields["bbc"][g.idx(i, j)];
      const auto& aac = g.fields["aac"][g.idx(i, j)];
      // nab3 bc + trchib bc = nab rho + *nab sigma + 2 omb bc
      auto c1 = d3(g.fields["bc"]) + (b.trchib - 2.0 * b.omb) * bc -
                (-1.0) * d1_star(conj_pair(rsc));
      // nab3 (rho, sigma) + 3/2 trchib = -d1 betab
      auto c2 = d3(g.fields["rsc"]) + (1.5 * b.trchib) * rsc + d1(bbc);
      // nab3 betab + 2 trchib betab = -div aac - 2 omb betab
      auto c3 = d3(g.fields["bbc"]) + (2.0 * b.trchib + 2.0 * b.omb) * bbc +
                d2(aac);
      worst = std::max({worst, sup_norm(c1), sup_norm(c2), sup_norm(c3)});
    }
  }
  res.constraint_residual = worst;
  res.grid = std::move(g);
  return res;
}

namespace {

// angular factors of the mode oracle, written out independently
double fac_d2(int l) { return std::sqrt(double(l + 2) * (l - 1)); }
double fac_d2star(int l) { return 0.5 * std::sqrt(double(l - 1) * (l + 2)); }
double fac_d1(int l) { return std::sqrt(double(l) * (l + 1)); }

}  // namespace

ModeOracleResult evolve_mode_oracle(const GridSpec& spec, const BianchiData& data,
                                    int l, int m) {
  spec.validate();
  NullGrid g = make_background_grid(spec);
  std::size_t nu = g.nu(), nub = g.nub();
  double dub = g.ub[1] - g.ub[0], du = g.u[1] - g.u[0];

  // one (l, +-m) block: the conjugation route couples +m and -m coefficients
  struct Slot {
    cplx p{0.0}, n{0.0};  // coefficients at +m and -m
  };
  struct State {
    Slot ac, bc, rsc, bbc, aac;
  };
  double sgn = (m % 2 == 0) ? 1.0 : -1.0;
  auto conj_slot = [&](const Slot& s) {
    // pointwise conjugation of the pair field in coefficient space
    return Slot{sgn * std::conj(s.n), sgn * std::conj(s.p)};
  };
  auto get = [&](const SphereField& f) {
    return Slot{f.coef[SwshEngine::idx(l, m)], f.coef[SwshEngine::idx(l, -m)]};
  };

  auto bgb = [&](std::size_t i, std::size_t j) {
    return bg_at(spec.params, g.u[i], g.ub[j]);
  };
  auto mulc = [](cplx a, const Slot& s) { return Slot{a * s.p, a * s.n}; };
  auto addc = [](const Slot& a, const Slot& b) {
    return Slot{a.p + b.p, a.n + b.n};
  };

  auto rhs4 = [&](const Background& b, const State& st) {
    State d{};
    d.bc = addc(mulc(b.Om * (-2.0 * b.trchi - 2.0 * b.om), st.bc),
                mulc(b.Om * fac_d2(l) / b.r, st.ac));
    d.rsc = addc(mulc(b.Om * (-1.5 * b.trchi), st.rsc),
                 mulc(b.Om, conj_slot(mulc(fac_d1(l) / b.r, st.bc))));
    d.bbc = addc(mulc(b.Om * (-b.trchi + 2.0 * b.om), st.bbc),
                 mulc(b.Om * fac_d1(l) / b.r, st.rsc));
    d.aac = addc(mulc(b.Om * (-0.5 * b.trchi + 4.0 * b.om), st.aac),
                 mulc(b.Om * 2.0 * fac_d2star(l) / b.r, st.bbc));
    return d;
  };
  auto rhs3_ac = [&](const Background& b, const Slot& ac, const Slot& bc) {
    return addc(mulc(b.Om * (-0.5 * b.trchib + 4.0 * b.omb), ac),
                mulc(-b.Om * 2.0 * fac_d2star(l) / b.r, bc));
  };

  std::vector<State> cur(nu), nxt(nu), star(nu);
  for (std::size_t i = 0; i < nu; ++i) {
    cur[i].bc = get(data.bc_in[i]);
    cur[i].rsc = get(data.rsc_in[i]);
    cur[i].bbc = get(data.bbc_in[i]);
    cur[i].aac = get(data.aac_in[i]);
  }
  auto march_ac = [&](std::vector<State>& lv, std::size_t j) {
    lv[0].ac = get(data.ac_out[j]);
    for (std::size_t i = 1; i < nu; ++i) {
      auto b0 = bgb(i - 1, j), b1 = bgb(i, j);
      auto k1 = rhs3_ac(b0, lv[i - 1].ac, lv[i - 1].bc);
      Slot pred = addc(lv[i - 1].ac, mulc(du, k1));
      auto k2 = rhs3_ac(b1, pred, lv[i].bc);
      lv[i].ac = addc(lv[i - 1].ac, addc(mulc(0.5 * du, k1), mulc(0.5 * du, k2)));
    }
  };
  march_ac(cur, 0);

  ModeOracleResult out;
  out.ac.assign(nu * nub, 0.0);
  out.bc.assign(nu * nub, 0.0);
  out.rsc.assign(nu * nub, 0.0);
  out.bbc.assign(nu * nub, 0.0);
  out.aac.assign(nu * nub, 0.0);
  auto store = [&](const std::vector<State>& lv, std::size_t j) {
    for (std::size_t i = 0; i < nu; ++i) {
      out.ac[g.idx(i, j)] = lv[i].ac.p;
      out.bc[g.idx(i, j)] = lv[i].bc.p;
      out.rsc[g.idx(i, j)] = lv[i].rsc.p;
      out.bbc[g.idx(i, j)] = lv[i].bbc.p;
      out.aac[g.idx(i, j)] = lv[i].aac.p;
    }
  };
  store(cur, 0);
  for (std::size_t j = 1; j < nub; ++j) {
    for (std::size_t i = 0; i < nu; ++i) {
      auto b0 = bgb(i, j - 1);
      auto k1 = rhs4(b0, cur[i]);
      star[i].bc = addc(cur[i].bc, mulc(dub, k1.bc));
      star[i].rsc = addc(cur[i].rsc, mulc(dub, k1.rsc));
      star[i].bbc = addc(cur[i].bbc, mulc(dub, k1.bbc));
      star[i].aac = addc(cur[i].aac, mulc(dub, k1.aac));
    }
    march_ac(star, j);
    for (std::size_t i = 0; i < nu; ++i) {
      auto b0 = bgb(i, j - 1), b1 = bgb(i, j);
      auto k1 = rhs4(b0, cur[i]);
      auto k2 = rhs4(b1, star[i]);
      nxt[i].bc = addc(cur[i].bc,
                       addc(mulc(0.5 * dub, k1.bc), mulc(0.5 * dub, k2.bc)));
      nxt[i].rsc = addc(cur[i].rsc,
                        addc(mulc(0.5 * dub, k1.rsc), mulc(0.5 * dub, k2.rsc)));
      nxt[i].bbc = addc(cur[i].bbc,
                        addc(mulc(0.5 * dub, k1.bbc), mulc(0.5 * dub, k2.bbc)));
      nxt[i].aac = addc(cur[i].aac,
                        addc(mulc(0.5 * dub, k1.aac), mulc(0.5 * dub, k2.aac)));
    }
    march_ac(nxt, j);
    store(nxt, j);
    cur = nxt;
  }
  return out;
}

SobolevReport sobolev_check(const NullGrid& g, const std::string& field,
                            std::size_t i, std::size_t j_eval) {
  const auto& fld = g.fields.at(field);
  SobolevReport rep;
  std::size_t id = g.idx(i, j_eval);
  double l4 = lp_norm(fld[id], 4);
  if (l4 == 0.0) {
    rep.pass_by_convention = true;
    return rep;
  }
  double r_eval = g.r[id];

  // cone flux pieces over [ub0, ub_eval]
  auto grad_grid = [&](const SphereField& f) {
    const auto& eng = *f.geom->eng;
    int sp = spin_of(f.rank);
    std::vector<cplx> up(eng.ncoef(), cplx(0.0)), dn(eng.ncoef(), cplx(0.0));
    for (int l = std::abs(sp); l <= eng.bandlimit(); ++l)
      for (int m = -l; m <= l; ++m) {
        up[SwshEngine::idx(l, m)] =
            SwshEngine::eth_coef(l, sp) * f.coef[SwshEngine::idx(l, m)];
        dn[SwshEngine::idx(l, m)] =
            SwshEngine::ethbar_coef(l, sp) * f.coef[SwshEngine::idx(l, m)];
      }
    auto gu = eng.synthesize(sp + 1, up);
    auto gd = eng.synthesize(sp - 1, dn);
    double c = f.rank == Rank::TwoTensor ? 2.0 : 1.0;
    std::vector<double> out(gu.size());
    for (std::size_t n = 0; n < out.size(); ++n)
      out[n] = std::sqrt(0.5 * c * (std::norm(gu[n]) + std::norm(gd[n]))) /
               f.radius();
    return out;
  };

  double flux_f = 0.0, flux_rgrad = 0.0, flux_rd4 = 0.0;
  for (std::size_t j = 1; j <= j_eval; ++j) {
    std::size_t a = g.idx(i, j - 1), b = g.idx(i, j);
    double h = g.ub[j] - g.ub[j - 1];
    auto sq2 = [&](double x) { return x * x; };
    flux_f += 0.5 * h * (2.0 * g.Om[a] * sq2(lp_norm(fld[a], 2)) +
                         2.0 * g.Om[b] * sq2(lp_norm(fld[b], 2)));
    auto ga = grad_grid(fld[a]);
    auto gb = grad_grid(fld[b]);
    auto l2grad = [&](const std::vector<double>& gg, std::size_t nid) {
      const auto& eng = *fld[nid].geom->eng;
      double acc = 0.0;
      for (int jj = 0; jj < eng.ntheta(); ++jj)
        for (int kk = 0; kk < eng.nphi(); ++kk)
          acc += eng.quad_weight(jj) * sq(g.r[nid]) *
                 sq(gg[std::size_t(jj) * eng.nphi() + kk]);
      return acc;
    };
    flux_rgrad += 0.5 * h * (2.0 * g.Om[a] * sq2(g.r[a]) * l2grad(ga, a) +
                             2.0 * g.Om[b] * sq2(g.r[b]) * l2grad(gb, b));
    if (j >= 2 && j + 1 < g.nub()) {
      // r nabla_4 F by central differences
      auto d4 = [&](std::size_t jj) {
        std::size_t nid = g.idx(i, jj);
        SphereField d(fld[nid].rank, fld[nid].geom);
        double hh = g.ub[jj + 1] - g.ub[jj - 1];
        for (std::size_t n = 0; n < d.coef.size(); ++n)
          d.coef[n] = (fld[g.idx(i, jj + 1)].coef[n] -
                       fld[g.idx(i, jj - 1)].coef[n]) /
                      (g.Om[nid] * hh);
        return d;
      };
      auto da = d4(j - 1);
      auto db = d4(j);
      flux_rd4 += 0.5 * h * (2.0 * g.Om[a] * sq2(g.r[a] * lp_norm(da, 2)) +
                             2.0 * g.Om[b] * sq2(g.r[b] * lp_norm(db, 2)));
    }
  }
  double rhs = std::sqrt(flux_f) + std::sqrt(flux_rgrad) + std::sqrt(flux_rd4);
  rep.ratio_l4 = rhs > 0.0 ? r_eval * l4 / rhs : 0.0;

  // sup_S r^{1/2} |F| <= C (int |F|^4 + |r nab F|^4)^{1/4}
  double sup = std::sqrt(r_eval) * sup_norm(fld[id]);
  auto gg = grad_grid(fld[id]);
  const auto& eng = *fld[id].geom->eng;
  double q4 = std::pow(lp_norm(fld[id], 4), 4);
  for (int jj = 0; jj < eng.ntheta(); ++jj)
    for (int kk = 0; kk < eng.nphi(); ++kk)
      q4 += eng.quad_weight(jj) * sq(r_eval) *
            std::pow(r_eval * gg[std::size_t(jj) * eng.nphi() + kk], 4);
  rep.ratio_sup = sup / std::pow(q4, 0.25);
  return rep;
}

}  // namespace nullcone
