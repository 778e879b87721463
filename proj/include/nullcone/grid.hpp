#pragma once

#include <map>

#include "nullcone/kerr.hpp"
#include "nullcone/sphere.hpp"

namespace nullcone {

// Rectangular characteristic mesh in (u, ub). Background data (area radius,
// lapse, expansion scalars) comes from the exact a = 0 double-null forms:
// r solves r_* = (ub - u)/2 and Omega^2 = (1 - 2M/r)/4.
struct NullGrid {
  KerrParams params{0.0, 0.0};
  int L = 8;
  std::vector<double> u, ub;
  std::vector<double> r, Om;  // per node, idx = i * nub + j
  std::map<std::string, std::vector<SphereField>> fields;

  std::size_t nu() const { return u.size(); }
  std::size_t nub() const { return ub.size(); }
  std::size_t idx(std::size_t i, std::size_t j) const { return i * nub() + j; }

  double trchi(std::size_t i, std::size_t j) const {
    return 4.0 * Om[idx(i, j)] / r[idx(i, j)];
  }
  double trchib(std::size_t i, std::size_t j) const {
    return -4.0 * Om[idx(i, j)] / r[idx(i, j)];
  }
  double omega_coef(std::size_t i, std::size_t j) const {
    double rr = r[idx(i, j)];
    if (params.M == 0.0) return 0.0;
    return -params.M / (2.0 * rr * rr * std::sqrt(1.0 - 2.0 * params.M / rr));
  }
  double omegab_coef(std::size_t i, std::size_t j) const {
    return -omega_coef(i, j);
  }

  GeomPtr geom_at(std::size_t i, std::size_t j) const {
    return make_geometry(L, r[idx(i, j)]);
  }
};

struct GridSpec {
  double u0 = -40.0, u1 = -10.0;
  double ub0 = 40.0, ub1 = 120.0;
  int n_u = 32, n_ub = 32;  // node counts
  int L = 8;
  KerrParams params{0.0, 0.0};

  void validate() const;
};

NullGrid make_background_grid(const GridSpec& spec);

// Area-radius transport: integrate e4(r) = 2 Omega(r)^2 along outgoing cones
// (RK4) from data on the first ingoing cone; returns the integrated radii in
// the same layout as NullGrid::r.
std::vector<double> evolve_area_radius(const GridSpec& spec);

// ---- transport integrators along a single cone (Evolution lemma checks) ----

// background along one outgoing cone: r(ub), Omega(ub) as smooth functions
struct ConeBackground {
  KerrParams params;
  double u_fixed;           // outgoing: fixed u; ingoing: fixed ub
  bool outgoing = true;
  double r_of(double coord) const;  // coord = ub (outgoing) or u (ingoing)
  double om_of(double coord) const;
};

struct TransportResult {
  std::vector<double> coord;          // ub or u nodes
  std::vector<SphereField> values;    // U or V per node
  std::vector<double> trace;          // |r^{lam1} U|_{p,S} per node
  std::vector<double> duhamel_bound;  // data + integral of |r^{lam1} F|_{p,S}
};

// nabla_4 U + lam0 trchi U = F, integrated in ub (RK4); F may be empty.
using ForcingFn = std::function<SphereField(double coord, double r)>;

TransportResult propagate_outgoing(const ConeBackground& bg, const SphereField& U0,
                                   const ForcingFn& F, double lam0, int p,
                                   const std::vector<double>& ub_nodes);
TransportResult propagate_ingoing(const ConeBackground& bg, const SphereField& V0,
                                  const ForcingFn& F, double lam0, int p,
                                  const std::vector<double>& u_nodes);

// Gronwall majorant: a(t) <= c + int k a implies a(t) <= c exp(int k);
// returns c exp(int_t0^t k) by trapezoid quadrature at the nodes.
std::vector<double> gronwall_bound(double c, const std::vector<double>& t,
                                   const std::vector<double>& k);

}  // namespace nullcone
