#pragma once

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nullcone/swsh.hpp"

namespace nullcone {

// Tensor ranks on the sphere: a "scalar" is a pair of scalar functions,
// stored as one complex field f + i f*. One-forms are stored through their
// orthonormal-dyad components as the spin-1 function xi_1 + i xi_2, and
// symmetric traceless 2-tensors as the spin-2 function U_11 + i U_12.
enum class Rank { ScalarPair = 0, OneForm = 1, TwoTensor = 2 };

inline int spin_of(Rank r) { return int(r); }

// A sphere of area radius `radius`, optionally carrying a conformal metric
// perturbation gamma = e^{2 phi} gamma_round with phi a band-limited scalar.
// Fields keep their round-frame components; the perturbed-metric operators
// apply the exact conformal factors.
struct SphereGeometry {
  std::shared_ptr<const SwshEngine> eng;
  double radius = 1.0;
  std::vector<cplx> phi;  // spin-0 coefficients of the conformal factor; empty = round

  bool round() const { return phi.empty(); }
  // Pointwise products are evaluated on a 2L grid to avoid aliasing.
  std::shared_ptr<const SwshEngine> fine() const;
  // grids cached on first use (coarse = collocation grid, fine = 2L grid)
  mutable std::vector<double> e2phi_, em2phi_, e2f_, em2f_;
  mutable std::vector<cplx> gradphi_f_;
  mutable std::shared_ptr<const SwshEngine> fine_;
  const std::vector<double>& e2phi() const;
  const std::vector<double>& em2phi() const;
  const std::vector<double>& e2phi_fine() const;
  const std::vector<double>& em2phi_fine() const;
  const std::vector<cplx>& gradphi_fine() const;
};

using GeomPtr = std::shared_ptr<const SphereGeometry>;

GeomPtr make_geometry(int L, double radius);
GeomPtr make_geometry(int L, double radius, const std::vector<cplx>& phi_coef);

struct SphereField {
  Rank rank = Rank::ScalarPair;
  GeomPtr geom;
  std::vector<cplx> coef;

  SphereField() = default;
  SphereField(Rank rk, GeomPtr g) : rank(rk), geom(std::move(g)) {
    coef.assign(geom->eng->ncoef(), cplx(0.0));
  }
  int bandlimit() const { return geom->eng->bandlimit(); }
  double radius() const { return geom->radius; }

  std::vector<cplx> grid() const;  // synthesize components on the collocation grid
  static SphereField from_grid(Rank rk, GeomPtr g, const std::vector<cplx>& grid);

  SphereField& operator+=(const SphereField& o);
  SphereField& operator-=(const SphereField& o);
  SphereField& operator*=(double c);
  friend SphereField operator+(SphereField a, const SphereField& b) { return a += b; }
  friend SphereField operator-(SphereField a, const SphereField& b) { return a -= b; }
  friend SphereField operator*(double c, SphereField f) { return f *= c; }
};

// ---- Hodge operators (paper conventions, orientation eps_12 = +1) ----
SphereField hodge_dual(const SphereField& xi);              // ranks 1,2
SphereField d1(const SphereField& xi);                      // s1 -> s0
SphereField d2(const SphereField& U);                       // s2 -> s1
SphereField d1_star(const SphereField& f);                  // s0 -> s1
SphereField d2_star(const SphereField& xi);                 // s1 -> s2
SphereField laplacian(const SphereField& f);                // Bochner (round only)
std::vector<double> gauss_curvature(const GeomPtr& geom);   // grid values

// Pointwise products (grid space, truncated back to the band limit).
SphereField otimes_hat(const SphereField& a, const SphereField& b);  // s1 x s1 -> s2
SphereField dot11(const SphereField& a, const SphereField& b);  // s1 . s1 -> s0 (f slot), wedge in f* slot
SphereField dot12(const SphereField& xi, const SphereField& U);  // s1 . s2 -> s1
SphereField scale_grid(const SphereField& f, const std::vector<double>& factor);

// ---- Norms and averages ----
double lp_norm(const SphereField& f, int p);          // p in {2,4}
cplx s_average(const SphereField& f);                 // rank 0 only
double sup_norm(const SphereField& f);                // pointwise |.| sup over grid

// ---- Elliptic solves ----
enum class HodgeSystem { Laplacian, D1, D2 };

struct HodgeSolution {
  SphereField field;
  double residual = 0.0;  // sup norm of forward-applied minus rhs
  // |d^2 phi|_p : r^-1 |d phi|_p : r^-2 |phi - avg|_p against |f|_p, p in {2,4}
  std::vector<double> elliptic_ratios;
};

HodgeSolution solve_hodge(HodgeSystem sys, const SphereField& rhs);

// ---- Identity verification (eq-level checks of the four Hodge identities) ----
struct HodgeIdentityReport {
  double max_residual = 0.0;
  std::vector<std::string> identity;   // names, aligned with residuals
  std::vector<double> residuals;
  int trials = 0;
};

HodgeIdentityReport verify_hodge_identities(const GeomPtr& geom, int trials,
                                            std::uint64_t seed);

// ---- Poincare ----
double poincare_ratio(const SphereField& alpha);  // |r d2 a|^2_L2 / |a|^2_L2
struct PoincareReport {
  double min_ratio = 0.0;
  int trials = 0;
};
PoincareReport poincare_min(const GeomPtr& geom, int trials, std::uint64_t seed);

// Random band-limited field with unit-normal coefficients, band-limited to
// lmax (default: the engine band limit).
SphereField random_field(Rank rk, const GeomPtr& geom, std::mt19937_64& rng,
                         int lmax = -1);

// Basis fields (used by tests and manufactured solutions): unit-normalized
// electric/magnetic vector and tensor harmonics and the scalar harmonic.
SphereField basis_scalar(const GeomPtr& geom, int l, int m, bool star_slot = false);
SphereField basis_oneform(const GeomPtr& geom, int l, int m, bool magnetic);
SphereField basis_twotensor(const GeomPtr& geom, int l, int m, bool magnetic);

// Spectral dump rows (l, m, spin, re, im) for the CSV interface.
struct SpectralRow {
  int l, m, spin;
  double re, im;
};
std::vector<SpectralRow> spectral_rows(const SphereField& f);

}  // namespace nullcone
