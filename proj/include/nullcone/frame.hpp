#pragma once

#include "nullcone/kerr.hpp"
#include "nullcone/sphere.hpp"

namespace nullcone {

// Null-frame transformation with fixed ingoing generator: lambda > 0 and a
// 1-form f (dyad components). The underline-f of the general transformation
// is zero throughout.
struct FrameTransform {
  double lam = 1.0;
  std::array<double, 2> f{0.0, 0.0};

  FrameTransform() = default;
  FrameTransform(double l, std::array<double, 2> ff) : lam(l), f(ff) {
    if (lam <= 0.0) throw DomainError("FrameTransform: lambda must be positive");
  }
};

// pointwise frame maps
NullFrame apply_frame(const FrameTransform& T, const NullFrame& fr);
NullFrame apply_frame_inverse(const FrameTransform& T, const NullFrame& fr);

// Curvature components as sphere fields (alpha, alphab rank 2; beta, betab
// rank 1; rho + i sigma as the scalar pair).
struct CurvFields {
  SphereField alpha, beta, rho_sigma, betab, alphab;
};

CurvFields make_background_curv(const GeomPtr& geom, double rho_value);

// Transformed Ricci coefficients on a spherically symmetric background
// (leading displayed terms; lambda constant, f a sphere field).
struct RicciTransformed {
  SphereField trchi;    // scalar pair, first slot
  SphereField curlf;    // scalar pair, first slot carries curl' f
  SphereField trchib;   // exact law
  SphereField chibhat;  // exact law
  SphereField eta, etab, xi;
  SphereField omega;    // leading form
};

RicciTransformed transform_ricci(const FrameTransform& T, const SphereField& f_field,
                                 const RicciCoeffs& bg, double f_threshold = 0.1);

CurvFields transform_curvature(const FrameTransform& T, const SphereField& f_field,
                               const CurvFields& R, double f_threshold = 0.1);

// Direct recomputation oracles on Schwarzschild: contract the FD Riemann
// tensor with the transformed frame at a point, or recompute tr chi' from
// covariant derivatives of the transformed frame fields (lambda constant,
// f given by dyad-component functions of (theta, phi)).
using FFieldFn = std::function<std::array<double, 2>(double, double)>;

CurvatureComps direct_curvature_primed(const KerrParams& p, double r,
                                       double theta, double phi, double lam,
                                       const FFieldFn& f);
double direct_trchi_primed(const KerrParams& p, double r, double theta,
                           double phi, double lam, const FFieldFn& f);

}  // namespace nullcone
