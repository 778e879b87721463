#pragma once

#include <array>
#include <vector>

#include "nullcone/common.hpp"

namespace nullcone {

// Kerr background parameters, G = c = 1.
struct KerrParams {
  double M = 1.0;
  double a = 0.0;

  KerrParams() = default;
  // M = 0 is admitted as the flat limit used by the verification suites.
  KerrParams(double mass, double spin) : M(mass), a(spin) {
    if (M < 0.0) throw DomainError("KerrParams: M must be nonnegative");
    if (std::abs(a) > M)
      throw DomainError("KerrParams: |a| > M (naked singularity)");
  }

  double r_plus() const { return M + std::sqrt(M * M - a * a); }
  double delta(double r) const { return r * r + a * a - 2.0 * M * r; }
  double sigma_bl(double r, double theta) const {
    return r * r + a * a * sq(std::cos(theta));
  }
  double rsq_bl(double r, double theta) const {
    return r * r + a * a +
           2.0 * M * a * a * r * sq(std::sin(theta)) / sigma_bl(r, theta);
  }
};

double horizon_radius(const KerrParams& p);

using Metric4 = std::array<std::array<double, 4>, 4>;  // (t, r, theta, phi)

Metric4 bl_metric(const KerrParams& p, double r, double theta);
Metric4 invert4(const Metric4& g);

struct TortoiseCoords {
  double r_star;
  double theta_star;
};
// Integration constant convention: no additive constant beyond the
// Schwarzschild form r + 2M ln(r/2M - 1); the a != 0 branch reduces to it
// as a -> 0. theta_star is reported as theta (identified chart).
TortoiseCoords tortoise_coords(const KerrParams& p, double r, double theta);
double r_from_rstar(const KerrParams& p, double r_star);  // a = 0 only

// ---- double-null machinery, Schwarzschild (a = 0) ----

struct NullFrame {
  std::array<double, 4> e3, e4, e1, e2;  // coordinate components
  double Omega;
};

double dn_omega(const KerrParams& p, double r);  // Omega^2 = (1 - 2M/r)/4
NullFrame double_null_frame(const KerrParams& p, double u, double ub,
                            double theta, double phi);

// Ricci coefficients of the double-null frame. 1-forms carry dyad components
// (e1, e2); hatted tensors carry (11, 12) components.
struct RicciCoeffs {
  double trchi = 0, trchib = 0, omega = 0, omegab = 0;
  std::array<double, 2> chihat{}, chibhat{};
  std::array<double, 2> eta{}, etab{}, zeta{}, xi{}, xib{};
};

struct CurvatureComps {
  std::array<double, 2> alpha{}, alphab{}, beta{}, betab{};
  double rho = 0, sigma = 0;
};

// finite-difference routes (central differences, one Richardson step)
RicciCoeffs background_ricci(const KerrParams& p, double r, double theta,
                             double phi);
CurvatureComps background_curvature(const KerrParams& p, double r, double theta,
                                    double phi);

// closed forms used as oracles
RicciCoeffs schwarzschild_ricci_closed(const KerrParams& p, double r);
double schwarzschild_rho_closed(const KerrParams& p, double r);

// generic FD helpers (exposed for the frame-transformation module)
using MetricFn = std::function<Metric4(const std::array<double, 4>&)>;
std::array<std::array<std::array<double, 4>, 4>, 4> christoffel_fd(
    const MetricFn& g, const std::array<double, 4>& x);
// riemann_fd returns fully lowered R_{mu nu rho sigma}
std::array<std::array<std::array<std::array<double, 4>, 4>, 4>, 4> riemann_fd(
    const MetricFn& g, const std::array<double, 4>& x);
double riemann_contract(
    const std::array<std::array<std::array<std::array<double, 4>, 4>, 4>, 4>& R,
    const std::array<double, 4>& X, const std::array<double, 4>& Y,
    const std::array<double, 4>& Z, const std::array<double, 4>& W);
MetricFn bl_metric_fn(const KerrParams& p);

// ---- decay-class verification ----

struct DecaySample {
  double r;
  double value;
};

struct DecayReport {
  double constant = 0.0;  // sup |value| r^q / M^p
  bool pass = false;
  double ceiling = 0.0;
};

DecayReport verify_decay_class(const std::vector<DecaySample>& samples,
                               double q_power, int m_power, double M,
                               double ceiling);

}  // namespace nullcone
