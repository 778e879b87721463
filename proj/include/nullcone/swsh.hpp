#pragma once

#include <memory>
#include <vector>

#include "nullcone/common.hpp"

namespace nullcone {

// Spin-weighted spherical harmonic transforms on the unit sphere.
//
// Collocation grid: Gauss-Legendre nodes in cos(theta) (ntheta = L+1) times
// equispaced phi (nphi = 2L+1). Band-limited fields of degree <= L round-trip
// through analyze/synthesize at machine precision.
//
// Coefficient layout: idx(l,m) = l*l + l + m, size (L+1)^2; entries with
// l < |spin| are identically zero.
class SwshEngine {
 public:
  explicit SwshEngine(int L);

  int bandlimit() const { return L_; }
  int ntheta() const { return ntheta_; }
  int nphi() const { return nphi_; }
  std::size_t ngrid() const { return std::size_t(ntheta_) * nphi_; }
  std::size_t ncoef() const { return std::size_t(L_ + 1) * (L_ + 1); }

  double theta(int j) const { return theta_[j]; }
  double phi(int k) const { return 2.0 * M_PI * k / nphi_; }
  double quad_weight(int j) const { return w_[j]; }  // includes 2*pi/nphi

  static std::size_t idx(int l, int m) { return std::size_t(l) * l + l + m; }

  // spin in {-3,...,3}; fields are complex on the grid, row-major (j,k).
  std::vector<cplx> analyze(int spin, const std::vector<cplx>& grid) const;
  std::vector<cplx> synthesize(int spin, const std::vector<cplx>& coef) const;

  // Value of the spin-weighted harmonic sYlm at grid node (j,k).
  cplx harmonic(int spin, int l, int m, int j, int k) const;

  // Raising/lowering coefficients: eth sYlm = +eth_coef(l,spin) (s+1)Ylm,
  // ethbar sYlm = -ethbar_coef(l,spin) (s-1)Ylm.
  static double eth_coef(int l, int spin) {
    double v = double(l - spin) * double(l + spin + 1);
    return v > 0 ? std::sqrt(v) : 0.0;
  }
  static double ethbar_coef(int l, int spin) {
    double v = double(l + spin) * double(l - spin + 1);
    return v > 0 ? std::sqrt(v) : 0.0;
  }

 private:
  int L_, ntheta_, nphi_;
  std::vector<double> x_;      // Gauss-Legendre nodes (cos theta)
  std::vector<double> theta_;  // acos(x), decreasing x -> increasing theta
  std::vector<double> w_;      // GL weights * (2*pi/nphi)
  // lam_[spin+2][ (l,m) triangular ][ j ] : sLambda_{lm}(theta_j), the theta
  // part of sYlm (sYlm = sLambda * e^{i m phi}).
  std::vector<std::vector<std::vector<double>>> lam_;

  void build_tables();
};

std::shared_ptr<const SwshEngine> get_engine(int L);  // cached per band limit

// Wigner d-function d^l_{mn}(theta), stable l-recurrence (used by the tables
// and exposed for tests).
double wigner_d(int l, int m, int n, double theta);

}  // namespace nullcone
