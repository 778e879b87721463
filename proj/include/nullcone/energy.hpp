#pragma once

#include "nullcone/grid.hpp"

namespace nullcone {

// A Bianchi pair (psi1, psi2): psi1 carries the nabla_3 equation (flux on
// outgoing cones), psi2 the nabla_4 equation (flux on ingoing cones).
struct BianchiPair {
  std::string name;
  int k = 2;
  Rational a1, a2;
  int shape = 1;  // transport-system variant 1 or 2
  Rank rank1 = Rank::TwoTensor, rank2 = Rank::OneForm;
};

const std::vector<BianchiPair>& canonical_pairs();  // the four curvature pairs
BianchiPair teukolsky_pair_outgoing();              // (ring-alpha, slash-alpha)
BianchiPair teukolsky_pair_ingoing();

enum class WeightCase { A, B, C, D, None };
// case by the signs of (2 + p - 4 a1, 4 a2 - 2 - p); ties per the paper's
// explicit applications (B on the 4a2-2-p = 0 boundary when 2+p-4a1 > 0)
WeightCase select_case(const BianchiPair& pair, double p);
std::string case_name(WeightCase c);

// canonical p per pair for the three decay regimes, plus the Teukolsky pair
// weight s0 = min(s, 15/2) for s > 6
struct CaseTableRow {
  std::string pair;
  double p;
  WeightCase c;
};
std::vector<CaseTableRow> canonical_case_table(double s);

// ---- r^p fluxes ----

// flux of r^p |psi|^2 over a stored cone with measure 2 Omega dmu_S dcoord
double rp_flux(const NullGrid& g, const std::vector<SphereField>& cone,
               const std::vector<double>& coord, const std::vector<double>& r,
               const std::vector<double>& Om, double p);

// the same over an outgoing (fixed i) or ingoing (fixed j) grid line
double rp_flux_outgoing(const NullGrid& g, const std::string& field,
                        std::size_t i, double p, std::size_t j_hi);
double rp_flux_ingoing(const NullGrid& g, const std::string& field,
                       std::size_t j, double p, std::size_t i_hi);

// ---- pointwise divergence identity of the weighted pair ----

struct PairFieldSet {
  std::vector<SphereField> psi1, psi2, h1, h2;  // per grid node
};

struct DivergenceReport {
  double residual_linf = 0.0;
  std::vector<double> per_node;  // interior nodes, row-major
};

DivergenceReport divergence_residual(const NullGrid& g, const BianchiPair& pair,
                                     double p, const PairFieldSet& fs);

// integrated case inequality on evolved/manufactured solutions
struct FluxBalance {
  double out_flux = 0.0, in_flux = 0.0, bulk = 0.0;
  double initial = 0.0;         // both data cones plus any moved bulk term
  double slack = 0.0;           // initial - (out + in + bulk)
  WeightCase used = WeightCase::None;
};
FluxBalance pair_flux_balance(const NullGrid& g, const BianchiPair& pair,
                              double p, const PairFieldSet& fs);

// ---- norm suite (curvature norm families of the three regimes) ----

struct NormValue {
  std::string name;      // e.g. "R0[bc]"
  std::string quantity;  // field key
  double coord = 0.0;    // u for outgoing, ub for ingoing families
  double value = 0.0;
};

struct NormReport {
  std::vector<NormValue> values;
  double s = 5.0;
};

// curvature field keys on the grid: "ac", "bc", "rsc", "bbc", "aac"
NormReport norm_suite(const NullGrid& g, double s);

// weight table (r-power, u-power) of the L^2(S)-norm families; exposed for
// the data profiles and tests
struct NormWeight {
  double r_pow = 0.0, u_pow = 0.0;
  bool defined = false;
};
NormWeight sphere_norm_weight(const std::string& quantity, double s);

// Ricci-coefficient and metric-component sphere-norm weights: the O family
// on the bulk foliation, the O* family on the last slice, and the O-ring
// family on the initial-layer spheres. Exponents of |r^{a+q-2/p}|u|^b .|_p.
NormWeight coeff_norm_weight(const std::string& family, const std::string& quantity,
                             double s, int q, int p);

// ---- Teukolsky-derived quantities ----

struct TeukolskyFields {
  std::vector<SphereField> ring;     // r^{-4} nab4 (r^5 alpha) or nab3 mirror
  std::vector<SphereField> slashed;  // r d2 alpha
  std::size_t i_lo = 1, i_hi = 0, j_lo = 1, j_hi = 0;  // valid index window
};

TeukolskyFields teukolsky_quantities(const NullGrid& g, const std::string& field,
                                     bool outgoing_weight);

// residual of the first Teukolsky pair equation on grid data
double teukolsky_residual(const NullGrid& g, const std::string& alpha_key);

// ---- peeling exponent tables ----

struct PeelingEntry {
  std::string quantity;
  bool has_l2 = false;
  double l2_r = 0.0, l2_u = 0.0;
  bool log_flag = false;  // (log r)^{-1/2} correction at s = 7
  bool has_sup = false;
  double sup_r = 0.0, sup_u = 0.0;
};

std::vector<PeelingEntry> peeling_exponents(double s);

// least-squares log-log fit: returns (slope, r^2)
std::pair<double, double> fit_loglog(const std::vector<double>& x,
                                     const std::vector<double>& y);

}  // namespace nullcone
