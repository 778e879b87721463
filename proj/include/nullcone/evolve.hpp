#pragma once

#include "nullcone/energy.hpp"

namespace nullcone {

// Linearized Bianchi system on an exact a = 0 background, evolved on the
// characteristic mesh. Fields live in spectral coefficient space:
//   ac  (alpha-check,  rank 2)  marched along nabla_3
//   bc  (beta-check,   rank 1)  marched along nabla_4
//   rsc (rho + i sigma, rank 0) marched along nabla_4
//   bbc (betab-check,  rank 1)  marched along nabla_4
//   aac (alphab-check, rank 2)  marched along nabla_4
// The remaining transport equations act as discrete constraints.
struct BianchiData {
  // data on the initial outgoing cone u = u0 (per ub node) and on the
  // initial ingoing cone ub = ub0 (per u node)
  std::vector<SphereField> ac_out;                 // size n_ub
  std::vector<SphereField> bc_in, rsc_in, bbc_in, aac_in;  // size n_u
};

struct EvolveOptions {
  double cfl_guard = 1.0;  // error if dub > cfl_guard * r_min / (L + 1)
  bool check_nan = true;
};

struct EvolveResult {
  NullGrid grid;  // fields: "ac", "bc", "rsc", "bbc", "aac"
  NormReport norms;
  double constraint_residual = 0.0;  // max over the unused transport equations
};

EvolveResult evolve_linear_bianchi(const GridSpec& spec, const BianchiData& data,
                                   double s, const EvolveOptions& opt = {});

// Default data profiles. "family": per-family rates consistent with the
// curvature norm tables; "power": every family r^{-s/2-1}.
BianchiData make_profile_data(const GridSpec& spec, double s, int l, int m,
                              const std::string& profile, double amplitude);

// Independent per-(l,m) oracle: integrates the same scheme on one (l, +-m)
// coefficient block with hand-coded ladder factors.
struct ModeOracleResult {
  // coefficient histories at (l, m) for each field, per grid node
  std::vector<cplx> ac, bc, rsc, bbc, aac;  // row-major (i, j)
};
ModeOracleResult evolve_mode_oracle(const GridSpec& spec, const BianchiData& data,
                                    int l, int m);

// ---- Sobolev spot checks along a cone segment ----

struct SobolevReport {
  double ratio_l4 = 0.0;      // |r F|_{4,S} vs outgoing flux combination
  double ratio_sup = 0.0;     // sup_S r^{1/2} |F| vs the L4 norms
  bool pass_by_convention = false;  // zero field
};

SobolevReport sobolev_check(const NullGrid& g, const std::string& field,
                            std::size_t i, std::size_t j_eval);

}  // namespace nullcone
