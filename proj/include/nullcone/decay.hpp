#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nullcone/common.hpp"

namespace nullcone {

// Schematic decay bookkeeping: a signature records |X| ~ M^m r^{-q} |u|^{-w}
// with q, w affine in the decay parameter s, plus the derivative count of the
// "(1)" classes. The partial order "decays at least as fast" works on the
// exterior region r >~ |u| >~ 1 and M <= r:
//   X <= Y  iff  m_X >= m_Y, q_X >= q_Y and q_X + w_X >= q_Y + w_Y,
// checked at both endpoints of the configured s-interval.
struct DecaySignature {
  int m_power = 0;
  SExpr r_power;       // q
  SExpr u_power;       // w
  int deriv = 0;       // 0 or 1 per factor; additive under products
  bool is_gamma = false;
  std::string label = "1";
};

DecaySignature sig_O(int p, Rational q);
DecaySignature sig_gamma_g(int deriv = 0);
DecaySignature sig_gamma_b(int deriv = 0);
// named linearized quantities: J, Jb, L (Christoffel differences) and the
// curvature checks ac, bc, rsc, bbc, aac (optionally with suffix 1)
DecaySignature sig_check(const std::string& name);

DecaySignature mul(const DecaySignature& a, const DecaySignature& b);

struct SInterval {
  double lo = 4.0;
  double hi = 6.0;
};

// "a decays at least as fast as b" on the s-interval
bool decays_at_least(const DecaySignature& a, const DecaySignature& b,
                     const SInterval& si);

// sum normalization: keep only the slowest-decaying representatives
std::vector<DecaySignature> normalize_sum(std::vector<DecaySignature> terms,
                                          const SInterval& si);

enum class DeriveDir { Nab3, Nab4, NabS };

// derivative bookkeeping per the background-derivative lemma; Gamma classes
// move to their (1)-class, a second derivative is unsupported
std::vector<DecaySignature> derive(const DecaySignature& sig, DeriveDir dir);

struct SchematicTerm {
  std::vector<DecaySignature> factors;
  DecaySignature combined() const;
  std::string str() const;
};

struct EquationRecord {
  std::string id;
  std::string principal;  // display only
  std::vector<SchematicTerm> linear, error;
  std::vector<SchematicTerm> claim_linear, claim_error;  // empty: claim = own terms
};

struct TermVerdict {
  std::string term;
  std::string side;     // "linear" | "error"
  bool pass = false;
  std::string matched;  // dominating claim term
  double margin_r = 0.0, margin_total = 0.0;  // worst-case slack over s
};

struct EquationVerdict {
  std::string id;
  bool pass = false;
  std::vector<TermVerdict> terms;
};

EquationVerdict check_equation(const EquationRecord& eq, const SInterval& si);

// database
std::vector<EquationRecord> parse_equation_db(std::istream& in);
std::vector<EquationRecord> load_equation_db(const std::string& path);
SchematicTerm parse_term(const std::string& text);

// deterministic corrupted variants; every mutant must fail check_equation
std::vector<EquationRecord> make_mutants(const std::vector<EquationRecord>& db,
                                         int count);

// schematic commutator table
struct CommutatorTerm {
  DecaySignature coef;
  std::string op;  // "rnab", "nab", "nab3", "nab4" or "" for zeroth order
};
std::vector<CommutatorTerm> commutator_signature(const std::string& pair,
                                                 bool flat_limit = false);

}  // namespace nullcone
