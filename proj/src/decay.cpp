#include "nullcone/decay.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace nullcone {

namespace {

const Rational kHalf(1, 2);

SExpr half_s_plus(std::int64_t num, std::int64_t den = 2) {
  // (s + num)/den with den = 2 by default
  return SExpr(Rational(1, den), Rational(num, den));
}

}  // namespace

DecaySignature sig_O(int p, Rational q) {
  DecaySignature s;
  s.m_power = p;
  s.r_power = SExpr(q);
  s.u_power = SExpr(Rational(0));
  s.label = "O(" + std::to_string(p) + "," + q.str() + ")";
  return s;
}

DecaySignature sig_gamma_g(int deriv) {
  DecaySignature s;
  s.r_power = SExpr(Rational(2));
  s.u_power = half_s_plus(-3);  // (s-3)/2
  s.deriv = deriv;
  s.is_gamma = true;
  s.label = deriv ? "Gg1" : "Gg";
  return s;
}

DecaySignature sig_gamma_b(int deriv) {
  DecaySignature s;
  s.r_power = SExpr(Rational(1));
  s.u_power = half_s_plus(-1);  // (s-1)/2
  s.deriv = deriv;
  s.is_gamma = true;
  s.label = deriv ? "Gb1" : "Gb";
  return s;
}

DecaySignature sig_check(const std::string& name) {
  // Christoffel-difference checks sit inside the (1)-classes; curvature
  // checks carry the sup-norm weights of the s in [4,6] norm tables.
  if (name == "Jc" || name == "Lc") {
    auto s = sig_gamma_g(1);
    s.label = name;
    return s;
  }
  if (name == "Jbc") {
    auto s = sig_gamma_b(1);
    s.label = name;
    return s;
  }
  std::string base = name;
  int deriv = 0;
  if (!base.empty() && base.back() == '1') {
    deriv = 1;
    base.pop_back();
  }
  DecaySignature s;
  s.deriv = deriv;
  s.label = name;
  if (base == "ac") {
    s.r_power = half_s_plus(2);  // (s+2)/2
    s.u_power = SExpr(Rational(0));
  } else if (base == "bc") {
    s.r_power = SExpr(Rational(7, 2));
    s.u_power = half_s_plus(-4);
  } else if (base == "rsc") {
    s.r_power = SExpr(Rational(3));
    s.u_power = half_s_plus(-3);
  } else if (base == "bbc") {
    s.r_power = SExpr(Rational(2));
    s.u_power = half_s_plus(-1);
  } else if (base == "aac") {
    s.r_power = SExpr(Rational(1));
    s.u_power = half_s_plus(1);
  } else {
    throw std::invalid_argument("sig_check: unknown quantity " + name);
  }
  return s;
}

DecaySignature mul(const DecaySignature& a, const DecaySignature& b) {
  DecaySignature s;
  s.m_power = a.m_power + b.m_power;
  s.r_power = a.r_power + b.r_power;
  s.u_power = a.u_power + b.u_power;
  s.deriv = a.deriv + b.deriv;
  s.is_gamma = a.is_gamma || b.is_gamma;
  if (a.label == "1") s.label = b.label;
  else if (b.label == "1") s.label = a.label;
  else s.label = a.label + "*" + b.label;
  return s;
}

bool decays_at_least(const DecaySignature& a, const DecaySignature& b,
                     const SInterval& si) {
  if (a.m_power < b.m_power) return false;
  if (a.deriv > b.deriv) return false;  // more derivatives than controlled
  for (double s : {si.lo, si.hi}) {
    double qa = a.r_power.eval(s), qb = b.r_power.eval(s);
    double ta = qa + a.u_power.eval(s), tb = qb + b.u_power.eval(s);
    if (qa < qb - 1e-12 || ta < tb - 1e-12) return false;
  }
  return true;
}

std::vector<DecaySignature> normalize_sum(std::vector<DecaySignature> terms,
                                          const SInterval& si) {
  std::vector<DecaySignature> kept;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    bool drop = false;
    for (std::size_t j = 0; j < terms.size() && !drop; ++j) {
      if (i == j) continue;
      // drop i if it decays at least as fast as j but not conversely
      if (decays_at_least(terms[i], terms[j], si) &&
          !decays_at_least(terms[j], terms[i], si))
        drop = true;
      // among equivalent terms keep the first
      if (j < i && decays_at_least(terms[i], terms[j], si) &&
          decays_at_least(terms[j], terms[i], si))
        drop = true;
    }
    if (!drop) kept.push_back(terms[i]);
  }
  return kept;
}

std::vector<DecaySignature> derive(const DecaySignature& sig, DeriveDir dir) {
  if (sig.is_gamma || sig.deriv > 0) {
    if (sig.deriv >= 1)
      throw DomainError("derive: only one derivative of a Gamma class is controlled");
    DecaySignature out = sig;
    out.deriv = 1;
    out.label = sig.label + "^(1)";
    return {out};
  }
  // background quantities: raise the r-power; corrections per direction
  DecaySignature up = sig;
  up.r_power = sig.r_power + SExpr(Rational(1));
  up.label = "d[" + sig.label + "]";
  std::vector<DecaySignature> out{up};
  switch (dir) {
    case DeriveDir::Nab3:
      out.push_back(mul(sig, sig_gamma_g()));
      out.push_back(mul(sig, sig_check("Jbc")));
      out.push_back(mul(sig, sig_check("Lc")));
      break;
    case DeriveDir::Nab4:
      out.push_back(mul(sig, sig_check("Jc")));
      break;
    case DeriveDir::NabS:
      out.push_back(mul(sig, sig_check("Lc")));
      break;
  }
  return out;
}

DecaySignature SchematicTerm::combined() const {
  if (factors.empty()) throw std::invalid_argument("SchematicTerm: empty factor list");
  DecaySignature acc = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) acc = mul(acc, factors[i]);
  return acc;
}

std::string SchematicTerm::str() const {
  std::string out;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i) out += "*";
    out += factors[i].label;
  }
  return out;
}

namespace {

DecaySignature parse_factor(const std::string& tok) {
  if (tok == "Gg") return sig_gamma_g(0);
  if (tok == "Gg1") return sig_gamma_g(1);
  if (tok == "Gb") return sig_gamma_b(0);
  if (tok == "Gb1") return sig_gamma_b(1);
  if (tok == "r") return sig_O(0, Rational(-1));
  if (tok.rfind("O(", 0) == 0 && tok.back() == ')') {
    auto body = tok.substr(2, tok.size() - 3);
    auto comma = body.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("parse_factor: bad O term " + tok);
    int p = std::stoi(body.substr(0, comma));
    std::string qs = body.substr(comma + 1);
    auto slash = qs.find('/');
    Rational q = slash == std::string::npos
                     ? Rational(std::stoll(qs))
                     : Rational(std::stoll(qs.substr(0, slash)),
                                std::stoll(qs.substr(slash + 1)));
    return sig_O(p, q);
  }
  return sig_check(tok);
}

std::vector<std::string> split(const std::string& s, char delim) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == delim) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<SchematicTerm> parse_terms(const std::string& text) {
  std::vector<SchematicTerm> out;
  if (split(text, ' ').size() == 1 && split(text, '+').size() == 1 &&
      text.find("none") != std::string::npos)
    return out;
  for (const auto& prod : split(text, '+')) {
    SchematicTerm t;
    for (const auto& f : split(prod, '*')) t.factors.push_back(parse_factor(f));
    out.push_back(t);
  }
  return out;
}

}  // namespace

SchematicTerm parse_term(const std::string& text) {
  auto v = parse_terms(text);
  if (v.size() != 1) throw std::invalid_argument("parse_term: expected one product");
  return v.front();
}

EquationVerdict check_equation(const EquationRecord& eq, const SInterval& si) {
  EquationVerdict v;
  v.id = eq.id;
  v.pass = true;
  auto run_side = [&](const std::vector<SchematicTerm>& terms,
                      const std::vector<SchematicTerm>& claims_in,
                      const char* side) {
    const auto& claims = claims_in.empty() ? terms : claims_in;
    for (const auto& t : terms) {
      TermVerdict tv;
      tv.term = t.str();
      tv.side = side;
      auto sig = t.combined();
      double best = -1e30;
      for (const auto& c : claims) {
        auto cs = c.combined();
        if (!decays_at_least(sig, cs, si)) continue;
        double mr = 1e30, mt = 1e30;
        for (double s : {si.lo, si.hi}) {
          mr = std::min(mr, sig.r_power.eval(s) - cs.r_power.eval(s));
          mt = std::min(mt, sig.r_power.eval(s) + sig.u_power.eval(s) -
                                cs.r_power.eval(s) - cs.u_power.eval(s));
        }
        double score = std::min(mr, mt);
        if (!tv.pass || score < best) {  // prefer the tightest dominating claim
          tv.pass = true;
          tv.matched = c.str();
          tv.margin_r = mr;
          tv.margin_total = mt;
          best = score;
        }
      }
      if (!tv.pass) v.pass = false;
      v.terms.push_back(tv);
    }
  };
  run_side(eq.linear, eq.claim_linear, "linear");
  run_side(eq.error, eq.claim_error, "error");
  return v;
}

std::vector<EquationRecord> parse_equation_db(std::istream& in) {
  std::vector<EquationRecord> db;
  EquationRecord cur;
  bool open = false;
  std::string line;
  int lineno = 0;
  auto flush = [&] {
    if (open) db.push_back(cur);
    cur = EquationRecord{};
    open = false;
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::string trimmed;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c)) || !trimmed.empty())
        trimmed += c;
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
      trimmed.pop_back();
    if (trimmed.empty()) continue;
    auto fail = [&](const std::string& what) {
      throw ConfigError("equation db line " + std::to_string(lineno) + ": " + what);
    };
    if (trimmed.rfind("eq ", 0) == 0) {
      flush();
      cur.id = trimmed.substr(3);
      open = true;
      continue;
    }
    auto colon = trimmed.find(':');
    if (!open || colon == std::string::npos) fail("expected 'key: value' inside a record");
    std::string key = trimmed.substr(0, colon);
    std::string val = trimmed.substr(colon + 1);
    if (key == "principal") cur.principal = val;
    else if (key == "linear") cur.linear = parse_terms(val);
    else if (key == "error") cur.error = parse_terms(val);
    else if (key == "claim-linear") cur.claim_linear = parse_terms(val);
    else if (key == "claim-error") cur.claim_error = parse_terms(val);
    else fail("unknown key '" + key + "'");
  }
  flush();
  return db;
}

std::vector<EquationRecord> load_equation_db(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open equation database: " + path);
  return parse_equation_db(in);
}

std::vector<EquationRecord> make_mutants(const std::vector<EquationRecord>& db,
                                         int count) {
  // Deterministic corruptions: degrade one factor of one term so the term
  // decays strictly slower than every claim.
  std::vector<EquationRecord> out;
  std::size_t k = 0;
  while (int(out.size()) < count && k < 4 * db.size()) {
    const auto& src = db[k % db.size()];
    int variant = int(k / db.size());
    ++k;
    EquationRecord m = src;
    std::vector<SchematicTerm>* side = nullptr;
    if (!m.linear.empty()) side = &m.linear;
    else if (!m.error.empty()) side = &m.error;
    else continue;
    if (m.claim_linear.empty()) m.claim_linear = src.linear;
    if (m.claim_error.empty()) m.claim_error = src.error;
    auto& term = (*side)[variant % side->size()];
    auto& f = term.factors[variant % term.factors.size()];
    switch (variant % 3) {
      case 0:  // throw away two powers of r
        f.r_power = f.r_power - SExpr(Rational(2));
        f.label += "[-r2]";
        break;
      case 1:  // swap a Gamma_g for the slower Gamma_b, or drop |u| decay
        if (f.is_gamma && f.label.rfind("Gg", 0) == 0) {
          bool d = f.deriv;
          f = sig_gamma_b(d);
          f.label += "[was-Gg]";
          f.u_power = f.u_power + SExpr(Rational(2));  // artificially slower
          f.u_power = f.u_power - SExpr(Rational(4));
        } else {
          f.u_power = f.u_power - SExpr(Rational(3));
          f.label += "[-u3]";
        }
        break;
      case 2:  // erase the mass weight and an r power
        f.m_power = std::max(0, f.m_power - 2);
        f.r_power = f.r_power - SExpr(Rational(1));
        f.label += "[-M2r]";
        break;
    }
    m.id = src.id + "/mutant" + std::to_string(out.size());
    out.push_back(m);
  }
  return out;
}

std::vector<CommutatorTerm> commutator_signature(const std::string& pair,
                                                 bool flat_limit) {
  std::vector<CommutatorTerm> out;
  auto add = [&](DecaySignature s, const std::string& op) {
    if (flat_limit && s.m_power >= 1) return;
    out.push_back({s, op});
  };
  if (pair == "rnab,om-nab4") {
    add(sig_gamma_g(), "rnab");
    add(sig_O(2, Rational(3)), "rnab");
    add(sig_gamma_g(1), "");
    add(sig_O(2, Rational(3)), "");
  } else if (pair == "rnab,om-nab3") {
    add(sig_gamma_b(), "rnab");
    add(sig_O(2, Rational(3)), "rnab");
    add(sig_gamma_b(1), "");
    add(sig_O(2, Rational(3)), "");
  } else if (pair == "nab,om-nab4") {
    add(sig_O(0, Rational(1)), "nab");  // -1/2 Omega trchi nabla
    add(sig_gamma_g(), "nab");
    add(sig_O(2, Rational(3)), "nab");
    add(mul(sig_O(0, Rational(1)), sig_gamma_g(1)), "");
    add(sig_O(2, Rational(4)), "");
  } else if (pair == "nab,om-nab3") {
    add(sig_O(0, Rational(1)), "nab");
    add(sig_gamma_b(), "nab");
    add(sig_O(2, Rational(3)), "nab");
    add(mul(sig_O(0, Rational(1)), sig_gamma_b(1)), "");
    add(sig_O(2, Rational(4)), "");
  } else if (pair == "nab4,nab3") {
    add(sig_gamma_g(), "nab3");
    add(sig_gamma_b(), "nab4");
    add(sig_gamma_b(), "nab");
    add(sig_O(1, Rational(2)), "nab3");
    add(sig_O(1, Rational(2)), "nab4");
    add(sig_O(1, Rational(2)), "nab");
    add(mul(sig_O(0, Rational(1)), sig_gamma_g(1)), "");
    add(sig_O(2, Rational(4)), "");
  } else if (pair == "om-nab4,om-nab3") {
    add(sig_gamma_b(), "nab");
    add(sig_O(2, Rational(3)), "nab");
    add(mul(sig_O(0, Rational(1)), sig_gamma_g(1)), "");
    add(sig_O(2, Rational(4)), "");
  } else {
    throw std::invalid_argument("commutator_signature: unknown pair " + pair);
  }
  return out;
}

}  // namespace nullcone
