#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace nullcone {

using cplx = std::complex<double>;

struct RankError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct SolvabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact rational arithmetic for decay exponents and case-selection tables.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n) : num(n), den(1) {}
  Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    if (den < 0) { num = -num; den = -den; }
    std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
  }
  double value() const { return double(num) / double(den); }

  friend Rational operator+(Rational a, Rational b) {
    return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
  }
  friend Rational operator-(Rational a, Rational b) {
    return Rational(a.num * b.den - b.num * a.den, a.den * b.den);
  }
  friend Rational operator*(Rational a, Rational b) {
    return Rational(a.num * b.num, a.den * b.den);
  }
  friend Rational operator-(Rational a) { return Rational(-a.num, a.den); }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return a.num * b.den < b.num * a.den;
  }
  friend bool operator<=(const Rational& a, const Rational& b) {
    return a.num * b.den <= b.num * a.den;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator>=(const Rational& a, const Rational& b) { return b <= a; }
  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }
};

// Exponent affine in the decay parameter s: coef_s * s + coef_1.
struct SExpr {
  Rational coef_s;
  Rational coef_1;

  SExpr() = default;
  SExpr(Rational c1) : coef_s(0), coef_1(c1) {}
  SExpr(Rational cs, Rational c1) : coef_s(cs), coef_1(c1) {}

  double eval(double s) const { return coef_s.value() * s + coef_1.value(); }
  Rational eval(Rational s) const { return coef_s * s + coef_1; }

  friend SExpr operator+(SExpr a, SExpr b) {
    return SExpr(a.coef_s + b.coef_s, a.coef_1 + b.coef_1);
  }
  friend SExpr operator-(SExpr a, SExpr b) {
    return SExpr(a.coef_s - b.coef_s, a.coef_1 - b.coef_1);
  }
  friend bool operator==(const SExpr& a, const SExpr& b) {
    return a.coef_s == b.coef_s && a.coef_1 == b.coef_1;
  }
  std::string str() const {
    if (coef_s == Rational(0)) return coef_1.str();
    std::string out = coef_s.str() + "*s";
    if (coef_1 != Rational(0))
      out += (coef_1 > Rational(0) ? "+" : "") + coef_1.str();
    return out;
  }
};

// Thread cap from NULLCONE_THREADS (<=0 or unset: hardware concurrency).
int thread_cap();

// Deterministic parallel loop: item i is processed exactly once and any
// reduction is done by the caller over preassigned slots.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

inline double sq(double x) { return x * x; }

}  // namespace nullcone
