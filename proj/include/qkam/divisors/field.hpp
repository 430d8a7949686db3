#pragma once

#include "qkam/lattice/frequency.hpp"
#include "qkam/trees/rational.hpp"

namespace qkam {

// Arithmetic used by the Omega computations. Both provide zero(), one(),
// inv_i_dot(sigma) = 1/(i omega.sigma), and abs().

struct ComplexArithmetic {
  using Value = Complex;
  FrequencyVector omega;

  static Value zero() { return 0.0; }
  static Value one() { return 1.0; }
  static double abs(const Value& x) { return std::abs(x); }
  static Complex to_complex(const Value& x) { return x; }

  Value inv_i_dot(const IntVec& s) const {
    if (omega.resonant(s)) throw ZeroDivisorError("vanishing divisor omega.gamma at gamma = " + to_string(s, omega.dim()));
    return 1.0 / (kI * omega.dot(s));
  }
};

struct GaussianRational {
  Rational re = 0, im = 0;

  friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend GaussianRational operator-(const GaussianRational& a) { return {-a.re, -a.im}; }
  friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  GaussianRational& operator+=(const GaussianRational& o) { return *this = *this + o; }
  GaussianRational& operator-=(const GaussianRational& o) { return *this = *this - o; }
  GaussianRational& operator*=(const GaussianRational& o) { return *this = *this * o; }
  friend bool operator==(const GaussianRational&, const GaussianRational&) = default;
};

// Exact mode for d = 1 with rational omega = p/q.
struct ExactArithmetic {
  using Value = GaussianRational;
  Rational omega = 1;

  static Value zero() { return {}; }
  static Value one() { return {1, 0}; }
  static double abs(const Value& x) { return std::abs(to_complex(x)); }
  static Complex to_complex(const Value& x) { return {to_double(x.re), to_double(x.im)}; }

  Value inv_i_dot(const IntVec& s) const {
    const Rational w = omega * s[0];
    if (w == 0) throw ZeroDivisorError("vanishing divisor omega.gamma");
    return {0, -1 / w};
  }
};

}  // namespace qkam
