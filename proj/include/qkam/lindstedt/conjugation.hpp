#pragma once

#include <vector>

#include "qkam/lindstedt/series.hpp"

namespace qkam {

// psi_n(a) = (1/n) sum_{j<n} psi_j([H_{n-j}, a]), psi_0(a) = a: the symbol
// coefficients of U_H(t)^* Op(a) U_H(t) = Op(sum_n t^n psi_n(a)).
inline TorusSymbol conjugation_coefficient(const std::vector<TorusSymbol>& H, int n, const TorusSymbol& a,
                                           double hbar) {
  if (n == 0) return a;
  TorusSymbol acc = a.like();
  for (int j = 0; j < n; ++j)
    acc += conjugation_coefficient(H, j, bracket(H[n - j - 1], a, hbar), hbar);
  acc *= 1.0 / n;
  return acc;
}

struct ConjugationResult {
  TorusSymbol symbol;
  double generator_norm = 0;  // sum_n t^n ||H_n||_s
  bool precondition_holds = false;
  double lhs = 0;  // ||result||_{s - sigma}
  double rhs = 0;  // 2 ||a||_s
};

// Partial sum sum_{n<=N} t^n psi_n(a) for the family H_1..H_N.
inline ConjugationResult symbolic_conjugation(const TorusSymbol& a, const std::vector<TorusSymbol>& H, double t,
                                              double hbar, double s, double sigma, int N = -1) {
  if (N < 0) N = static_cast<int>(H.size());
  if (N > static_cast<int>(H.size())) throw ValidationError("not enough generator terms");
  if (!(sigma > 0 && sigma <= s)) throw ParameterRangeError("need 0 < sigma <= s");
  ConjugationResult r{a};
  double tn = 1;
  for (int n = 1; n <= N; ++n) {
    tn *= t;
    r.symbol += tn * conjugation_coefficient(H, n, a, hbar);
    r.generator_norm += tn * analytic_norm(H[n - 1], s);
  }
  r.precondition_holds = 2 * r.generator_norm / (sigma * sigma) <= 0.5;
  r.lhs = analytic_norm(r.symbol, s - sigma);
  r.rhs = 2 * analytic_norm(a, s);
  return r;
}

inline ConjugationResult symbolic_conjugation(const TorusSymbol& a, const LindstedtSeries& series, double t,
                                              double s, double sigma) {
  return symbolic_conjugation(a, series.H, t, series.hbar, s, sigma);
}

}  // namespace qkam
