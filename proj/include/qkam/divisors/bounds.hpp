#pragma once

#include <cmath>
#include <random>

#include "qkam/divisors/omega.hpp"
#include "qkam/divisors/resonance.hpp"
#include "qkam/divisors/sigma.hpp"
#include "qkam/trees/coefficients.hpp"

namespace qkam {

struct BoundCheck {
  double lhs = 0;
  double rhs = 0;
  bool holds() const { return lhs <= rhs * (1 + 1e-12); }
};

// |Omega_1| <= rho (2^{4 gamma + 3} varsigma)^n prod_{v_j != 0} |v_j|^{3 gamma}
// when the root weight is nonzero; otherwise the same bound for |Omega_2|
// with the root factor left out of the product, and rho counting classes of
// families that are admissible away from the root.
inline BoundCheck eliasson_bound_check(const DecoratedTree& dt, const FrequencyVector& omega, double gamma_exp,
                                       double varsigma) {
  BoundCheck b;
  const auto om = omega_recursive(dt, omega);
  const int n = dt.size();
  const bool root_zero = is_zero(dt.gamma(n));
  b.lhs = std::abs(root_zero ? om.omega2 : om.omega1);
  b.rhs = rho(dt, root_zero ? node_bit(n) : 0) * std::pow(std::pow(2.0, 4 * gamma_exp + 3) * varsigma, n);
  for (int c = 1; c <= n; ++c) {
    if (root_zero && c == n) continue;
    if (!is_zero(dt.v(c))) b.rhs *= std::pow(norm2(dt.v(c)), 3 * gamma_exp);
  }
  return b;
}

struct AnalyticPartCheck : BoundCheck {
  std::vector<FourierWeight> argmax;
};

// c(delta) sup_w |sigma_hbar(w, delta)| e^{-sigma (|w_1| + ... + |w_n|)} against
// C^{n-1} ((n-1)^{n-1}/(n-1)!)^2 (1/(e sigma))^{2(n-1)}. The supremum is taken
// over `samples` random lattice weights with |k|_inf <= K, |m|_inf <= M.
inline AnalyticPartCheck analytic_part_bound_check(const TreeIndexSet& t, double sigma, double C, double hbar,
                                                   double mu, int d, int K, int M, int samples, std::uint64_t seed) {
  AnalyticPartCheck out;
  const int n = t.size();
  const double c = to_double(coefficient_c(t));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dk(-K, K), dm(-M, M);
  std::vector<FourierWeight> ws(n + 1);
  for (int s = 0; s < samples; ++s) {
    double total = 0;
    for (int i = 1; i <= n; ++i) {
      Mode w;
      for (int j = 0; j < d; ++j) {
        w.k[j] = dk(rng);
        w.m[j] = dm(rng);
      }
      ws[i] = FourierWeight::from_mode(w, mu);
      total += ws[i].norm();
    }
    const double val = c * std::abs(sigma_tree(ws, t, hbar)) * std::exp(-sigma * total);
    if (val > out.lhs) {
      out.lhs = val;
      out.argmax = ws;
    }
  }
  if (n == 1) {
    out.lhs = std::max(out.lhs, c);  // zero weight attains the sup
    out.rhs = 1;
    return out;
  }
  const double m = n - 1;
  out.rhs = std::pow(C, m) * std::pow(std::pow(m, m) / std::tgamma(m + 1), 2) * std::pow(1.0 / (std::numbers::e * sigma), 2 * m);
  return out;
}

}  // namespace qkam
