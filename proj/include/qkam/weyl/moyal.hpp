#pragma once

#include <cmath>

#include "qkam/lattice/symbol.hpp"

namespace qkam {

// {w, w'} = k.eta' - k'.eta with eta = mu m.
inline double symplectic_pairing(const Mode& w1, const Mode& w2, double mu) {
  return mu * static_cast<double>(dot(w1.k, w2.m) - dot(w2.k, w1.m));
}

// sigma^1_hbar = (2/hbar) sin(hbar/2 {w,w'}); hbar = 0 gives the Poisson pairing.
inline double sigma1_from_pairing(double pairing, double hbar) {
  if (hbar == 0) return pairing;
  return (2.0 / hbar) * std::sin(0.5 * hbar * pairing);
}

namespace detail {

template <class Factor>
TorusSymbol bilinear(const TorusSymbol& a, const TorusSymbol& b, Factor&& factor) {
  a.require_same_space(b);
  TorusSymbol r = a.like();
  for (auto& [wa, ca] : a.coeffs())
    for (auto& [wb, cb] : b.coeffs()) {
      Complex f = factor(wa, wb);
      if (f != Complex{}) r.add(wa + wb, f * ca * cb);
    }
  r.add_tail(a.truncation_tail() * analytic_norm(b, 0) + b.truncation_tail() * analytic_norm(a, 0));
  r.prune();
  return r;
}

}  // namespace detail

// a #_hbar b on the lattice: the xi-shifts of the product formula become the
// phase e^{-i (hbar/2) {w_a, w_b}} on each mode pair.
inline TorusSymbol moyal_product(const TorusSymbol& a, const TorusSymbol& b, double hbar) {
  const double mu = a.mu();
  return detail::bilinear(a, b, [&](const Mode& wa, const Mode& wb) {
    return std::polar(1.0, -0.5 * hbar * symplectic_pairing(wa, wb, mu));
  });
}

// [a,b]_hbar = (i/hbar)(a#b - b#a). At hbar = 0 this is the Poisson bracket.
inline TorusSymbol moyal_commutator(const TorusSymbol& a, const TorusSymbol& b, double hbar) {
  const double mu = a.mu();
  return detail::bilinear(a, b, [&](const Mode& wa, const Mode& wb) {
    return Complex(sigma1_from_pairing(symplectic_pairing(wa, wb, mu), hbar), 0.0);
  });
}

// {a,b} = d_xi a . d_x b - d_x a . d_xi b.
inline TorusSymbol poisson_bracket(const TorusSymbol& a, const TorusSymbol& b) {
  return moyal_commutator(a, b, 0.0);
}

// omega.d_x a: each mode scaled by i omega.k.
inline TorusSymbol transport_derivative(const FrequencyVector& omega, const TorusSymbol& a) {
  TorusSymbol r = a.like();
  for (auto& [w, c] : a.coeffs()) r.add(w, kI * omega.dot(w.k) * c);
  return r;
}

// [L_omega + p, b]_hbar. The degree-one part is exact for every hbar.
inline TorusSymbol moyal_commutator(const AffineSymbol& A, const TorusSymbol& b, double hbar) {
  TorusSymbol r = transport_derivative(A.omega, b);
  if (!A.periodic.empty()) r += moyal_commutator(A.periodic, b, hbar);
  return r;
}

inline TorusSymbol moyal_commutator(const TorusSymbol& b, const AffineSymbol& A, double hbar) {
  return -moyal_commutator(A, b, hbar);
}

inline TorusSymbol poisson_bracket(const AffineSymbol& A, const TorusSymbol& b) {
  return moyal_commutator(A, b, 0.0);
}

inline TorusSymbol poisson_bracket(const TorusSymbol& b, const AffineSymbol& A) {
  return -moyal_commutator(A, b, 0.0);
}

}  // namespace qkam
