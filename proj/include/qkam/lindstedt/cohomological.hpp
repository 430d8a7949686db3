#pragma once

#include "qkam/lattice/symbol.hpp"
#include "qkam/weyl/moyal.hpp"

namespace qkam {

struct CohomologicalSolution {
  TorusSymbol F;    // zero x-average
  TorusSymbol avg;  // x-average of the right-hand side
};

// {L_omega, F} = V - <V>: F^(k) = V^(k)/(i omega.k) for k != 0.
inline CohomologicalSolution solve_cohomological(const TorusSymbol& V, const FrequencyVector& omega) {
  if (omega.dim() != V.dim()) throw ValidationError("frequency and symbol dimensions differ");
  CohomologicalSolution s{V.like(), V.x_average()};
  for (auto& [w, c] : V.coeffs()) {
    if (is_zero(w.k)) continue;
    if (omega.resonant(w.k)) throw ResonantFrequencyError("omega.k = 0 at k = " + to_string(w.k, V.dim()));
    s.F.set(w, c / (kI * omega.dot(w.k)));
  }
  s.F.add_tail(V.truncation_tail());
  return s;
}

// varsigma^{-1} (gamma/(e sigma))^gamma ||V||_s, the bound on ||F||_{s-sigma}.
inline double cohomological_bound(const TorusSymbol& V, double s, double sigma, double varsigma, double gamma_exp) {
  return std::pow(gamma_exp / (std::numbers::e * sigma), gamma_exp) / varsigma * analytic_norm(V, s);
}

}  // namespace qkam
