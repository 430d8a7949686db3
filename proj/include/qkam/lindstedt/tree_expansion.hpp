#pragma once

#include <map>
#include <vector>

#include "qkam/divisors/omega.hpp"
#include "qkam/divisors/sigma.hpp"
#include "qkam/lindstedt/series.hpp"
#include "qkam/trees/coefficients.hpp"

namespace qkam {

// H_n and R'_n as sums over delta in Delta(n) and over assignments of V's
// modes w_1..w_n to the nodes:
//   c(delta) V^(w_1)...V^(w_n) (-1)^{n-1} sigma_hbar(w, delta) Omega_{1,2}(delta, k).
// The sign turns the tree weight's bracket orientation into the nested
// commutators [H, [H, ...]] of the direct recursion.
inline LindstedtSeries lindstedt_terms_tree(const TorusSymbol& V0, const FrequencyVector& omega, double hbar, int N) {
  if (N < 1 || N > 5) throw ValidationError("tree expansion supports orders 1..5");
  TorusSymbol V = V0;
  V.set_limits(series_limits(V0, N));
  const double mu = V.mu();
  std::vector<std::pair<Mode, Complex>> modes(V.coeffs().begin(), V.coeffs().end());
  const int q = static_cast<int>(modes.size());
  LindstedtSeries s;
  s.hbar = hbar;
  s.omega = omega;
  for (int n = 1; n <= N; ++n) {
    TorusSymbol Hn = V.like(), Rn = V.like();
    const double sign = (n % 2) ? 1.0 : -1.0;
    for (const TreeIndexSet& t : enumerate_delta(n)) {
      const double c = to_double(coefficient_c(t));
      std::map<std::vector<IntVec>, OmegaPair<Complex>> cache;
      std::vector<int> pick(n, 0);
      std::vector<FourierWeight> ws(n + 1);
      std::vector<IntVec> ks(n);
      if (q == 0) break;
      while (true) {
        Complex amp = c * sign;
        Mode total;
        for (int i = 0; i < n; ++i) {
          const auto& [w, cw] = modes[pick[i]];
          amp *= cw;
          ws[i + 1] = FourierWeight::from_mode(w, mu);
          ks[i] = w.k;
          total = total + w;
        }
        amp *= sigma_tree(ws, t, hbar);
        if (amp != Complex{}) {
          auto it = cache.find(ks);
          if (it == cache.end()) {
            DecoratedTree dt(t, ks, V.dim());
            it = cache.emplace(ks, omega_recursive(dt, omega)).first;
          }
          if (is_zero(total.k))
            Rn.add(total, amp * it->second.omega2);
          else
            Hn.add(total, amp * it->second.omega1);
        }
        int i = 0;
        while (i < n && pick[i] == q - 1) pick[i++] = 0;
        if (i == n) break;
        ++pick[i];
      }
    }
    Hn.prune();
    Rn.prune();
    s.H.push_back(std::move(Hn));
    s.Rprime.push_back(std::move(Rn));
  }
  return s;
}

}  // namespace qkam
