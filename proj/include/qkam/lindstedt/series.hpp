#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "qkam/lindstedt/cohomological.hpp"
#include "qkam/trees/coefficients.hpp"

namespace qkam {

// H(t) = sum_n t^{n-1} H_n and R'(t) = sum_n t^{n-1} R'_n, n = 1..N.
// hbar = 0 selects the classical (Poisson bracket) hierarchy.
struct LindstedtSeries {
  std::vector<TorusSymbol> H;       // H[n-1] = H_n
  std::vector<TorusSymbol> Rprime;  // Rprime[n-1] = R'_n
  double hbar = 0;
  FrequencyVector omega;

  int orders() const { return static_cast<int>(H.size()); }
  const TorusSymbol& Hn(int n) const { return H.at(n - 1); }
  const TorusSymbol& Rn(int n) const { return Rprime.at(n - 1); }

  double truncation_tail() const {
    double t = 0;
    for (auto& h : H) t += h.truncation_tail();
    for (auto& r : Rprime) t += r.truncation_tail();
    return t;
  }
};

inline TorusSymbol bracket(const TorusSymbol& a, const TorusSymbol& b, double hbar) {
  return moyal_commutator(a, b, hbar);
}

// Limits wide enough to keep order-N products of V exactly.
inline SymbolLimits series_limits(const TorusSymbol& V, int N) {
  SymbolLimits l = V.limits();
  l.k_max = std::max(l.k_max, N * std::max(1, V.k_support()));
  l.m_max = std::max(l.m_max, N * std::max(1, V.m_support()));
  return l;
}

namespace detail {

// psi_j(a) for the generator family H_1..H_j:
// psi_0 = a, psi_n = (1/n) sum_{j<n} [H_{n-j}, psi_j].
class PsiTable {
 public:
  PsiTable(TorusSymbol a, const std::vector<TorusSymbol>* H, double hbar) : H_(H), hbar_(hbar) {
    psi_.push_back(std::move(a));
  }

  const TorusSymbol& get(int n) {
    while (static_cast<int>(psi_.size()) <= n) {
      const int m = static_cast<int>(psi_.size());
      TorusSymbol acc = psi_[0].like();
      for (int j = 0; j < m; ++j) acc += bracket((*H_)[m - j - 1], psi_[j], hbar_);
      acc *= 1.0 / m;
      psi_.push_back(std::move(acc));
    }
    return psi_[n];
  }

 private:
  const std::vector<TorusSymbol>* H_;
  double hbar_;
  std::vector<TorusSymbol> psi_;
};

inline void split_order(LindstedtSeries& s, const TorusSymbol& rhs) {
  CohomologicalSolution sol = solve_cohomological(rhs, s.omega);
  s.H.push_back(std::move(sol.F));
  s.Rprime.push_back(std::move(sol.avg));
}

}  // namespace detail

// Order n right-hand side: rhs_1 = V and, for n >= 2,
// rhs_n = psi_{n-1}(V - R'_1) - sum_{m=2}^{n-1} psi_{n-m}(R'_m);
// R'_n = <rhs_n>, {L_omega, H_n} = rhs_n - R'_n.
inline LindstedtSeries lindstedt_terms(const TorusSymbol& V0, const FrequencyVector& omega, double hbar, int N) {
  if (N < 1 || N > 8) throw ValidationError("orders must be in 1..8");
  if (hbar < 0 || hbar > 1) throw ParameterRangeError("hbar must lie in [0, 1]");
  TorusSymbol V = V0;
  V.set_limits(series_limits(V0, N));
  LindstedtSeries s;
  s.hbar = hbar;
  s.omega = omega;
  s.H.reserve(N);
  detail::split_order(s, V);
  if (N == 1) return s;
  detail::PsiTable base(V - s.Rn(1), &s.H, hbar);
  std::vector<detail::PsiTable> counter;
  for (int n = 2; n <= N; ++n) {
    if (n >= 3) counter.emplace_back(s.Rn(n - 1), &s.H, hbar);  // counter[m-2] holds R'_m
    TorusSymbol rhs = base.get(n - 1);
    for (int m = 2; m <= n - 1; ++m) rhs -= counter[m - 2].get(n - m);
    detail::split_order(s, rhs);
  }
  return s;
}

// Nested commutator [H_{k_r}, ..., [H_{k_1}, a]...].
inline TorusSymbol nested_commutator(const std::vector<TorusSymbol>& H, const std::vector<int>& ks,
                                     const TorusSymbol& a, double hbar) {
  TorusSymbol r = a;
  for (int k : ks) r = bracket(H[k - 1], r, hbar);
  return r;
}

// psi_j(a) from the closed form sum over compositions of j of
// c_{k_1..k_r} [H_{k_r}, ..., [H_{k_1}, a]...].
inline TorusSymbol psi_closed_form(const std::vector<TorusSymbol>& H, int j, const TorusSymbol& a, double hbar) {
  if (j == 0) return a;
  TorusSymbol r = a.like();
  for (auto& ks : compositions(j)) {
    TorusSymbol term = nested_commutator(H, ks, a, hbar);
    term *= to_double(composition_coefficient(ks));
    r += term;
  }
  return r;
}

// Right-hand side of order n rebuilt from the composition sums.
inline TorusSymbol rhs_closed_form(const LindstedtSeries& s, const TorusSymbol& V, int n) {
  if (n == 1) return V;
  TorusSymbol r = psi_closed_form(s.H, n - 1, V - s.Rn(1), s.hbar);
  for (int m = 2; m <= n - 1; ++m) r -= psi_closed_form(s.H, n - m, s.Rn(m), s.hbar);
  return r;
}

// ||{L_omega, H_n} - (rhs_n - R'_n)||_0 with rhs_n from the closed form.
inline double cohomological_residual(const LindstedtSeries& s, const TorusSymbol& V, int n) {
  TorusSymbol lhs = transport_derivative(s.omega, s.Hn(n));
  TorusSymbol target = rhs_closed_form(s, V, n) - s.Rn(n);
  return analytic_norm(lhs - target, 0);
}

// R(t) = sum_n (t^n / n) R'_n.
inline TorusSymbol counterterm(const LindstedtSeries& s, double t) {
  if (s.Rprime.empty()) throw ValidationError("empty series");
  TorusSymbol R = s.Rprime[0].like();
  double tn = 1;
  for (int n = 1; n <= s.orders(); ++n) {
    tn *= t;
    R += (tn / n) * s.Rn(n);
  }
  return R;
}

// H(t) = sum_n t^{n-1} H_n.
inline TorusSymbol generator_at(const LindstedtSeries& s, double t) {
  TorusSymbol h = s.H[0].like();
  double tn = 1;
  for (int n = 1; n <= s.orders(); ++n) {
    h += tn * s.Hn(n);
    tn *= t;
  }
  return h;
}

struct NormGrowthRow {
  int n = 0;
  double h_norm = 0;
  double r_norm = 0;
  double h_root = 0;   // ||H_n||^{1/n}
  double r_root = 0;   // ||R'_n||^{1/n}
  double h_ratio = 0;  // ||H_n||^{1/n} / ||V||_{s0}
};

struct NormGrowthReport {
  std::vector<NormGrowthRow> rows;
  double v_norm = 0;
  double empirical_C = 0;
};

inline NormGrowthReport norm_growth_report(const LindstedtSeries& s, const TorusSymbol& V, double s0, double sigma) {
  if (!(sigma < s0) || sigma < 0) throw ParameterRangeError("norm report needs 0 <= sigma < s0");
  NormGrowthReport rep;
  rep.v_norm = analytic_norm(V, s0);
  for (int n = 1; n <= s.orders(); ++n) {
    NormGrowthRow row{n, analytic_norm(s.Hn(n), s0 - sigma), analytic_norm(s.Rn(n), s0 - sigma)};
    row.h_root = std::pow(row.h_norm, 1.0 / n);
    row.r_root = std::pow(row.r_norm, 1.0 / n);
    row.h_ratio = rep.v_norm > 0 ? row.h_root / rep.v_norm : 0;
    rep.empirical_C = std::max(rep.empirical_C, row.h_ratio);
    rep.rows.push_back(row);
  }
  return rep;
}

// Largest t = t_max 2^{-j} (j < steps) with residual(t) <= threshold, or 0.
inline double select_epsilon(const std::function<double(double)>& residual, double t_max, double threshold,
                             int steps = 20) {
  double t = t_max;
  for (int j = 0; j < steps; ++j, t *= 0.5)
    if (residual(t) <= threshold) return t;
  return 0;
}

}  // namespace qkam
