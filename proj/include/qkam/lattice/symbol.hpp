#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "qkam/core.hpp"
#include "qkam/lattice/frequency.hpp"

namespace qkam {

// Lattice index of e^{ik.x} e^{i(2 pi m / L).xi}.
struct Mode {
  IntVec k{};
  IntVec m{};
  friend auto operator<=>(const Mode&, const Mode&) = default;
};

inline Mode operator+(const Mode& a, const Mode& b) { return {a.k + b.k, a.m + b.m}; }
inline Mode operator-(const Mode& a) { return {-a.k, -a.m}; }

struct SymbolLimits {
  int k_max = 64;
  int m_max = 64;
  double drop_tol = 1e-16;  // relative to the largest coefficient
};

// a(x, xi) = sum c_{k,m} e^{ik.x} e^{i mu m.xi},  mu = 2 pi / L.
class TorusSymbol {
 public:
  using Map = std::map<Mode, Complex>;

  TorusSymbol() : TorusSymbol(1) {}
  explicit TorusSymbol(int d, double L = kTwoPi, SymbolLimits limits = {})
      : d_(d), L_(L), limits_(limits) {
    if (d < 1 || d > kMaxDim) throw ValidationError("symbol dimension must be 1..3");
    if (!(L > 0)) throw ValidationError("xi-period must be positive");
  }

  static TorusSymbol constant(int d, double L, Complex c) {
    TorusSymbol a(d, L);
    a.add({}, c);
    return a;
  }

  static TorusSymbol monomial(int d, double L, IntVec k, IntVec m, Complex c) {
    TorusSymbol a(d, L);
    a.add({k, m}, c);
    return a;
  }

  int dim() const { return d_; }
  double period() const { return L_; }
  double mu() const { return kTwoPi / L_; }
  const SymbolLimits& limits() const { return limits_; }
  void set_limits(const SymbolLimits& l) { limits_ = l; }
  const Map& coeffs() const { return c_; }
  std::size_t size() const { return c_.size(); }
  bool empty() const { return c_.empty(); }
  double truncation_tail() const { return tail_; }
  void add_tail(double t) { tail_ += t; }

  Complex operator[](const Mode& w) const {
    auto it = c_.find(w);
    return it == c_.end() ? Complex{} : it->second;
  }

  bool in_box(const Mode& w) const {
    return norm_inf(w.k) <= limits_.k_max && norm_inf(w.m) <= limits_.m_max;
  }

  // Accumulates c at w. Modes outside the cap box are dropped and their
  // s = 0 weight is added to the truncation tail.
  void add(const Mode& w, Complex c) {
    if (c == Complex{}) return;
    if (!in_box(w)) {
      tail_ += std::abs(c);
      return;
    }
    c_[w] += c;
  }

  void set(const Mode& w, Complex c) {
    if (c == Complex{}) {
      c_.erase(w);
      return;
    }
    c_[w] = c;
  }

  void prune() {
    double big = 0;
    for (auto& [w, c] : c_) big = std::max(big, std::abs(c));
    const double cut = limits_.drop_tol * big;
    std::erase_if(c_, [&](const auto& e) { return std::abs(e.second) <= cut; });
  }

  int k_support() const {
    int s = 0;
    for (auto& [w, c] : c_) s = std::max(s, norm_inf(w.k));
    return s;
  }

  int m_support() const {
    int s = 0;
    for (auto& [w, c] : c_) s = std::max(s, norm_inf(w.m));
    return s;
  }

  double eta_norm(const IntVec& m) const { return mu() * norm2(m); }

  // |w| = |k| + |eta| with Euclidean norms, the weight used in analytic norms.
  double weight(const Mode& w) const { return norm2(w.k) + eta_norm(w.m); }

  bool is_x_independent() const {
    return std::all_of(c_.begin(), c_.end(), [](const auto& e) { return is_zero(e.first.k); });
  }

  bool is_real(double tol = 1e-12) const {
    for (auto& [w, c] : c_)
      if (std::abs(c - std::conj((*this)[-w])) > tol * std::max(1.0, std::abs(c))) return false;
    return true;
  }

  // (a + conj a)/2 in coefficient form: c_{k,m} <- (c_{k,m} + conj c_{-k,-m})/2.
  TorusSymbol real_part() const {
    TorusSymbol r = like();
    for (auto& [w, c] : c_) {
      r.add(w, 0.5 * c);
      r.add(-w, 0.5 * std::conj(c));
    }
    r.prune();
    return r;
  }

  TorusSymbol x_average() const {
    TorusSymbol r = like();
    for (auto& [w, c] : c_)
      if (is_zero(w.k)) r.c_[w] = c;
    return r;
  }

  TorusSymbol mean_free() const {
    TorusSymbol r = like();
    for (auto& [w, c] : c_)
      if (!is_zero(w.k)) r.c_[w] = c;
    return r;
  }

  // Empty symbol on the same (d, L) with the same limits.
  TorusSymbol like() const { return TorusSymbol(d_, L_, limits_); }

  Complex evaluate(std::span<const double> x, std::span<const double> xi) const {
    Complex s{};
    for (auto& [w, c] : c_) {
      double ph = 0;
      for (int i = 0; i < d_; ++i) ph += w.k[i] * x[i] + mu() * w.m[i] * xi[i];
      s += c * std::polar(1.0, ph);
    }
    return s;
  }

  // x-Fourier coefficient a^(k, xi).
  Complex x_fourier(const IntVec& k, std::span<const double> xi) const {
    Complex s{};
    auto lo = c_.lower_bound(Mode{k, {-limits_.m_max - 1, -limits_.m_max - 1, -limits_.m_max - 1}});
    for (auto it = lo; it != c_.end() && it->first.k == k; ++it) {
      double ph = 0;
      for (int i = 0; i < d_; ++i) ph += mu() * it->first.m[i] * xi[i];
      s += it->second * std::polar(1.0, ph);
    }
    return s;
  }

  void require_same_space(const TorusSymbol& o) const {
    if (d_ != o.d_ || L_ != o.L_) throw ValidationError("symbols live on different lattices");
  }

  TorusSymbol& operator+=(const TorusSymbol& o) {
    require_same_space(o);
    for (auto& [w, c] : o.c_) add(w, c);
    tail_ += o.tail_;
    prune();
    return *this;
  }

  TorusSymbol& operator-=(const TorusSymbol& o) {
    require_same_space(o);
    for (auto& [w, c] : o.c_) add(w, -c);
    tail_ += o.tail_;
    prune();
    return *this;
  }

  TorusSymbol& operator*=(Complex s) {
    if (s == Complex{}) {
      c_.clear();
      return *this;
    }
    for (auto& [w, c] : c_) c *= s;
    tail_ *= std::abs(s);
    return *this;
  }

  friend TorusSymbol operator+(TorusSymbol a, const TorusSymbol& b) { return a += b; }
  friend TorusSymbol operator-(TorusSymbol a, const TorusSymbol& b) { return a -= b; }
  friend TorusSymbol operator*(Complex s, TorusSymbol a) { return a *= s; }
  friend TorusSymbol operator*(TorusSymbol a, Complex s) { return a *= s; }
  friend TorusSymbol operator-(TorusSymbol a) { return a *= -1.0; }

 private:
  int d_ = 1;
  double L_ = kTwoPi;
  SymbolLimits limits_;
  Map c_;
  double tail_ = 0;
};

// omega.xi + periodic part. The linear part is kept exact.
struct AffineSymbol {
  FrequencyVector omega;
  TorusSymbol periodic;
};

inline double analytic_norm(const TorusSymbol& a, double s) {
  if (s < 0) throw ParameterRangeError("analytic norm needs s >= 0");
  double n = 0;
  for (auto& [w, c] : a.coeffs()) n += std::abs(c) * std::exp(s * a.weight(w));
  return n;
}

// sup |a| over T^d x R^d is bounded by the s = 0 norm; this is the max over a grid.
inline double grid_sup(const TorusSymbol& a, int samples = 64) {
  const int d = a.dim();
  double best = 0;
  std::vector<double> x(d), xi(d);
  std::vector<int> idx(2 * d, 0);
  while (true) {
    for (int i = 0; i < d; ++i) {
      x[i] = kTwoPi * idx[i] / samples;
      xi[i] = a.period() * idx[d + i] / samples;
    }
    best = std::max(best, std::abs(a.evaluate(x, xi)));
    int i = 0;
    while (i < 2 * d && idx[i] == samples - 1) idx[i++] = 0;
    if (i == 2 * d) break;
    ++idx[i];
  }
  return best;
}

}  // namespace qkam
