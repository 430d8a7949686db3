#pragma once

#include <cmath>
#include <vector>

#include "qkam/trees/index_set.hpp"
#include "qkam/weyl/moyal.hpp"

namespace qkam {

// w = (k, eta) in Z^d x R^d.
struct FourierWeight {
  IntVec k{};
  std::array<double, kMaxDim> eta{};

  static FourierWeight from_mode(const Mode& w, double mu) {
    FourierWeight f{w.k};
    for (int i = 0; i < kMaxDim; ++i) f.eta[i] = mu * w.m[i];
    return f;
  }

  FourierWeight& operator+=(const FourierWeight& o) {
    k = k + o.k;
    for (int i = 0; i < kMaxDim; ++i) eta[i] += o.eta[i];
    return *this;
  }
  friend FourierWeight operator+(FourierWeight a, const FourierWeight& b) { return a += b; }

  double norm() const {
    double e = 0;
    for (double x : eta) e += x * x;
    return norm2(k) + std::sqrt(e);
  }
};

// {w, w'} = k.eta' - k'.eta
inline double pairing(const FourierWeight& a, const FourierWeight& b) {
  double s = 0;
  for (int i = 0; i < kMaxDim; ++i) s += a.k[i] * b.eta[i] - b.k[i] * a.eta[i];
  return s;
}

inline double sigma1(const FourierWeight& a, const FourierWeight& b, double hbar) {
  return sigma1_from_pairing(pairing(a, b), hbar);
}

// sigma^j(w, w1..wj) = sigma^{j-1}(w, w1..w_{j-1}) sigma^1(w + w1 + ... + w_{j-1}, w_j).
inline double sigma_weight(const FourierWeight& w, const std::vector<FourierWeight>& args, double hbar) {
  double r = 1;
  FourierWeight acc = w;
  for (auto& a : args) {
    r *= sigma1(acc, a, hbar);
    acc += a;
  }
  return r;
}

namespace detail {

inline FourierWeight branch_sum(const TreeIndexSet& t, const std::vector<FourierWeight>& ws, int c) {
  FourierWeight s{};
  for (int b : t.subtree(c)) s += ws[b];
  return s;
}

inline double sigma_tree_at(const TreeIndexSet& t, const std::vector<FourierWeight>& ws, int node, double hbar) {
  const auto& ch = t.children(node);
  std::vector<FourierWeight> sums;
  double r = 1;
  for (int c : ch) {
    sums.push_back(branch_sum(t, ws, c));
    r *= sigma_tree_at(t, ws, c, hbar);
  }
  return r * sigma_weight(ws[node], sums, hbar);
}

}  // namespace detail

// sigma(w, delta) = sigma^r(w_root, S_1, ..., S_r) prod_l sigma(w/A_l, delta/A_l),
// with A_1..A_r the root subtrees in stored order. ws is indexed by label.
inline double sigma_tree(const std::vector<FourierWeight>& ws, const TreeIndexSet& t, double hbar) {
  if (static_cast<int>(ws.size()) != t.size() + 1) throw ValidationError("need one weight per node (index 0 unused)");
  return detail::sigma_tree_at(t, ws, t.root(), hbar);
}

}  // namespace qkam
