#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "qkam/trees/index_set.hpp"
#include "qkam/trees/rational.hpp"

namespace qkam {

// c_{k1..kj} = prod_i 1/(k1+...+ki).
inline Rational composition_coefficient(const std::vector<int>& ks) {
  if (ks.empty()) throw ValidationError("composition must be nonempty");
  Rational r = 1;
  long long partial = 0;
  for (int k : ks) {
    if (k <= 0) throw ValidationError("composition entries must be positive");
    partial += k;
    r /= partial;
  }
  return r;
}

// Sum of c over all j! orderings of ks against prod 1/k_i.
inline bool permutation_sum_check(const std::vector<int>& ks) {
  if (ks.size() > 8) throw ValidationError("permutation_sum_check supports j <= 8");
  std::vector<int> idx(ks.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rational sum = 0;
  std::vector<int> perm(ks.size());
  do {
    for (std::size_t i = 0; i < idx.size(); ++i) perm[i] = ks[idx[i]];
    sum += composition_coefficient(perm);
  } while (std::next_permutation(idx.begin(), idx.end()));
  Rational prod = 1;
  for (int k : ks) prod /= k;
  return sum == prod;
}

// (1/l1) c_{ls0} = c_{ls0, l1} + (1/l1) c_{ls0 with its last entry raised by l1}.
inline bool jacobi_coefficient_check(int l1, const std::vector<int>& ls0) {
  if (l1 <= 0 || ls0.empty()) throw ValidationError("jacobi_coefficient_check needs l1 > 0 and nonempty ls0");
  std::vector<int> appended = ls0;
  appended.push_back(l1);
  std::vector<int> merged = ls0;
  merged.back() += l1;
  const Rational lhs = composition_coefficient(ls0) / l1;
  const Rational rhs = composition_coefficient(appended) + composition_coefficient(merged) / l1;
  return lhs == rhs;
}

// All compositions of n, in lexicographic order.
inline std::vector<std::vector<int>> compositions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int left) -> void {
    if (left == 0) {
      out.push_back(cur);
      return;
    }
    for (int k = 1; k <= left; ++k) {
      cur.push_back(k);
      self(self, left - k);
      cur.pop_back();
    }
  };
  if (n > 0) rec(rec, n);
  return out;
}

// c(delta) = c_{k1..kr} c(delta/A_1)...c(delta/A_r), where A_1..A_r are the
// root subtrees in stored order (rightmost first) and k_i = #A_i.
inline Rational coefficient_c(const TreeIndexSet& t, int node) {
  const auto& ch = t.children(node);
  if (ch.empty()) return 1;
  std::vector<int> ks;
  Rational r = 1;
  for (int c : ch) {
    ks.push_back(t.subtree_size(c));
    r *= coefficient_c(t, c);
  }
  return composition_coefficient(ks) * r;
}

inline Rational coefficient_c(const TreeIndexSet& t) { return coefficient_c(t, t.root()); }

}  // namespace qkam
