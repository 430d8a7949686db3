#pragma once

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <set>
#include <tuple>
#include <vector>

#include "qkam/divisors/decorated_tree.hpp"
#include "qkam/divisors/field.hpp"

namespace qkam {

// (B, a): B an antichain strictly below a whose complement
// members = A(a) \ A(B) has zero total weight.
struct Resonance {
  int a = 0;
  NodeMask B = 0;
  NodeMask members = 0;
  NodeMask support = 0;  // ]b_1,a[ u ... u ]b_r,a[

  friend bool operator==(const Resonance& x, const Resonance& y) { return x.a == y.a && x.B == y.B; }
  friend bool operator<(const Resonance& x, const Resonance& y) { return std::tie(x.a, x.B) < std::tie(y.a, y.B); }
};

inline std::vector<int> mask_nodes(NodeMask m) {
  std::vector<int> out;
  for (int c = 1; m; ++c, m >>= 1)
    if (m & 1) out.push_back(c);
  return out;
}

inline Resonance make_resonance(const DecoratedTree& dt, int a, NodeMask B) {
  Resonance R{a, B};
  const NodeMask below_B = down_closure(dt, B);
  R.members = dt.tree().subtree_mask(a) & ~below_B;
  for (int c = 1; c <= dt.size(); ++c) {
    if (c == a || !(R.members & node_bit(c))) continue;
    if (dt.tree().subtree_mask(c) & B) R.support |= node_bit(c);
  }
  return R;
}

inline std::vector<Resonance> enumerate_resonances(const DecoratedTree& dt) {
  std::vector<Resonance> out;
  for (int a = 1; a <= dt.size(); ++a) {
    for_each_antichain(dt, dt.tree().subtree_mask(a) & ~node_bit(a), [&](NodeMask B) {
      Resonance R = make_resonance(dt, a, B);
      if (is_zero(dt.sum(R.members))) out.push_back(R);
    });
  }
  return out;
}

inline bool non_overlapping(const Resonance& x, const Resonance& y) {
  const NodeMask i = x.members & y.members;
  return i == 0 || i == x.members || i == y.members;
}

struct AdmissibleFamily {
  std::vector<int> idx;         // positions in the resonance list, increasing
  std::vector<IntVec> gamma_j;  // index = node label
};

// gamma_J(c): gamma(c) off supp J; otherwise the weight of A(c) \ A(B) for
// the smallest resonance of J whose support holds c.
inline std::vector<IntVec> gamma_j(const DecoratedTree& dt, const std::vector<Resonance>& res,
                                   const std::vector<int>& family) {
  std::vector<IntVec> g(dt.size() + 1);
  for (int c = 1; c <= dt.size(); ++c) {
    const Resonance* best = nullptr;
    for (int i : family) {
      const Resonance& R = res[i];
      if (!(R.support & node_bit(c))) continue;
      if (!best || std::popcount(R.members) < std::popcount(best->members)) best = &R;
    }
    g[c] = best ? dt.sum(dt.tree().subtree_mask(c) & ~down_closure(dt, best->B)) : dt.gamma(c);
  }
  return g;
}

// Every pairwise non-overlapping family (including the empty one).
inline std::vector<std::vector<int>> non_overlapping_families(const std::vector<Resonance>& res) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == res.size()) {
      out.push_back(cur);
      return;
    }
    self(self, i + 1);
    for (int j : cur)
      if (!non_overlapping(res[j], res[i])) return;
    cur.push_back(static_cast<int>(i));
    self(self, i + 1);
    cur.pop_back();
  };
  rec(rec, 0);
  return out;
}

// Nodes in `exempt` carry no divisor and are not required to have
// gamma_J != 0 (the root, for Omega_2).
inline std::vector<AdmissibleFamily> enumerate_admissible(const DecoratedTree& dt, const std::vector<Resonance>& res,
                                                          NodeMask exempt = 0) {
  std::vector<AdmissibleFamily> out;
  for (auto& fam : non_overlapping_families(res)) {
    auto g = gamma_j(dt, res, fam);
    bool ok = true;
    for (int c = 1; c <= dt.size(); ++c) ok = ok && ((exempt & node_bit(c)) || !is_zero(g[c]));
    if (ok) out.push_back({fam, std::move(g)});
  }
  return out;
}

inline std::vector<AdmissibleFamily> enumerate_admissible(const DecoratedTree& dt, NodeMask exempt = 0) {
  return enumerate_admissible(dt, enumerate_resonances(dt), exempt);
}

template <class Arith>
typename Arith::Value family_term(const DecoratedTree& dt, const AdmissibleFamily& f, const Arith& ar, int sign_exp,
                                  NodeMask exempt = 0) {
  auto term = (sign_exp % 2) ? -Arith::one() : Arith::one();
  for (int c = 1; c <= dt.size(); ++c)
    if (!(exempt & node_bit(c))) term *= ar.inv_i_dot(f.gamma_j[c]);
  return term;
}

template <class Arith>
typename Arith::Value omega1_resonance_sum(const DecoratedTree& dt, const Arith& ar) {
  auto total = Arith::zero();
  for (auto& f : enumerate_admissible(dt)) total += family_term(dt, f, ar, static_cast<int>(f.idx.size()));
  return total;
}

inline Complex omega1_resonance_sum(const DecoratedTree& dt, const FrequencyVector& omega) {
  return omega1_resonance_sum(dt, ComplexArithmetic{omega});
}

// Omega_2 for a zero-sum root: the same sum without the root divisor.
template <class Arith>
typename Arith::Value omega2_resonance_sum(const DecoratedTree& dt, const Arith& ar) {
  auto total = Arith::zero();
  if (!is_zero(dt.gamma(dt.size()))) return total;
  const NodeMask root = node_bit(dt.size());
  for (auto& f : enumerate_admissible(dt, root)) total += family_term(dt, f, ar, static_cast<int>(f.idx.size()), root);
  return total;
}

// ---- equivalence classes of admissible families --------------------------

// Q is held between two members R_i, R_k of J with the same top node,
// R_i subset Q subset R_k and B_k subset C subset B_i.
inline bool sandwiched(const Resonance& Q, const std::vector<Resonance>& res, const std::vector<int>& J) {
  for (int i : J)
    for (int k : J) {
      const Resonance& Ri = res[i];
      const Resonance& Rk = res[k];
      if (Ri.a != Q.a || Rk.a != Q.a) continue;
      const bool members_ok = (Ri.members & ~Q.members) == 0 && (Q.members & ~Rk.members) == 0;
      const bool b_ok = (Rk.B & ~Q.B) == 0 && (Q.B & ~Ri.B) == 0;
      if (members_ok && b_ok) return true;
    }
  return false;
}

inline bool equivalent(const std::vector<Resonance>& res, const std::vector<int>& J1, const std::vector<int>& J2) {
  auto side = [&](const std::vector<int>& X, const std::vector<int>& Y) {
    for (int q : X)
      if (!std::binary_search(Y.begin(), Y.end(), q) && !sandwiched(res[q], res, Y)) return false;
    return true;
  };
  return side(J2, J1) && side(J1, J2);
}

struct FamilyClass {
  std::vector<int> members;  // positions in the admissible list
  int minimal = -1;          // position of the minimal representative, -1 if absent
  int kappa = 0;             // largest family size in the class
};

struct ClassPartition {
  std::vector<Resonance> resonances;
  std::vector<AdmissibleFamily> admissible;
  std::vector<FamilyClass> classes;
  bool transitive = true;          // the relation closed up to an equivalence without adding pairs
  bool gamma_constant = true;      // gamma_J agrees across each class
};

inline ClassPartition partition_admissible(const DecoratedTree& dt, NodeMask exempt = 0) {
  ClassPartition P;
  P.resonances = enumerate_resonances(dt);
  P.admissible = enumerate_admissible(dt, P.resonances, exempt);
  const int m = static_cast<int>(P.admissible.size());
  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (equivalent(P.resonances, P.admissible[i].idx, P.admissible[j].idx)) parent[find(i)] = find(j);
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < m; ++i) groups[find(i)].push_back(i);
  for (auto& [root, g] : groups) {
    FamilyClass cls{g};
    std::vector<int> inter = P.admissible[g.front()].idx;
    for (int i : g) {
      std::vector<int> tmp;
      const auto& x = P.admissible[i].idx;
      std::set_intersection(inter.begin(), inter.end(), x.begin(), x.end(), std::back_inserter(tmp));
      inter = std::move(tmp);
      cls.kappa = std::max(cls.kappa, static_cast<int>(x.size()));
    }
    for (int i : g)
      if (P.admissible[i].idx == inter) cls.minimal = i;
    for (int i : g)
      for (int j : g) {
        if (i < j && !equivalent(P.resonances, P.admissible[i].idx, P.admissible[j].idx)) P.transitive = false;
      }
    for (int i : g)
      if (P.admissible[i].gamma_j != P.admissible[g.front()].gamma_j) P.gamma_constant = false;
    P.classes.push_back(std::move(cls));
  }
  return P;
}

template <class Arith>
typename Arith::Value omega1_class_sum(const DecoratedTree& dt, const ClassPartition& P, const Arith& ar) {
  auto total = Arith::zero();
  for (auto& cls : P.classes) {
    if (cls.minimal < 0) throw NumericalError("equivalence class without a minimal representative");
    total += family_term(dt, P.admissible[cls.minimal], ar, cls.kappa);
  }
  return total;
}

inline Complex omega1_class_sum(const DecoratedTree& dt, const FrequencyVector& omega) {
  return omega1_class_sum(dt, partition_admissible(dt), ComplexArithmetic{omega});
}

inline int rho(const DecoratedTree& dt, NodeMask exempt = 0) {
  return static_cast<int>(partition_admissible(dt, exempt).classes.size());
}

// sum over J in a class of (-1)^{#J} when the families are {R0} u S u {R^0}
// with S ranging over chains of an intermediate layered poset; checked
// through the closed form 1 + sum_j sum (-1)^j multinomial = (-1)^k.
inline bool chain_sign_identity(int k) {
  BigInt total = 1;
  std::vector<int> parts;
  std::vector<BigInt> fact(k + 2, 1);
  for (int i = 1; i <= k + 1; ++i) fact[i] = fact[i - 1] * i;
  auto rec = [&](auto&& self, int used) -> void {
    if (!parts.empty()) {
      BigInt mult = fact[k + 1];
      for (int p : parts) mult /= fact[p];
      mult /= fact[k + 1 - used];
      total += (parts.size() % 2 ? -mult : mult);
    }
    for (int p = 1; used + p <= k; ++p) {
      parts.push_back(p);
      self(self, used + p);
      parts.pop_back();
    }
  };
  rec(rec, 0);
  return total == (k % 2 ? -1 : 1);
}

// ---- the map T ----------------------------------------------------------

struct TImage {
  NodeMask alternating = 0;
  NodeMask minimal_union = 0;
  NodeMask maximal_union = 0;
  friend auto operator<=>(const TImage&, const TImage&) = default;
};

// Layers I_1 (maximal resonances), I_2 (maximal among the rest), ...;
// T = ((U I_1 \ U I_2) u U I_3) \ U I_4 ...
inline TImage tmap(const std::vector<Resonance>& res, const std::vector<int>& J) {
  TImage t;
  if (J.empty()) return t;
  auto strictly_inside = [&](int x, int y) {
    return res[x].members != res[y].members && (res[x].members & ~res[y].members) == 0;
  };
  std::vector<int> rest = J;
  int layer = 0;
  while (!rest.empty()) {
    std::vector<int> top, keep;
    for (int x : rest) {
      bool maximal = true;
      for (int y : rest)
        if (y != x && strictly_inside(x, y)) maximal = false;
      (maximal ? top : keep).push_back(x);
    }
    NodeMask u = 0;
    for (int x : top) u |= res[x].members;
    if (layer == 0) t.maximal_union = u;
    t.alternating = (layer % 2 == 0) ? (t.alternating | u) : (t.alternating & ~u);
    rest = std::move(keep);
    ++layer;
  }
  for (int x : J) {
    bool minimal = true;
    for (int y : J)
      if (y != x && strictly_inside(y, x)) minimal = false;
    if (minimal) t.minimal_union |= res[x].members;
  }
  return t;
}

// ---- maximal covering decomposition -------------------------------------

struct NotDecomposableError : ValidationError {
  using ValidationError::ValidationError;
};

struct CoveringDecomposition {
  std::vector<Resonance> parts;
  int alternatives = 0;  // number of distinct maximal covers found
};

namespace detail {

// All partitions of `target` into member sets drawn from `pool`.
inline void partitions_into(const std::vector<Resonance>& pool, NodeMask target, std::vector<int>& cur,
                            std::vector<std::vector<int>>& out, std::size_t limit) {
  if (out.size() >= limit) return;
  if (target == 0) {
    out.push_back(cur);
    return;
  }
  const NodeMask low = target & (~target + 1);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const NodeMask m = pool[i].members;
    if (!(m & low) || (m & ~target)) continue;
    cur.push_back(static_cast<int>(i));
    partitions_into(pool, target & ~m, cur, out, limit);
    cur.pop_back();
  }
}

}  // namespace detail

// Splits B into disjoint resonances none of which is itself a disjoint union
// of two or more resonances.
inline CoveringDecomposition maximal_covering_decomposition(const DecoratedTree& dt, NodeMask B) {
  const auto all = enumerate_resonances(dt);
  std::vector<Resonance> inside;
  for (auto& R : all)
    if ((R.members & ~B) == 0) inside.push_back(R);
  std::vector<Resonance> irreducible;
  for (auto& R : inside) {
    std::vector<Resonance> smaller;
    for (auto& Q : inside)
      if (Q.members != R.members && (Q.members & ~R.members) == 0) smaller.push_back(Q);
    std::vector<int> cur;
    std::vector<std::vector<int>> found;
    detail::partitions_into(smaller, R.members, cur, found, 1);
    if (found.empty()) irreducible.push_back(R);
  }
  std::vector<int> cur;
  std::vector<std::vector<int>> covers;
  detail::partitions_into(irreducible, B, cur, covers, 1000);
  if (covers.empty()) throw NotDecomposableError("node set admits no covering by disjoint resonances");
  std::set<std::vector<int>> distinct;
  for (auto c : covers) {
    std::sort(c.begin(), c.end());
    distinct.insert(c);
  }
  CoveringDecomposition out;
  for (int i : *distinct.begin()) out.parts.push_back(irreducible[i]);
  out.alternatives = static_cast<int>(distinct.size());
  return out;
}

}  // namespace qkam
