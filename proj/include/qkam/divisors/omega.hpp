#pragma once

#include <unordered_map>
#include <utility>

#include "qkam/divisors/decorated_tree.hpp"
#include "qkam/divisors/field.hpp"

namespace qkam {

template <class V>
struct OmegaPair {
  V omega1{};
  V omega2{};
};

// Omega_1, Omega_2 by recursion over root subtrees. A subproblem is a node r
// together with a top-closed set S of A(r) (r in S, closed under going up to
// r); S = A(r) is the plain subtree, smaller S arise as complements
// A(r) \ A(B) of root resonances.
template <class Arith>
class OmegaRecursion {
 public:
  using Value = typename Arith::Value;

  OmegaRecursion(const DecoratedTree& dt, Arith arith) : dt_(dt), ar_(std::move(arith)) {}

  OmegaPair<Value> operator()() { return eval(dt_.tree().root(), dt_.tree().all_mask()); }

  OmegaPair<Value> eval(int r, NodeMask S) {
    const std::uint64_t key = (static_cast<std::uint64_t>(r) << 32) | S;
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    Value prod = Arith::one();
    for (int c : dt_.tree().children(r))
      if (S & node_bit(c)) prod *= eval(c, S & dt_.tree().subtree_mask(c)).omega1;

    Value res = Arith::zero();
    for_each_antichain(dt_, S & ~node_bit(r), [&](NodeMask B) {
      const NodeMask rest = S & ~down_closure(dt_, B);
      if (!is_zero(dt_.sum(rest))) return;
      Value term = eval(r, rest).omega2;
      for (int b = 1; b <= dt_.size(); ++b)
        if (B & node_bit(b)) term *= eval(b, S & dt_.tree().subtree_mask(b)).omega1;
      res += term;
    });

    OmegaPair<Value> out{Arith::zero(), Arith::zero()};
    const IntVec sigma = dt_.sum(S);
    if (is_zero(sigma))
      out.omega2 = prod - res;
    else
      out.omega1 = ar_.inv_i_dot(sigma) * (prod - res);
    memo_.emplace(key, out);
    return out;
  }

 private:
  const DecoratedTree& dt_;
  Arith ar_;
  std::unordered_map<std::uint64_t, OmegaPair<Value>> memo_;
};

inline OmegaPair<Complex> omega_recursive(const DecoratedTree& dt, const FrequencyVector& omega) {
  if (omega.dim() != dt.dim()) throw ValidationError("frequency and weight dimensions differ");
  return OmegaRecursion<ComplexArithmetic>(dt, ComplexArithmetic{omega})();
}

inline OmegaPair<GaussianRational> omega_recursive_exact(const DecoratedTree& dt, const Rational& omega) {
  if (dt.dim() != 1) throw ValidationError("exact Omega mode needs d = 1");
  return OmegaRecursion<ExactArithmetic>(dt, ExactArithmetic{omega})();
}

}  // namespace qkam
