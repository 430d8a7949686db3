#pragma once

#include <vector>

#include "qkam/trees/index_set.hpp"

namespace qkam {

// (delta, v): a tree with a Z^d weight on every node and the cumulative
// weights gamma(a) = sum_{b below a} v(b).
class DecoratedTree {
 public:
  DecoratedTree(TreeIndexSet tree, std::vector<IntVec> v, int d = 1) : tree_(std::move(tree)), d_(d) {
    if (static_cast<int>(v.size()) != tree_.size()) throw ValidationError("need one weight per node");
    v_.assign(tree_.size() + 1, IntVec{});
    for (int c = 1; c <= tree_.size(); ++c) v_[c] = v[c - 1];
    gamma_.assign(tree_.size() + 1, IntVec{});
    for (int c = 1; c <= tree_.size(); ++c) gamma_[c] = sum(tree_.subtree_mask(c));
  }

  // d = 1 convenience: scalar weights.
  static DecoratedTree scalar(const std::vector<int>& delta, const std::vector<int>& v) {
    std::vector<IntVec> w;
    for (int x : v) w.push_back({x, 0, 0});
    return DecoratedTree(TreeIndexSet(delta), w, 1);
  }

  const TreeIndexSet& tree() const { return tree_; }
  int size() const { return tree_.size(); }
  int dim() const { return d_; }
  const IntVec& v(int c) const { return v_[c]; }
  const IntVec& gamma(int c) const { return gamma_[c]; }

  IntVec sum(NodeMask s) const {
    IntVec r{};
    for (int c = 1; c <= tree_.size(); ++c)
      if (s & node_bit(c)) r = r + v_[c];
    return r;
  }

  // Nodes strictly above c (c excluded).
  NodeMask ancestors(int c) const {
    NodeMask m = 0;
    for (int p = tree_.parent(c); p; p = tree_.parent(p)) m |= node_bit(p);
    return m;
  }

 private:
  TreeIndexSet tree_;
  int d_;
  std::vector<IntVec> v_;
  std::vector<IntVec> gamma_;
};

// Calls f(B) for every nonempty antichain B contained in `pool`.
template <class F>
void for_each_antichain(const DecoratedTree& dt, NodeMask pool, F&& f) {
  std::vector<int> nodes;
  for (int c = 1; c <= dt.size(); ++c)
    if (pool & node_bit(c)) nodes.push_back(c);
  auto rec = [&](auto&& self, std::size_t i, NodeMask chosen, NodeMask blocked) -> void {
    if (i == nodes.size()) {
      if (chosen) f(chosen);
      return;
    }
    self(self, i + 1, chosen, blocked);
    const int b = nodes[i];
    if (blocked & node_bit(b)) return;
    self(self, i + 1, chosen | node_bit(b), blocked | dt.tree().subtree_mask(b) | dt.ancestors(b));
  };
  rec(rec, 0, 0, 0);
}

// Union of A(b) over b in B.
inline NodeMask down_closure(const DecoratedTree& dt, NodeMask B) {
  NodeMask m = 0;
  for (int c = 1; c <= dt.size(); ++c)
    if (B & node_bit(c)) m |= dt.tree().subtree_mask(c);
  return m;
}

}  // namespace qkam
