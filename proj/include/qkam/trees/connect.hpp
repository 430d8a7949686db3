#pragma once

#include <deque>
#include <vector>

#include "qkam/trees/index_set.hpp"

namespace qkam {

struct PositionError : ValidationError {
  using ValidationError::ValidationError;
};

// Rooted planar tree with arbitrary node ids; children listed left to right.
struct PlanarTree {
  std::vector<std::vector<int>> children;
  int root = 0;
};

inline PlanarTree planar_tree(const TreeIndexSet& t) {
  PlanarTree p;
  p.children.assign(t.size() + 1, {});
  for (int c = 1; c <= t.size(); ++c) p.children[c].assign(t.children(c).rbegin(), t.children(c).rend());
  p.root = t.root();
  return p;
}

struct Encoded {
  TreeIndexSet tree;
  std::vector<int> label;  // node id -> label in tree
};

// Level-order labelling, right to left within each level.
inline Encoded encode(const PlanarTree& p) {
  std::vector<int> order;
  std::deque<int> queue{p.root};
  while (!queue.empty()) {
    const int c = queue.front();
    queue.pop_front();
    order.push_back(c);
    const auto& ch = p.children[c];
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) queue.push_back(*it);
  }
  const int n = static_cast<int>(order.size());
  std::vector<int> label(p.children.size(), 0);
  std::vector<int> delta(n);
  for (int i = 0; i < n; ++i) {
    label[order[i]] = n - i;
    delta[n - i - 1] = static_cast<int>(p.children[order[i]].size());
  }
  return {TreeIndexSet(delta), label};
}

struct Connection {
  TreeIndexSet tree;
  std::vector<int> first_labels;   // label in the result of each node of t1 (index = t1 label)
  std::vector<int> second_labels;  // same for t2
};

// t1 attached as a new subtree of t2's root, with iota root subtrees of t2
// to its left; iota = 0 attaches from the left.
inline Connection connect(const TreeIndexSet& t1, const TreeIndexSet& t2, int iota = 0) {
  const int r = t2.delta(t2.root());
  if (iota < 0 || iota > r) throw PositionError("connection position out of range");
  const int n1 = t1.size(), n2 = t2.size();
  PlanarTree p;
  p.children.assign(n1 + n2 + 1, {});
  // ids 1..n2 are t2's labels, n2+1..n2+n1 are t1's labels shifted by n2
  PlanarTree p2 = planar_tree(t2), p1 = planar_tree(t1);
  for (int c = 1; c <= n2; ++c) p.children[c] = p2.children[c];
  for (int c = 1; c <= n1; ++c)
    for (int ch : p1.children[c]) p.children[n2 + c].push_back(n2 + ch);
  auto& top = p.children[t2.root()];
  top.insert(top.begin() + iota, n2 + t1.root());
  p.root = t2.root();
  Encoded e = encode(p);
  Connection out{e.tree, std::vector<int>(n1 + 1, 0), std::vector<int>(n2 + 1, 0)};
  for (int c = 1; c <= n1; ++c) out.first_labels[c] = e.label[n2 + c];
  for (int c = 1; c <= n2; ++c) out.second_labels[c] = e.label[c];
  return out;
}

// Induced tree on A(c) with its own labelling.
inline TreeIndexSet subtree_at(const TreeIndexSet& t, int c) {
  PlanarTree p = planar_tree(t);
  p.root = c;
  return encode(p).tree;
}

}  // namespace qkam
