#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "qkam/core.hpp"

namespace qkam {

struct InvalidDeltaError : ValidationError {
  using ValidationError::ValidationError;
};

using NodeMask = std::uint32_t;

inline constexpr int kMaxTreeNodes = 30;

inline NodeMask node_bit(int c) { return NodeMask{1} << (c - 1); }

inline std::string delta_string(const std::vector<int>& delta) {
  std::string s = "(";
  for (std::size_t i = 0; i < delta.size(); ++i) s += (i ? "," : "") + std::to_string(delta[i]);
  return s + ")";
}

// Membership in Delta(n): sum delta = n-1 and every proper suffix sum
// sum_{i >= j} delta_i >= n-j+1.
inline bool is_delta(const std::vector<int>& delta) {
  const int n = static_cast<int>(delta.size());
  if (n < 1) return false;
  for (int x : delta)
    if (x < 0) return false;
  if (std::accumulate(delta.begin(), delta.end(), 0) != n - 1) return false;
  int suffix = 0;
  for (int j = n; j >= 2; --j) {
    suffix += delta[j - 1];
    if (suffix < n - j + 1) return false;
  }
  return true;
}

// delta in Delta(n) together with the planar tree it encodes. Nodes are
// labelled 1..n, the root is n, and labels are handed out level by level,
// from the right to the left, so each child list is stored right-to-left
// (decreasing labels).
class TreeIndexSet {
 public:
  TreeIndexSet() : TreeIndexSet(std::vector<int>{0}) {}

  explicit TreeIndexSet(std::vector<int> delta) : delta_(std::move(delta)) {
    if (!is_delta(delta_)) throw InvalidDeltaError("not an element of Delta(n): " + delta_string(delta_));
    const int n = size();
    if (n > kMaxTreeNodes) throw ValidationError("tree too large");
    parent_.assign(n + 1, 0);
    children_.assign(n + 1, {});
    depth_.assign(n + 1, 0);
    int next = n - 1;
    for (int c = n; c >= 1; --c) {
      for (int i = 0; i < delta_[c - 1]; ++i) {
        const int child = next--;
        parent_[child] = c;
        depth_[child] = depth_[c] + 1;
        children_[c].push_back(child);
      }
    }
    mask_.assign(n + 1, 0);
    for (int c = 1; c <= n; ++c) mask_[c] |= node_bit(c);
    for (int c = 1; c <= n; ++c)
      for (int p = parent_[c]; p; p = parent_[p]) mask_[p] |= node_bit(c);
  }

  int size() const { return static_cast<int>(delta_.size()); }
  int root() const { return size(); }
  const std::vector<int>& delta() const { return delta_; }
  int delta(int c) const { return delta_[c - 1]; }
  int parent(int c) const { return parent_[c]; }
  const std::vector<int>& children(int c) const { return children_[c]; }
  int depth(int c) const { return depth_[c]; }

  // A(c) = {b : b precedes or equals c}, as a bit mask.
  NodeMask subtree_mask(int c) const { return mask_[c]; }
  NodeMask all_mask() const { return mask_[root()]; }

  std::vector<int> subtree(int c) const {
    std::vector<int> out;
    for (int b = 1; b <= size(); ++b)
      if (mask_[c] & node_bit(b)) out.push_back(b);
    return out;
  }

  int subtree_size(int c) const { return std::popcount(mask_[c]); }

  // b precedes-or-equals c.
  bool below(int b, int c) const { return (mask_[c] & node_bit(b)) != 0; }

  int diameter() const {
    int d = 0;
    for (int c = 1; c <= size(); ++c) d = std::max(d, depth_[c]);
    return d;
  }

  // upsilon_l: delta values of the nodes at distance l from the root, in
  // increasing label order.
  std::vector<std::vector<int>> level_vectors() const {
    std::vector<std::vector<int>> lv(diameter() + 1);
    for (int c = 1; c <= size(); ++c) lv[depth_[c]].push_back(delta_[c - 1]);
    return lv;
  }

  friend bool operator==(const TreeIndexSet& a, const TreeIndexSet& b) { return a.delta_ == b.delta_; }

 private:
  std::vector<int> delta_;
  std::vector<int> parent_;
  std::vector<std::vector<int>> children_;
  std::vector<int> depth_;
  std::vector<NodeMask> mask_;
};

inline TreeIndexSet tree_order(const std::vector<int>& delta) { return TreeIndexSet(delta); }

inline std::vector<int> concatenate_levels(const std::vector<std::vector<int>>& levels) {
  std::vector<int> out;
  for (auto it = levels.rbegin(); it != levels.rend(); ++it) out.insert(out.end(), it->begin(), it->end());
  return out;
}

// Depth-first generation of children-count sequences, filled from delta_n
// downward; the suffix-sum constraint prunes as we go.
inline std::vector<TreeIndexSet> enumerate_delta(int n) {
  if (n < 1 || n > 12) throw ValidationError("enumerate_delta supports 1 <= n <= 12");
  std::vector<TreeIndexSet> out;
  std::vector<int> delta(n, 0);
  auto rec = [&](auto&& self, int pos, int suffix) -> void {
    // pos is the 1-based label being filled; suffix = sum of delta_{pos+1..n}
    if (pos == 1) {
      const int last = n - 1 - suffix;
      if (last < 0) return;
      delta[0] = last;
      out.emplace_back(delta);
      return;
    }
    const int need = n - pos + 1;  // sum_{i >= pos} delta_i >= n-pos+1
    for (int v = std::max(0, need - suffix); suffix + v <= n - 1; ++v) {
      delta[pos - 1] = v;
      self(self, pos - 1, suffix + v);
    }
  };
  if (n == 1) {
    out.emplace_back(std::vector<int>{0});
    return out;
  }
  rec(rec, n, 0);
  return out;
}

// Same planar tree labelled in post-order (left subtrees first), the
// labelling under which every subtree A(c) is an interval of labels.
inline std::vector<int> postorder_delta(const TreeIndexSet& t) {
  std::vector<int> out;
  auto visit = [&](auto&& self, int c) -> void {
    const auto& ch = t.children(c);
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) self(self, *it);
    out.push_back(t.delta(c));
  };
  visit(visit, t.root());
  return out;
}

// Parent map (index 0 unused) of a post-order encoded delta, via a stack.
inline std::vector<int> postorder_parents(const std::vector<int>& delta) {
  if (!is_delta(delta)) throw InvalidDeltaError("not an element of Delta(n): " + delta_string(delta));
  const int n = static_cast<int>(delta.size());
  std::vector<int> parent(n + 1, 0), stack;
  for (int c = 1; c <= n; ++c) {
    for (int i = 0; i < delta[c - 1]; ++i) {
      parent[stack.back()] = c;
      stack.pop_back();
    }
    stack.push_back(c);
  }
  return parent;
}

// Conditions of the ordering lemma for a parent map: (2) d below c => d < c;
// (3) d below c and d < e < c => e below c.
inline bool satisfies_interval_order(const std::vector<int>& parent) {
  const int n = static_cast<int>(parent.size()) - 1;
  auto below = [&](int d, int c) {
    for (int p = parent[d]; p; p = parent[p])
      if (p == c) return true;
    return false;
  };
  for (int c = 1; c <= n; ++c)
    for (int d = 1; d <= n; ++d) {
      if (!below(d, c)) continue;
      if (d >= c) return false;
      for (int e = d + 1; e < c; ++e)
        if (!below(e, c)) return false;
    }
  return true;
}

}  // namespace qkam
