#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "qkam/divisors/bounds.hpp"
#include "qkam/dynamics/experiments.hpp"
#include "qkam/trees/coefficients.hpp"
#include "qkam/trees/connect.hpp"

using namespace qkam;

namespace {

using Delta = std::vector<int>;

// Brute force over {0..n-1}^n with the membership constraints.
std::set<Delta> brute_delta(int n) {
  std::set<Delta> out;
  Delta d(n, 0);
  while (true) {
    if (is_delta(d)) out.insert(d);
    int i = 0;
    while (i < n && d[i] == n - 1) d[i++] = 0;
    if (i == n) break;
    ++d[i];
  }
  return out;
}

// Catalan(n-1) from the binomial formula.
long long catalan(int m) {
  long long c = 1;
  for (int i = 0; i < m; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
  return c;
}

FourierWeight fw(int k, double eta) {
  FourierWeight w;
  w.k = {k, 0, 0};
  w.eta = {eta, 0, 0};
  return w;
}

}  // namespace

TEST(EnumerateDelta, SmallCases) {
  EXPECT_EQ(enumerate_delta(1).front().delta(), Delta({0}));
  ASSERT_EQ(enumerate_delta(2).size(), 1u);
  EXPECT_EQ(enumerate_delta(2).front().delta(), Delta({0, 1}));
  std::set<Delta> three;
  for (auto& t : enumerate_delta(3)) three.insert(t.delta());
  EXPECT_EQ(three, std::set<Delta>({{0, 0, 2}, {0, 1, 1}}));
}

TEST(EnumerateDelta, MatchesBruteForceAndCatalan) {
  for (int n = 1; n <= 7; ++n) {
    std::set<Delta> got;
    for (auto& t : enumerate_delta(n)) got.insert(t.delta());
    EXPECT_EQ(got, brute_delta(n)) << "n=" << n;
  }
  for (int n = 1; n <= 10; ++n) {
    const auto all = enumerate_delta(n);
    EXPECT_EQ(static_cast<long long>(all.size()), catalan(n - 1)) << "n=" << n;
    EXPECT_LE(static_cast<double>(all.size()), std::pow(4.0, n));
  }
  EXPECT_THROW(enumerate_delta(13), ValidationError);
}

TEST(TreeOrder, ParentMaps) {
  EXPECT_EQ(tree_order({0, 1}).parent(1), 2);
  const auto t3 = tree_order({0, 0, 2});
  EXPECT_EQ(t3.parent(1), 3);
  EXPECT_EQ(t3.parent(2), 3);
  const auto t = tree_order({0, 0, 0, 2, 2, 1});
  EXPECT_EQ(t.parent(6), 0);
  EXPECT_EQ(t.parent(5), 6);
  EXPECT_EQ(t.parent(4), 5);
  EXPECT_EQ(t.parent(3), 5);
  EXPECT_EQ(t.parent(2), 4);
  EXPECT_EQ(t.parent(1), 4);
  EXPECT_EQ(t.children(5), std::vector<int>({4, 3}));
  EXPECT_THROW(tree_order({1, 0}), InvalidDeltaError);
  EXPECT_THROW(tree_order({0, 0, 1}), InvalidDeltaError);
}

TEST(TreeOrder, ChildCountsReconstructDelta) {
  for (int n = 1; n <= 8; ++n)
    for (auto& t : enumerate_delta(n)) {
      Delta back(n);
      for (int c = 1; c <= n; ++c) {
        back[c - 1] = static_cast<int>(t.children(c).size());
        if (c != n) EXPECT_LT(c, t.parent(c));
      }
      EXPECT_EQ(back, t.delta());
    }
}

TEST(TreeOrder, PostorderLabelsAreIntervals) {
  // level-order labels break the interval condition on this tree:
  // 1 is below 4 but 3 is not
  const auto t = tree_order({0, 0, 0, 2, 2, 1});
  std::vector<int> parent(7);
  for (int c = 1; c <= 6; ++c) parent[c] = t.parent(c);
  EXPECT_FALSE(satisfies_interval_order(parent));
  for (int n = 1; n <= 8; ++n)
    for (auto& u : enumerate_delta(n)) {
      const Delta post = postorder_delta(u);
      ASSERT_TRUE(is_delta(post));
      EXPECT_TRUE(satisfies_interval_order(postorder_parents(post)));
    }
}

TEST(TreeShape, DiameterAndLevels) {
  EXPECT_EQ(tree_order({0}).diameter(), 0);
  EXPECT_EQ(tree_order({0, 1, 1}).diameter(), 2);
  const auto t = tree_order({0, 0, 2});
  EXPECT_EQ(t.diameter(), 1);
  const auto lv = t.level_vectors();
  EXPECT_EQ(lv[0], Delta({2}));
  EXPECT_EQ(lv[1], Delta({0, 0}));
  for (int n = 1; n <= 8; ++n)
    for (auto& u : enumerate_delta(n)) EXPECT_EQ(concatenate_levels(u.level_vectors()), u.delta());
}

TEST(Coefficients, Compositions) {
  EXPECT_EQ(composition_coefficient({1}), Rational(1));
  EXPECT_EQ(composition_coefficient({1, 2}), Rational(1, 3));
  EXPECT_EQ(composition_coefficient({2, 1}), Rational(1, 6));
  EXPECT_THROW(composition_coefficient({}), ValidationError);
  EXPECT_THROW(composition_coefficient({1, 0}), ValidationError);
}

TEST(Coefficients, PermutationSums) {
  EXPECT_TRUE(permutation_sum_check({1, 2}));
  EXPECT_TRUE(permutation_sum_check({1, 1, 1}));
  int count = 0;
  for (int n = 1; n <= 7; ++n)
    for (auto& ks : compositions(n)) {
      EXPECT_TRUE(permutation_sum_check(ks));
      ++count;
    }
  EXPECT_EQ(count, 127);
}

TEST(Coefficients, JacobiIdentity) {
  EXPECT_TRUE(jacobi_coefficient_check(1, {1}));
  EXPECT_TRUE(jacobi_coefficient_check(2, {1, 1}));
  EXPECT_EQ(composition_coefficient({1, 1, 2}), Rational(1, 8));
  EXPECT_EQ(composition_coefficient({1, 3}) / 2, Rational(1, 8));
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> e(1, 6), len(1, 5);
  for (int i = 0; i < 500; ++i) {
    std::vector<int> ls0(len(rng));
    for (int& x : ls0) x = e(rng);
    EXPECT_TRUE(jacobi_coefficient_check(e(rng), ls0));
  }
}

TEST(Coefficients, TreeCoefficient) {
  EXPECT_EQ(coefficient_c(tree_order({0})), Rational(1));
  EXPECT_EQ(coefficient_c(tree_order({0, 0, 2})), Rational(1, 2));
  EXPECT_EQ(coefficient_c(tree_order({0, 1, 1})), Rational(1, 2));
  // chain of n nodes: c_{n-1} c_{n-2} ... c_1
  EXPECT_EQ(coefficient_c(tree_order({0, 1, 1, 1})), Rational(1, 6));
}

TEST(Connect, SmallExamples) {
  EXPECT_EQ(connect(tree_order({0}), tree_order({0})).tree.delta(), Delta({0, 1}));
  const auto c0 = connect(tree_order({0}), tree_order({0, 1}), 0);
  const auto c1 = connect(tree_order({0}), tree_order({0, 1}), 1);
  EXPECT_EQ(c0.tree.delta(), Delta({0, 0, 2}));
  // the new leaf sits on the other side of the root
  EXPECT_EQ(c1.tree.delta(), Delta({0, 0, 2}));
  EXPECT_NE(c0.first_labels[1], c1.first_labels[1]);
  EXPECT_THROW(connect(tree_order({0}), tree_order({0, 1}), 2), PositionError);
}

TEST(Connect, PreservesMembershipAndSizes) {
  for (int n1 = 1; n1 <= 4; ++n1)
    for (int n2 = 1; n2 <= 4; ++n2)
      for (auto& a : enumerate_delta(n1))
        for (auto& b : enumerate_delta(n2))
          for (int iota = 0; iota <= b.delta(b.root()); ++iota) {
            const auto c = connect(a, b, iota);
            EXPECT_EQ(c.tree.size(), n1 + n2);
            EXPECT_EQ(c.tree.delta(c.tree.root()), b.delta(b.root()) + 1);
            EXPECT_EQ(subtree_at(c.tree, c.first_labels[a.root()]), a);
          }
}

TEST(Omega, BaseCases) {
  const FrequencyVector one({1.0});
  auto a = omega_recursive(DecoratedTree::scalar({0}, {2}), one);
  EXPECT_LT(std::abs(a.omega1 - Complex(0, -0.5)), 1e-15);
  EXPECT_EQ(a.omega2, Complex(0));
  auto b = omega_recursive(DecoratedTree::scalar({0}, {0}), one);
  EXPECT_EQ(b.omega1, Complex(0));
  EXPECT_EQ(b.omega2, Complex(1));
}

TEST(Omega, ThreeNodeChain) {
  const FrequencyVector one({1.0});
  const auto dt = DecoratedTree::scalar({0, 1, 1}, {1, -1, 1});
  EXPECT_LT(std::abs(omega_recursive(dt, one).omega1 - Complex(0, 1)), 1e-15);
  const auto res = enumerate_resonances(dt);
  ASSERT_EQ(res.size(), 1u);
  EXPECT_EQ(res[0].a, 3);
  EXPECT_EQ(res[0].B, node_bit(1));
  const auto ad = enumerate_admissible(dt);
  ASSERT_EQ(ad.size(), 1u);
  EXPECT_EQ(ad[0].gamma_j[2][0], -1);
  EXPECT_LT(std::abs(omega1_resonance_sum(dt, one) - Complex(0, 1)), 1e-15);
  EXPECT_LT(std::abs(omega1_class_sum(dt, one) - Complex(0, 1)), 1e-15);
  EXPECT_EQ(rho(dt), 1);
  const auto e = omega_recursive_exact(dt, Rational(1));
  EXPECT_EQ(e.omega1.re, Rational(0));
  EXPECT_EQ(e.omega1.im, Rational(1));
}

TEST(Omega, ResonanceFreeAndEmptyCases) {
  EXPECT_TRUE(enumerate_resonances(DecoratedTree::scalar({0, 1}, {1, -1})).empty());
  EXPECT_TRUE(enumerate_admissible(DecoratedTree::scalar({0, 1}, {1, -1})).empty());
  const auto ad = enumerate_admissible(DecoratedTree::scalar({0, 1}, {1, 1}));
  ASSERT_EQ(ad.size(), 1u);
  EXPECT_TRUE(ad[0].idx.empty());
  const auto zero = DecoratedTree::scalar({0, 1}, {1, -1});
  EXPECT_EQ(rho(zero), 0);
  EXPECT_EQ(omega1_resonance_sum(zero, FrequencyVector({1.0})), Complex(0));
  EXPECT_EQ(omega_recursive(zero, FrequencyVector({1.0})).omega1, Complex(0));
}

TEST(Omega, ExactRoutesAgreeOnSweep) {
  const Rational w(3, 2);
  const ExactArithmetic ar{w};
  int checked = 0;
  for (int n = 1; n <= 4; ++n)
    for (auto& t : enumerate_delta(n)) {
      std::vector<int> v(n, -2);
      while (true) {
        const DecoratedTree dt = DecoratedTree::scalar(t.delta(), v);
        const auto rec = omega_recursive_exact(dt, w);
        const auto sum = omega1_resonance_sum(dt, ar);
        EXPECT_TRUE(rec.omega1.re == sum.re && rec.omega1.im == sum.im);
        if (is_zero(dt.gamma(n))) {
          const auto two = omega2_resonance_sum(dt, ar);
          EXPECT_TRUE(rec.omega2.re == two.re && rec.omega2.im == two.im);
        }
        ++checked;
        int i = 0;
        while (i < n && v[i] == 2) v[i++] = -2;
        if (i == n) break;
        ++v[i];
      }
    }
  EXPECT_GT(checked, 3000);
}

TEST(Omega, SixNodeStarClassSumDiffers) {
  // the class-sum form stops agreeing with the other two at n = 6
  const FrequencyVector one({1.0});
  const auto dt = DecoratedTree::scalar({0, 0, 0, 0, 0, 5}, {-1, -1, -1, 1, 1, 0});
  const Complex rec = omega_recursive(dt, one).omega1;
  EXPECT_LT(std::abs(rec - omega1_resonance_sum(dt, one)), 1e-12);
  EXPECT_GT(std::abs(rec - omega1_class_sum(dt, one)), 1e-3);
}

TEST(Omega, ChainSignIdentity) {
  for (int k = 1; k <= 6; ++k) EXPECT_TRUE(chain_sign_identity(k)) << "k=" << k;
}

TEST(Eliasson, PlugInExample) {
  const auto b = eliasson_bound_check(DecoratedTree::scalar({0, 1, 1}, {1, -1, 1}), FrequencyVector({1.0}), 1, 1);
  EXPECT_NEAR(b.lhs, 1, 1e-15);
  EXPECT_NEAR(b.rhs, std::pow(128.0, 3), 1e-6);
  EXPECT_TRUE(b.holds());
  const auto z = eliasson_bound_check(DecoratedTree::scalar({0, 1}, {1, -1}), FrequencyVector({1.0}), 1, 1);
  EXPECT_TRUE(z.holds());
}

TEST(Resonances, TMapCases) {
  EXPECT_EQ(tmap({}, {}), TImage{});
  const auto dt = DecoratedTree::scalar({0, 1, 1}, {1, -1, 1});
  const auto res = enumerate_resonances(dt);
  const TImage t = tmap(res, {0});
  EXPECT_EQ(t.alternating, res[0].members);
  EXPECT_EQ(t.minimal_union, res[0].members);
  EXPECT_EQ(t.maximal_union, res[0].members);
}

TEST(Resonances, TMapInjectiveOnMinimalRepresentatives) {
  for (int n = 1; n <= 5; ++n)
    for (auto& t : enumerate_delta(n)) {
      std::vector<int> v(n, -1);
      while (true) {
        const auto P = partition_admissible(DecoratedTree::scalar(t.delta(), v));
        std::set<TImage> seen;
        for (auto& cls : P.classes) {
          ASSERT_GE(cls.minimal, 0);
          EXPECT_TRUE(seen.insert(tmap(P.resonances, P.admissible[cls.minimal].idx)).second);
        }
        EXPECT_LE(static_cast<double>(P.classes.size()), std::pow(8.0, n));
        int i = 0;
        while (i < n && v[i] == 1) v[i++] = -1;
        if (i == n) break;
        ++v[i];
      }
    }
}

TEST(Resonances, MaximalCoveringDecomposition) {
  // chain 5 > 4 > 3 > 2 > 1 with zero-sum intervals {2,3}, {4,5}, {2..5}
  const auto dt = DecoratedTree::scalar({0, 1, 1, 1, 1}, {1, 2, -2, 3, -3});
  const NodeMask a = node_bit(2) | node_bit(3), b = node_bit(4) | node_bit(5);
  const auto both = maximal_covering_decomposition(dt, a | b);
  ASSERT_EQ(both.parts.size(), 2u);
  EXPECT_EQ(both.alternatives, 1);
  EXPECT_EQ(both.parts[0].members | both.parts[1].members, a | b);
  const auto one = maximal_covering_decomposition(dt, a);
  ASSERT_EQ(one.parts.size(), 1u);
  EXPECT_EQ(one.parts[0].members, a);
  EXPECT_THROW(maximal_covering_decomposition(dt, node_bit(3) | node_bit(4)), NotDecomposableError);
}

TEST(Sigma, SingleFactor) {
  EXPECT_EQ(sigma1(fw(1, 0.5), fw(1, 0.5), 0.7), 0.0);
  EXPECT_NEAR(sigma1(fw(1, 0), fw(0, 1), 1.0), 2 * std::sin(0.5), 1e-15);
  EXPECT_NEAR(sigma1(fw(1, 0), fw(0, 1), 1.0), 0.958851077208406, 1e-14);
}

TEST(Sigma, TreeWeightSemiclassicalLimit) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> k(-3, 3);
  for (int n = 2; n <= 4; ++n)
    for (auto& t : enumerate_delta(n)) {
      std::vector<FourierWeight> ws(n + 1);
      for (int i = 1; i <= n; ++i) ws[i] = fw(k(rng), k(rng) * 0.7);
      const double limit = sigma_tree(ws, t, 0.0);
      if (std::abs(limit) < 1e-6) continue;
      std::vector<double> hs{0.02, 0.01, 0.005}, err;
      for (double h : hs) err.push_back(std::abs(sigma_tree(ws, t, h) - limit));
      if (err.back() < 1e-13) continue;
      EXPECT_GE(loglog_slope(hs, err), 1.9);
    }
}

TEST(AnalyticPart, SmallTrees) {
  const auto one = analytic_part_bound_check(tree_order({0}), 1.0, 1.0, 0.5, 1.0, 1, 3, 3, 100, 1);
  EXPECT_DOUBLE_EQ(one.lhs, 1.0);
  EXPECT_DOUBLE_EQ(one.rhs, 1.0);
  const auto two = analytic_part_bound_check(tree_order({0, 1}), 1.0, 1.0, 0.5, 1.0, 1, 3, 3, 4000, 2);
  EXPECT_NEAR(two.rhs, std::exp(-2.0), 1e-15);
  EXPECT_TRUE(two.holds());
  for (auto& t : enumerate_delta(4)) EXPECT_TRUE(analytic_part_bound_check(t, 1.0, 1.0, 0.5, 1.0, 1, 3, 3, 2000, 3).holds());
}
