#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "stekiso/finite_groups.hpp"
#include "stekiso/schreier.hpp"

using namespace stekiso;

namespace {

// independent F2 arithmetic on plain int arrays
using Raw = std::array<int, 9>;

Raw raw_of(int bits) {
  Raw r{};
  for (int i = 0; i < 9; ++i) r[i] = (bits >> i) & 1;
  return r;
}

int raw_det(const Raw& m) {
  const int d = m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) + m[2] * (m[3] * m[7] - m[4] * m[6]);
  return ((d % 2) + 2) % 2;
}

Raw raw_mul(const Raw& a, const Raw& b) {
  Raw c{};
  for (int r = 0; r < 3; ++r)
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j) c[3 * r + j] ^= a[3 * r + k] & b[3 * k + j];
  return c;
}

Raw raw_from(const F2Matrix3& m) {
  Raw r{};
  for (int i = 0; i < 9; ++i) r[i] = m.at(i / 3, i % 3);
  return r;
}

}  // namespace

TEST(Gl3F2, BruteForceEnumerationGives168Elements) {
  std::set<int> invertible;
  for (int bits = 0; bits < 512; ++bits)
    if (raw_det(raw_of(bits))) invertible.insert(bits);
  EXPECT_EQ(invertible.size(), 168u);

  const auto gl = gl3_f2();
  ASSERT_EQ(gl.group.order(), 168);
  std::set<int> built;
  for (const auto& m : gl.matrices) built.insert(m.bits);
  EXPECT_EQ(built, invertible);
}

TEST(Gl3F2, TableAgreesWithRawMatrixProducts) {
  const auto gl = gl3_f2();
  const auto& G = gl.group;
  for (int a = 0; a < G.order(); a += 5)
    for (int b = 0; b < G.order(); b += 3)
      EXPECT_EQ(raw_from(gl.matrices[G.mul(a, b)]), raw_mul(raw_from(gl.matrices[a]), raw_from(gl.matrices[b])));
}

TEST(Gl3F2, ElementOrdersAndClasses) {
  const auto gl = gl3_f2();
  const auto& G = gl.group;
  std::map<int, int> orders;
  for (int g = 0; g < G.order(); ++g) ++orders[G.element_order(g)];
  EXPECT_EQ(orders, (std::map<int, int>{{1, 1}, {2, 21}, {3, 56}, {4, 42}, {7, 48}}));
  std::multiset<std::size_t> sizes;
  for (const auto& c : G.conjugacy_classes()) sizes.insert(c.size());
  EXPECT_EQ(sizes, (std::multiset<std::size_t>{1, 21, 56, 42, 24, 24}));
}

TEST(Gl3F2, GassmannPairIsAlmostConjugateButNotConjugate) {
  const auto gl = gl3_f2();
  const auto& G = gl.group;
  EXPECT_EQ(gl.h1.order(), 24);
  EXPECT_EQ(gl.h2.order(), 24);
  EXPECT_EQ(coset_action(G, gl.h1).index(), 7);
  EXPECT_TRUE(almost_conjugate(G, gl.h1, gl.h2));
  EXPECT_TRUE(permutation_character_equal(G, gl.h1, gl.h2));
  EXPECT_FALSE(are_conjugate_subgroups(G, gl.h1, gl.h2));
  EXPECT_TRUE(are_conjugate_subgroups(G, gl.h1, gl.h1));
}

TEST(Gl3F2, FixedPointCountsFromRawConjugation) {
  // |{x : x g x^-1 in H}| / |H| counts the fixed cosets of g
  const auto gl = gl3_f2();
  const auto& G = gl.group;
  std::vector<Raw> raw;
  for (const auto& m : gl.matrices) raw.push_back(raw_from(m));
  std::set<Raw> h1, h2;
  for (int m : gl.h1.members()) h1.insert(raw[m]);
  for (int m : gl.h2.members()) h2.insert(raw[m]);
  const auto c1 = coset_action(G, gl.h1);
  for (int g = 0; g < G.order(); ++g) {
    int f1 = 0, f2 = 0;
    for (int x = 0; x < G.order(); ++x) {
      const Raw conj = raw_mul(raw_mul(raw[x], raw[g]), raw[G.inv(x)]);
      f1 += h1.count(conj);
      f2 += h2.count(conj);
    }
    EXPECT_EQ(f1, f2);
    int fixed = 0;
    for (int c = 0; c < 7; ++c) fixed += c1.act(c, g) == c;
    EXPECT_EQ(f1 / 24, fixed);
  }
}

TEST(Gl3F2, FixedRowVectorsDistinguishTheSubgroups) {
  // v M = v for all M in H is preserved by conjugation up to v -> v x
  const auto gl = gl3_f2();
  auto fixed_rows = [&](const Subgroup& h) {
    int count = 0;
    for (int v = 1; v < 8; ++v) {
      bool all = true;
      for (int m : h.members()) {
        const Raw& r = raw_from(gl.matrices[m]);
        for (int j = 0; j < 3 && all; ++j) {
          int s = 0;
          for (int i = 0; i < 3; ++i) s ^= ((v >> i) & 1) & r[3 * i + j];
          all = s == ((v >> j) & 1);
        }
      }
      count += all;
    }
    return count;
  };
  EXPECT_EQ(fixed_rows(gl.h1), 1);
  EXPECT_EQ(fixed_rows(gl.h2), 0);
}

TEST(Gl3F2, IntertwinerIsInvertibleAndExact) {
  const auto gl = gl3_f2();
  const auto& G = gl.group;
  const auto T = intertwiner(G, gl.h1, gl.h2);
  ASSERT_EQ(T.rows, 7);
  ASSERT_EQ(T.cols, 7);
  EXPECT_NE(determinant(T), 0);
  const auto a1 = coset_action(G, gl.h1), a2 = coset_action(G, gl.h2);
  EXPECT_TRUE(is_intertwiner(T, G, a1, a2));
  // T P2(g) = P1(g) T with permutation matrices built here from the raw action
  for (int g = 0; g < G.order(); ++g)
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 7; ++j) {
        Rational lhs = 0, rhs = 0;
        for (int k = 0; k < 7; ++k) {
          if (a2.act(k, g) == j) lhs += T(i, k);
          if (a1.act(i, g) == k) rhs += T(k, j);
        }
        ASSERT_EQ(lhs, rhs);
      }
  // not a permutation matrix: H1 and H2 are not conjugate
  int nonzero = 0;
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) nonzero += T(i, j) != 0;
  EXPECT_GT(nonzero, 7);
}

TEST(SmallGroups, SymmetricGroupS3) {
  const auto G = build_group(std::vector<Permutation>{{1, 0, 2}, {1, 2, 0}});
  ASSERT_EQ(G.order(), 6);
  auto find = [&](const std::string& label) {
    for (int g = 0; g < G.order(); ++g)
      if (G.labels()[g] == label) return g;
    return -1;
  };
  const int t01 = find("[1 0 2]"), t12 = find("[0 2 1]"), c3 = find("[1 2 0]");
  ASSERT_GE(std::min({t01, t12, c3}), 0);
  const auto h = Subgroup::generated(G, {t01}), hp = Subgroup::generated(G, {t12}), a3 = Subgroup::generated(G, {c3});
  EXPECT_TRUE(almost_conjugate(G, h, hp));
  EXPECT_TRUE(are_conjugate_subgroups(G, h, hp));
  EXPECT_FALSE(almost_conjugate(G, h, a3));
  EXPECT_EQ(coset_action(G, a3).index(), 2);
}

TEST(SmallGroups, CyclicGroupHasOnlyTrivialConjugacy) {
  const auto G = build_group(std::vector<Permutation>{{1, 2, 0}});
  EXPECT_EQ(G.order(), 3);
  EXPECT_EQ(G.conjugacy_classes().size(), 3u);
  const auto t = Subgroup::trivial(G), w = Subgroup::whole(G);
  EXPECT_FALSE(almost_conjugate(G, t, w));
  const auto T = intertwiner(G, t, t);
  EXPECT_NE(determinant(T), 0);
}

TEST(SmallGroups, AlmostConjugacyMatchesPermutationCharactersInS4) {
  // property: both Gassmann tests agree on every pair of cyclic subgroups
  const auto G = build_group(std::vector<Permutation>{{1, 0, 2, 3}, {1, 2, 3, 0}});
  ASSERT_EQ(G.order(), 24);
  std::vector<Subgroup> subs;
  for (int g = 0; g < G.order(); ++g) subs.push_back(Subgroup::generated(G, {g}));
  for (const auto& a : subs)
    for (const auto& b : subs) {
      if (a.order() != b.order()) continue;
      EXPECT_EQ(almost_conjugate(G, a, b), permutation_character_equal(G, a, b));
      // for cyclic subgroups almost conjugacy implies conjugacy
      EXPECT_EQ(almost_conjugate(G, a, b), are_conjugate_subgroups(G, a, b));
    }
}

TEST(SmallGroups, RandomPermutationGroupsSatisfyGroupAxioms) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    Permutation p(5), q(5);
    std::iota(p.begin(), p.end(), 0);
    std::iota(q.begin(), q.end(), 0);
    std::shuffle(p.begin(), p.end(), rng);
    std::shuffle(q.begin(), q.end(), rng);
    const auto G = build_group(std::vector<Permutation>{p, q});
    EXPECT_EQ(120 % G.order(), 0);
    int total = 0;
    for (const auto& c : G.conjugacy_classes()) total += static_cast<int>(c.size());
    EXPECT_EQ(total, G.order());
    for (int g = 0; g < G.order(); ++g) EXPECT_EQ(G.mul(g, G.inv(g)), G.identity());
  }
}

TEST(GroupErrors, RejectsBadInput) {
  EXPECT_THROW(build_group(std::vector<F2Matrix3>{f2_from_label("110/110/001")}), InvalidInput);
  EXPECT_THROW(f2_from_label("11/0"), InvalidInput);
  // non-associative table: a loop of order 5 that is not a group
  std::vector<int> t = {0, 1, 2, 3, 4, 1, 0, 3, 4, 2, 2, 4, 0, 1, 3, 3, 2, 4, 0, 1, 4, 3, 1, 2, 0};
  EXPECT_THROW(FiniteGroup(5, t, 0), InvalidInput);
  const auto G = build_group(std::vector<Permutation>{{1, 2, 0}});
  EXPECT_THROW(Subgroup(G, {G.identity(), G.generators()[0]}), InvalidInput);
  GroupBuildOptions cap;
  cap.closure_cap = 10;
  EXPECT_THROW(build_group(std::vector<Permutation>{{1, 0, 2, 3}, {1, 2, 3, 0}}, cap), CapExceeded);
}

TEST(GroupFile, RoundTrip) {
  const auto gl = gl3_f2();
  std::stringstream ss;
  write_group_text(ss, gl.group, {{"h1", gl.h1}, {"h2", gl.h2}});
  const auto gf = read_group_text(ss);
  EXPECT_EQ(gf.group.table(), gl.group.table());
  EXPECT_EQ(gf.subgroup("h1"), gl.h1);
  EXPECT_TRUE(almost_conjugate(gf.group, gf.subgroup("h1"), gf.subgroup("h2")));
  std::stringstream bad("order 3\n0 1 2\n1 2");
  EXPECT_THROW(read_group_text(bad), InvalidInput);
}

TEST(Schreier, GraphsOfTheGassmannPairAreIsospectral) {
  const auto gl = gl3_f2();
  const auto& G = gl.group;
  for (int a = 1; a < G.order(); a += 17)
    for (int b = 2; b < G.order(); b += 23) {
      if (static_cast<int>(G.closure({a, b}).size()) != G.order()) continue;
      const auto s1 = symmetrized_adjacency_spectrum(schreier_graph(G, gl.h1, {a, b}));
      const auto s2 = symmetrized_adjacency_spectrum(schreier_graph(G, gl.h2, {a, b}));
      ASSERT_EQ(s1.size(), 7u);
      for (int i = 0; i < 7; ++i) EXPECT_NEAR(s1[i], s2[i], 1e-12);
      EXPECT_NEAR(s1.back(), 4.0, 1e-12);  // 4-regular
    }
}

TEST(Schreier, ChosenGeneratorsGiveDifferentDiameters) {
  const auto gl = gl3_f2();
  const std::vector<int> gens{gl.index_of(f2_from_label("010/001/100")), gl.index_of(f2_from_label("001/110/100"))};
  const auto g1 = schreier_graph(gl.group, gl.h1, gens), g2 = schreier_graph(gl.group, gl.h2, gens);
  EXPECT_NE(graph_diameter(g1), graph_diameter(g2));
}

TEST(Schreier, CayleyGraphStructure) {
  const auto gl = gl3_f2();
  const auto c = cayley_graph(gl.group, {1, 2});
  c.validate();
  EXPECT_EQ(c.vertex_count, 168);
  const auto a = adjacency_matrix(c);
  EXPECT_DOUBLE_EQ(a.sum(), 336.0);
  // loops of the Schreier graph show up as twice the trace of A
  const auto s = schreier_graph(gl.group, gl.h1, {1, 2});
  const auto as = adjacency_matrix(s);
  const auto spec = symmetrized_adjacency_spectrum(s);
  double tr = 0;
  for (double v : spec) tr += v;
  EXPECT_NEAR(tr, 2 * as.trace(), 1e-12);
  EXPECT_THROW(cayley_graph(gl.group, {gl.group.identity()}), InvalidInput);
}
