#include <gtest/gtest.h>

#include <random>

#include "nuset/fibred.hpp"
#include "test_support.hpp"

using namespace nuset;
using nuset::testing::points_then_singletons;
using nuset::testing::tower;

namespace {

TruncatedNuSet square_with_two_points() {
  // E_0 = {x, y}; E_1 singleton over each of the four edges.
  TruncatedNuSet D{Arity(2)};
  LevelFamily e0;
  e0.level = 0;
  e0.fibers[Frame::star().key()] = {"x", "y"};
  D.push_level(e0);
  LevelFamily e1;
  e1.level = 1;
  int i = 0;
  for (const Frame& d : enumerate_fullframe(D, 1)) e1.fibers[d.key()] = {"e" + std::to_string(i++)};
  D.push_level(e1);
  return D;
}

/// ν = 1: one augmentation point, three vertices, an edge between each ordered
/// pair that bounds a triangle, one triangle.
FibredSet triangle_boundary() {
  FibredSet X;
  X.nu = 1;
  X.cells = {{"o"}, {"a", "b", "c"}, {"ab", "ac", "bc"}, {"t"}};
  X.faces.resize(4);
  X.faces[1][{0, 0}] = {0, 0, 0};
  // an edge's faces: d0 drops its first vertex, d1 drops the second
  X.faces[2][{0, 0}] = {1, 2, 2};
  X.faces[2][{1, 0}] = {0, 0, 1};
  X.faces[3][{0, 0}] = {2};  // bc
  X.faces[3][{1, 0}] = {1};  // ac
  X.faces[3][{2, 0}] = {0};  // ab
  return X;
}

} // namespace

TEST(Fibred, TwoPointsGiveFourEdges) {
  FibredSet X = to_fibred(square_with_two_points());
  ASSERT_EQ(X.dims(), 2);
  EXPECT_EQ(X.count(0), 2u);
  EXPECT_EQ(X.count(1), 4u);
  EXPECT_EQ(X.faces[1].size(), 2u);
  std::set<std::pair<std::uint32_t, std::uint32_t>> ends;
  for (std::uint32_t i = 0; i < 4; ++i) ends.insert({X.face(1, {0, 0}, i), X.face(1, {0, 1}, i)});
  EXPECT_EQ(ends.size(), 4u);
  EXPECT_TRUE(check_identities(X).ok());
}

TEST(Fibred, EachCellHasNuTimesDimensionFaces) {
  for (int nu = 1; nu <= 3; ++nu) {
    FibredSet X = to_fibred(points_then_singletons(nu, nu == 3 ? 3 : 4, 2));
    for (int n = 0; n < X.dims(); ++n) EXPECT_EQ(X.faces[static_cast<std::size_t>(n)].size(), static_cast<std::size_t>(nu * n));
    EXPECT_TRUE(check_identities(X).ok());
  }
}

TEST(Fibred, TriangleBoundarySatisfiesIdentities) {
  IdentityReport r = check_identities(triangle_boundary());
  EXPECT_TRUE(r.ok()) << r.render();
  EXPECT_EQ(r.checks, 6u);  // one per edge, three on the triangle
}

TEST(Fibred, SwappedFaceBreaksIdentities) {
  FibredSet X = triangle_boundary();
  std::swap(X.faces[3][{0, 0}][0], X.faces[3][{1, 0}][0]);
  IdentityReport r = check_identities(X);
  EXPECT_FALSE(r.ok());
  ASSERT_FALSE(r.violations.empty());
  EXPECT_NE(r.violations.front().find("cell t"), std::string::npos);
  EXPECT_THROW(to_indexed(X), DataError);
}

TEST(Fibred, TriangleBoundaryRoundTrips) {
  FibredSet X = triangle_boundary();
  TruncatedNuSet D = to_indexed(X);
  EXPECT_TRUE(validate(D).valid());
  EXPECT_EQ(D.depth(), 4);
  EXPECT_EQ(to_fibred(D), X);
}

TEST(Fibred, StructuralProblemsAreReported) {
  FibredSet X = triangle_boundary();
  X.faces[2][{0, 0}][1] = 7;
  EXPECT_FALSE(check_structure(X).ok());
  X = triangle_boundary();
  X.faces[2].erase({1, 0});
  EXPECT_FALSE(check_structure(X).ok());
  X = triangle_boundary();
  X.cells[1][1] = "a";
  EXPECT_FALSE(check_structure(X).ok());
  X = triangle_boundary();
  X.cells[1][1] = "a b";
  EXPECT_FALSE(check_structure(X).ok());
}

TEST(Fibred, IndexedRoundTripIsIdentityWhenLabelsAreDistinct) {
  for (int nu = 1; nu <= 2; ++nu)
    for (int depth = 0; depth <= 3; ++depth) {
      TruncatedNuSet D = tower(nu, depth, [](int k, const Frame& d) { return k == 0 ? 2 : 1 + static_cast<int>(d.key().size() % 2); }, true);
      EXPECT_EQ(to_indexed(to_fibred(D)), D) << nu << " " << depth;
    }
}

TEST(Fibred, IndexedRoundTripIsIsomorphismWithSharedLabels) {
  for (int nu = 1; nu <= 2; ++nu) {
    TruncatedNuSet D = tower(nu, 3, [](int k, const Frame& d) { return k == 0 ? 2 : 1 + static_cast<int>(d.key().size() % 2); });
    TruncatedNuSet back = to_indexed(to_fibred(D));
    EXPECT_TRUE(validate(back).valid());
    EXPECT_TRUE(iso_check(back, D));
    EXPECT_EQ(to_fibred(back), to_fibred(back));
    EXPECT_EQ(to_fibred(to_indexed(to_fibred(back))), to_fibred(back));
  }
}

TEST(Fibred, EmptyAndSinglePoint) {
  TruncatedNuSet empty{Arity(2)};
  FibredSet X = to_fibred(empty);
  EXPECT_EQ(X.dims(), 0);
  EXPECT_EQ(to_indexed(X), empty);

  TruncatedNuSet point = points_then_singletons(2, 1, 1);
  FibredSet P = to_fibred(point);
  ASSERT_EQ(P.dims(), 1);
  EXPECT_EQ(P.count(0), 1u);
  EXPECT_EQ(to_indexed(P), point);
}

TEST(Fibred, EmptyFibersSurviveTheRoundTrip) {
  TruncatedNuSet D = tower(2, 2, [](int k, const Frame& d) { return k == 0 ? 2 : static_cast<int>(d.key().size() % 2); }, true);
  TruncatedNuSet back = to_indexed(to_fibred(D));
  EXPECT_EQ(back, D);
  EXPECT_EQ(back.level(1).fibers.size(), 4u);
}

TEST(Iso, PermutedLabelsAreIsomorphic) {
  std::mt19937 rng(7);
  for (int nu = 1; nu <= 2; ++nu) {
    int points = nu == 1 ? 3 : 2;
    TruncatedNuSet D = tower(nu, 3, [points](int k, const Frame& d) { return k == 0 ? points : 1 + static_cast<int>(d.key().size() % 2); }, true);
    FibredSet X = to_fibred(D);
    for (int trial = 0; trial < 4; ++trial) {
      FibredSet Y = X;
      // permute cells inside every dimension, carrying faces along
      std::vector<std::vector<std::uint32_t>> perm(static_cast<std::size_t>(X.dims()));
      for (int n = 0; n < X.dims(); ++n) {
        auto& p = perm[static_cast<std::size_t>(n)];
        p.resize(X.count(n));
        for (std::uint32_t i = 0; i < p.size(); ++i) p[i] = i;
        std::shuffle(p.begin(), p.end(), rng);
        for (std::uint32_t i = 0; i < p.size(); ++i)
          Y.cells[static_cast<std::size_t>(n)][p[i]] = "r" + X.cells[static_cast<std::size_t>(n)][i];
        for (auto& [f, tab] : Y.faces[static_cast<std::size_t>(n)]) {
          const auto& src = X.faces[static_cast<std::size_t>(n)].at(f);
          for (std::uint32_t i = 0; i < src.size(); ++i) tab[p[i]] = perm[static_cast<std::size_t>(n - 1)][src[i]];
        }
      }
      EXPECT_TRUE(check_identities(Y).ok());
      EXPECT_TRUE(iso_check(X, Y));
      EXPECT_TRUE(iso_check(D, to_indexed(Y)));
    }
  }
}

TEST(Iso, RenamedElementsAreIsomorphic) {
  TruncatedNuSet D = square_with_two_points();
  TruncatedNuSet E{Arity(2)};
  LevelFamily e0;
  e0.level = 0;
  e0.fibers[Frame::star().key()] = {"p", "q"};
  E.push_level(e0);
  LevelFamily e1;
  e1.level = 1;
  int i = 0;
  for (const Frame& d : enumerate_fullframe(E, 1)) e1.fibers[d.key()] = {"f" + std::to_string(i++)};
  E.push_level(e1);
  EXPECT_TRUE(iso_check(D, E));
}

TEST(Iso, DifferentFiberSizesAreNot) {
  TruncatedNuSet D = tower(2, 2, [](int k, const Frame&) { return k == 0 ? 2 : 1; });
  LevelFamily e1 = D.level(1);
  e1.fibers.begin()->second.push_back("z");
  TruncatedNuSet F{Arity(2), {D.level(0), e1}};
  ASSERT_TRUE(validate(F).valid()) << validate(F).render();
  EXPECT_FALSE(iso_check(D, F));
  EXPECT_FALSE(iso_check(D, D.prefix(1)));
  EXPECT_FALSE(iso_check(D, TruncatedNuSet(Arity(1), {})));
}

TEST(Iso, LoopVersusNonLoopDoubledEdge) {
  TruncatedNuSet base = tower(2, 1, [](int, const Frame&) { return 2; });
  std::vector<Frame> edges = enumerate_fullframe(base, 1);
  ASSERT_EQ(edges.size(), 4u);
  auto is_loop = [](const Frame& d) { return d.layer_at(0).parts[0] == d.layer_at(0).parts[1]; };
  auto doubled = [&](std::size_t which) {
    return tower(2, 2, [&](int k, const Frame& d) { return k == 0 ? 2 : (d.key() == edges[which].key() ? 2 : 1); });
  };
  std::size_t a = 0, b = 0;
  while (!is_loop(edges[a])) ++a;
  while (is_loop(edges[b])) ++b;
  EXPECT_FALSE(iso_check(doubled(a), doubled(b)));
  for (std::size_t c = 0; c < 4; ++c) {
    if (c == a) continue;
    EXPECT_EQ(iso_check(doubled(a), doubled(c)), is_loop(edges[c])) << c;
  }
}

TEST(Dot, ListsCellsAndLabeledFaces) {
  std::string dot = to_dot(triangle_boundary());
  EXPECT_EQ(dot.rfind("digraph nuset {", 0), 0u);
  EXPECT_NE(dot.find("\"3:t\" -> \"2:bc\" [label=\"0,0\"]"), std::string::npos);
  EXPECT_NE(dot.find("\"0:o\" [label=\"o\"]"), std::string::npos);
}
