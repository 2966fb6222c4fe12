#include <gtest/gtest.h>

#include <algorithm>

#include "nuset/indices.hpp"

using namespace nuset;

TEST(FaceIndices, SquareEdgeCase) {
  auto f = face_indices(1, 0, Arity(2));
  std::vector<FaceIndex> want{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  EXPECT_EQ(f, want);
}

TEST(FaceIndices, SingleIndex) {
  auto f = face_indices(0, 0, Arity(1));
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0], (FaceIndex{0, 0}));
}

TEST(FaceIndices, Cardinality) { EXPECT_EQ(face_indices(3, 1, Arity(2)).size(), 6u); }

TEST(FaceIndices, RejectsRankAboveLevel) {
  EXPECT_THROW(face_indices(1, 2, Arity(2)), IndexError);
  EXPECT_THROW(coh_indices(0, 1, Arity(1)), IndexError);
}

TEST(Arity, RejectsZero) { EXPECT_THROW(Arity(0), IndexError); }

TEST(CohIndices, LevelZero) {
  auto c = coh_indices(0, 0, Arity(2));
  EXPECT_EQ(c.size(), 4u);
  for (const auto& x : c) {
    EXPECT_EQ(x.q, 0);
    EXPECT_EQ(x.r, 0);
  }
}

TEST(CohIndices, UnaryLevelOne) {
  auto c = coh_indices(1, 0, Arity(1));
  std::vector<CohIndex> want{{0, 0, 0, 0}, {1, 0, 0, 0}, {1, 1, 0, 0}};
  EXPECT_EQ(c, want);
}

TEST(CohIndices, BinaryLevelTwo) { EXPECT_EQ(coh_indices(2, 0, Arity(2)).size(), 24u); }

TEST(Indices, ExhaustiveRangesAndOrder) {
  for (int nu = 1; nu <= 3; ++nu)
    for (int n = 0; n <= 6; ++n)
      for (int p = 0; p <= n; ++p) {
        auto f = face_indices(n, p, Arity(nu));
        EXPECT_EQ(f.size(), static_cast<std::size_t>(nu * (n - p + 1)));
        EXPECT_TRUE(std::is_sorted(f.begin(), f.end()));
        EXPECT_EQ(std::adjacent_find(f.begin(), f.end()), f.end());
        for (const auto& x : f) {
          EXPECT_LE(x.q, n - p);
          EXPECT_NO_THROW(require_face(n, p, nu, x));
        }
        auto c = coh_indices(n, p, Arity(nu));
        EXPECT_EQ(c.size(), static_cast<std::size_t>(nu * nu * (n - p + 1) * (n - p + 2) / 2));
        EXPECT_TRUE(std::is_sorted(c.begin(), c.end()));
        EXPECT_EQ(std::adjacent_find(c.begin(), c.end()), c.end());
        for (const auto& x : c) {
          EXPECT_LE(x.r, x.q);
          EXPECT_LE(x.q, n - p);
          EXPECT_NO_THROW(require_coh(n, p, nu, x));
        }
      }
}

TEST(Indices, RangeValidation) {
  EXPECT_THROW(require_face(2, 1, 2, {2, 0}), IndexError);
  EXPECT_THROW(require_face(2, 1, 2, {0, 2}), IndexError);
  EXPECT_THROW(require_coh(2, 0, 2, {1, 2, 0, 0}), IndexError);
  EXPECT_THROW(require_coh(2, 0, 1, {1, 0, 0, 1}), IndexError);
}
