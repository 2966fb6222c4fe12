#include <gtest/gtest.h>

#include <set>

#include "nuset/concrete.hpp"
#include "test_support.hpp"

using namespace nuset;
using nuset::testing::points_then_singletons;
using nuset::testing::tower;

namespace {

Layer layer(std::initializer_list<Painting> ps) { return Layer{std::vector<Painting>(ps)}; }
Painting top(const std::string& l) { return Painting::top(l); }

// Independent oracle: the level-2 fullframes of a binary tower with E_0 = pts
// and singleton E_1 fibers {x0} are the square boundaries on 4 chosen vertices.
std::set<std::string> square_boundaries(const std::vector<std::string>& pts) {
  std::set<std::string> out;
  for (const auto& a : pts)
    for (const auto& b : pts)
      for (const auto& c : pts)
        for (const auto& d : pts)
          out.insert("((*;[{[#" + a + "|#" + b + "];#x0}|{[#" + c + "|#" + d + "];#x0}]);[#x0|#x0])");
  return out;
}

} // namespace

TEST(EnumerateFrames, RankZeroIsStar) {
  auto D = points_then_singletons(2, 2, 3);
  for (int n = 0; n <= 2; ++n) {
    auto fs = enumerate_frames(D, n, 0);
    ASSERT_EQ(fs.size(), 1u);
    EXPECT_TRUE(fs[0].is_star());
  }
}

TEST(EnumerateFrames, SquareBoundariesMatchOracle) {
  auto D = points_then_singletons(2, 2, 2);
  auto fs = enumerate_fullframe(D, 2);
  EXPECT_EQ(fs.size(), 16u);
  std::set<std::string> got;
  for (const auto& f : fs) got.insert(f.key());
  EXPECT_EQ(got, square_boundaries({"x0", "x1"}));
}

TEST(EnumerateFrames, SingletonTowersHaveOneFullframe) {
  for (int nu = 1; nu <= 2; ++nu)
    for (int n = 0; n <= 4; ++n) {
      auto D = tower(nu, n, [](int, const Frame&) { return 1; });
      EXPECT_EQ(enumerate_fullframe(D, n).size(), 1u) << "nu=" << nu << " n=" << n;
    }
}

TEST(EnumerateFrames, CanonicalOrderAndDeterminism) {
  auto D = tower(2, 3, [](int k, const Frame& d) { return 1 + static_cast<int>(d.key().size() + k) % 2; });
  auto a = enumerate_frames(D, 3, 2);
  auto b = enumerate_frames(D, 3, 2);
  ASSERT_EQ(a.size(), b.size());
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(std::adjacent_find(a.begin(), a.end()), a.end());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].key(), b[i].key());
}

TEST(EnumerateFrames, MissingFiberNamesKey) {
  auto D = points_then_singletons(2, 2, 2);
  auto levels = D.levels();
  std::string victim = levels[1].fibers.begin()->first;
  levels[1].fibers.erase(victim);
  TruncatedNuSet broken(Arity(2), levels);
  try {
    enumerate_fullframe(broken, 2);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(victim), std::string::npos);
  }
}

TEST(EnumeratePaintings, TopIsTheFiber) {
  TruncatedNuSet D(Arity(2), {LevelFamily{0, {{"*", {"x", "y"}}}}});
  auto ps = enumerate_paintings(D, 0, 0, Frame::star());
  ASSERT_EQ(ps.size(), 2u);
  EXPECT_EQ(ps[0], top("x"));
  EXPECT_EQ(ps[1], top("y"));
}

TEST(EnumeratePaintings, UnaryEdgeCountsFiber) {
  for (int k = 1; k <= 3; ++k) {
    auto D = tower(1, 2, [k](int lvl, const Frame&) { return lvl == 0 ? 1 : k; });
    EXPECT_EQ(enumerate_paintings(D, 1, 0, Frame::star()).size(), static_cast<std::size_t>(k));
  }
}

TEST(EnumeratePaintings, BinaryEdgesOnePerEndpointPair) {
  auto D = points_then_singletons(2, 2, 2);
  auto ps = enumerate_paintings(D, 1, 0, Frame::star());
  std::set<std::string> want;
  for (const char* a : {"x0", "x1"})
    for (const char* b : {"x0", "x1"}) want.insert(std::string("{[#") + a + "|#" + b + "];#x0}");
  std::set<std::string> got;
  for (const auto& p : ps) got.insert(p.key());
  EXPECT_EQ(got, want);
}

TEST(EnumeratePaintings, RejectsForeignFrame) {
  auto D = points_then_singletons(2, 2, 2);
  Frame bogus = Frame::extend(Frame::star(), layer({top("zz"), top("x0")}));
  EXPECT_THROW(enumerate_paintings(D, 1, 1, bogus), DataError);
}

// Hand trace on the square: vertices a b c d, edges e1 = ab, e2 = cd, e3 = ac, e4 = bd.
TEST(Restriction, SquareFacesByHand) {
  Painting ab = Painting::layered(layer({top("a"), top("b")}), top("e1"));
  Painting cd = Painting::layered(layer({top("c"), top("d")}), top("e2"));
  Frame d21 = Frame::extend(Frame::star(), layer({ab, cd}));

  EXPECT_EQ(eval_restr_frame(Arity(2), 1, 0, {1, 0}, Frame::star()), Frame::star());
  EXPECT_EQ(eval_restr_frame(Arity(2), 1, 1, {0, 0}, d21).key(), "(*;[#a|#c])");
  EXPECT_EQ(eval_restr_frame(Arity(2), 1, 1, {0, 1}, d21).key(), "(*;[#b|#d])");

  Painting square = Painting::layered(layer({ab, cd}), Painting::layered(layer({top("e3"), top("e4")}), top("s")));
  EXPECT_EQ(eval_restr_painting(Arity(2), 1, 0, {0, 0}, square).key(), "{[#a|#b];#e1}");
  EXPECT_EQ(eval_restr_painting(Arity(2), 1, 0, {0, 1}, square).key(), "{[#c|#d];#e2}");
  EXPECT_EQ(eval_restr_painting(Arity(2), 1, 0, {1, 0}, square).key(), "{[#a|#c];#e3}");
  EXPECT_EQ(eval_restr_painting(Arity(2), 1, 0, {1, 1}, square).key(), "{[#b|#d];#e4}");

  // Rank-1 painting over d21: q = 0 extracts the top layer component.
  Painting upper = Painting::layered(layer({top("e3"), top("e4")}), top("s"));
  EXPECT_EQ(eval_restr_painting(Arity(2), 1, 1, {0, 1}, upper), top("e4"));
}

TEST(Restriction, IndexAndShapeErrors) {
  Frame d = generic_frame(2, 2, 1);
  EXPECT_THROW(eval_restr_frame(Arity(2), 1, 1, {1, 0}, d), IndexError);
  EXPECT_THROW(eval_restr_frame(Arity(2), 1, 1, {0, 2}, d), IndexError);
  EXPECT_THROW(eval_restr_frame(Arity(2), 2, 1, {0, 0}, d), ShapeError);
  // A top element has no faces: q <= n-p rules it out.
  EXPECT_THROW(eval_restr_painting(Arity(2), 0, 1, {1, 0}, top("a")), IndexError);
  EXPECT_THROW(eval_restr_painting(Arity(2), 0, 0, {0, 0}, top("a")), ShapeError);
}

TEST(Restriction, FacesLandInEnumeration) {
  for (int nu = 1; nu <= 2; ++nu) {
    auto D = tower(nu, 3, [](int k, const Frame& d) { return k == 0 ? 2 : 1 + static_cast<int>(d.key().size()) % 2; });
    Enumerator en(D);
    Restrictor R{Arity(nu)};
    for (int n = 0; n <= (nu == 1 ? 2 : 1); ++n) {
      auto fr = sweep_frame_membership(en, R, n);
      EXPECT_TRUE(fr.ok()) << fr.failures.front();
      EXPECT_GT(fr.membership_checks, 0u);
    }
    for (int n = 0; n <= 1; ++n) {
      auto pr = sweep_painting_membership(en, R, n);
      EXPECT_TRUE(pr.ok());
      EXPECT_GT(pr.membership_checks, 0u);
    }
  }
}

TEST(Coherence, RankZeroAlwaysHolds) {
  Frame star;
  for (const auto& c : coh_indices(1, 0, Arity(2))) EXPECT_TRUE(check_coh_frame(Arity(2), 1, 0, c, star));
}

TEST(Coherence, PaintingBaseCaseIsIdentity) {
  // r = 0: both sides are restr_{q,eps}(l[omega]) literally.
  Painting c = generic_painting(2, 3, 0);
  Restrictor R{Arity(2)};
  for (const auto& idx : coh_indices(1, 0, Arity(2))) {
    if (idx.r != 0) continue;
    auto [lhs, rhs] = coh_painting_sides(R, 1, 0, idx, c);
    EXPECT_EQ(lhs, R.painting_raw(1, 0, idx.q, idx.eps, c.layer()[static_cast<std::size_t>(idx.omega)]));
    EXPECT_EQ(lhs, rhs);
  }
}

TEST(Coherence, SweepHoldsOnInstances) {
  for (int nu = 1; nu <= 2; ++nu)
    for (int s = 1; s <= 2; ++s) {
      auto D = tower(nu, 3, [s](int k, const Frame& d) { return k == 0 ? s + 1 : 1 + static_cast<int>(d.key().size()) % s; });
      Enumerator en(D);
      Restrictor R{Arity(nu)};
      auto f = sweep_coh_frame(en, R, 0);
      auto p = sweep_coh_painting(en, R, 0);
      EXPECT_TRUE(f.ok());
      EXPECT_TRUE(p.ok());
      EXPECT_GT(f.frame_checks, 0u);
      EXPECT_GT(p.painting_checks, 0u);
    }
}

TEST(Coherence, MutatedRestrictionIsCaught) {
  auto D = tower(2, 3, [](int k, const Frame& d) { return k == 0 ? 2 : 1 + static_cast<int>(d.key().size() % 2); }, true);
  Enumerator en(D);
  int reached = 0;
  for (auto kind : {RestrMutation::Kind::swap_layer, RestrMutation::Kind::shift_base,
                    RestrMutation::Kind::swap_frame_layer})
    for (int rank = 0; rank <= 2; ++rank)
      for (int q = 0; q <= 2; ++q) {
        Restrictor bad(Arity(2), RestrMutation{kind, rank, q});
        auto s = sweep_all(en, bad);
        if (bad.mutation_hits() == 0) {
          EXPECT_TRUE(s.ok());
          continue;
        }
        ++reached;
        EXPECT_FALSE(s.ok()) << to_string(bad.mutation());
      }
  EXPECT_EQ(reached, 4);
}

TEST(Coherence, ReversedEdgesWithNothingAboveAreStillAValidShape) {
  // At depth 2 no square constrains the edges, so reading every edge backwards
  // is just another binary set.
  auto D = tower(2, 2, [](int k, const Frame&) { return k == 0 ? 2 : 2; }, true);
  Enumerator en(D);
  Restrictor flipped(Arity(2), RestrMutation{RestrMutation::Kind::shift_base, 0, 0});
  EXPECT_TRUE(sweep_all(en, flipped).ok());
  EXPECT_GT(flipped.mutation_hits(), 0u);
}

TEST(Validate, EmptyIsValid) {
  TruncatedNuSet D{Arity(2)};
  auto r = validate(D);
  EXPECT_TRUE(r.valid());
}

TEST(Validate, MissingKeyIsNamed) {
  auto D = points_then_singletons(2, 3, 2);
  auto levels = D.levels();
  std::string victim = std::next(levels[2].fibers.begin(), 3)->first;
  levels[2].fibers.erase(victim);
  auto r = validate(TruncatedNuSet(Arity(2), levels));
  ASSERT_FALSE(r.valid());
  ASSERT_EQ(r.issues.size(), 1u);
  EXPECT_EQ(r.issues[0].kind, "missing-key");
  EXPECT_EQ(r.issues[0].detail, victim);
  EXPECT_EQ(r.issues[0].level, 2);
}

TEST(Validate, ExtraAndMalformedKeys) {
  auto D = points_then_singletons(2, 2, 2);
  auto levels = D.levels();
  levels[1].fibers["(*;[#q|#q])"] = {"x0"};
  levels[1].fibers["(*;oops"] = {"x0"};
  auto r = validate(TruncatedNuSet(Arity(2), levels));
  ASSERT_EQ(r.issues.size(), 2u);
  std::set<std::string> kinds{r.issues[0].kind, r.issues[1].kind};
  EXPECT_EQ(kinds, (std::set<std::string>{"extra-key", "malformed-key"}));
}

TEST(Validate, BadLabelsAndLevelIndex) {
  auto D = points_then_singletons(1, 2, 2);
  auto levels = D.levels();
  levels[0].fibers["*"] = {"x1", "x0"};
  auto r = validate(TruncatedNuSet(Arity(1), levels));
  EXPECT_FALSE(r.valid());
  levels = D.levels();
  levels[1].level = 5;
  EXPECT_FALSE(validate(TruncatedNuSet(Arity(1), levels)).valid());
}

TEST(Validate, GeneratedInstancesAreValid) {
  for (int nu = 1; nu <= 2; ++nu) {
    auto D = tower(nu, 3, [](int k, const Frame& d) { return 1 + static_cast<int>(d.key().size() * 7 + k) % 3; });
    auto r = validate(D);
    EXPECT_TRUE(r.valid()) << r.render();
    EXPECT_GT(r.sweep.total(), 0u);
  }
}

TEST(CountLaw, BinarySquares) {
  for (int s = 1; s <= 3; ++s) {
    auto D = points_then_singletons(2, 2, s);
    EXPECT_EQ(enumerate_fullframe(D, 1).size(), static_cast<std::size_t>(s * s));
    EXPECT_EQ(enumerate_fullframe(D, 2).size(), static_cast<std::size_t>(s * s * s * s));
  }
}
