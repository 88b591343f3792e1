#include <gtest/gtest.h>

#include <random>

#include "dlogic/dlogic.hpp"
#include "oracle.hpp"

using namespace dlogic;

namespace {

// w0 irreflexive below the rd-reflexive w1.
Frame spineFrame() { return frameFromPreorder(Relation(2, {{0, 0}, {1, 1}, {0, 1}}), WorldSet(0b10), {"w0", "w1"}); }
Frame clusterFrame() { return Frame(Relation::universal(2), Relation::universal(2), {"a", "b"}); }
Frame loopPoint() { return Frame(Relation(1, {{0, 0}}), Relation(1, {{0, 0}}), {"t"}); }
// Two irreflexive minimal worlds a, b below a reflexive c.
Frame vFrame() {
  return frameFromPreorder(Relation(3, {{0, 0}, {1, 1}, {2, 2}, {0, 2}, {1, 2}}), WorldSet(0b100), {"a", "b", "c"});
}

CPoint spine() { return CPoint("", "0"); }

CPoint randomPoint(std::mt19937_64& rng) {
  auto bits = [&](std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s.push_back(rng() % 2 ? '1' : '0');
    return s;
  };
  return CPoint(bits(rng() % 6), bits(1 + rng() % 4));
}

/// Worlds attained by points of [cell], over every point whose prefix and
/// period after the cell have length ≤ 4.
WorldSet sampledRealization(const LabelingScheme& sch, const std::string& cell) {
  WorldSet out;
  for (std::size_t pl = 0; pl <= 4; ++pl)
    for (std::uint64_t pb = 0; pb < (std::uint64_t{1} << pl); ++pb)
      for (std::size_t cl = 1; cl <= 4; ++cl)
        for (std::uint64_t cb = 0; cb < (std::uint64_t{1} << cl); ++cb) {
          std::string pre = cell, cyc;
          for (std::size_t i = 0; i < pl; ++i) pre.push_back((pb >> i) & 1U ? '1' : '0');
          for (std::size_t i = 0; i < cl; ++i) cyc.push_back((cb >> i) & 1U ? '1' : '0');
          out.insert(oracle::simulatePoint(sch, CPoint(pre, cyc)));
        }
  return out;
}

}  // namespace

TEST(CPoint, Canonical) {
  EXPECT_EQ(CPoint("0", "0"), CPoint("", "0"));
  EXPECT_EQ(CPoint("1010", "10").prefix(), "");
  EXPECT_EQ(CPoint("1010", "10").cycle(), "10");
  EXPECT_EQ(CPoint("", "0101").cycle(), "01");
  EXPECT_EQ(CPoint("01", "1"), CPoint("0", "1"));
  EXPECT_EQ(CPoint("001", "01").str(), "0(01)");
  EXPECT_THROW(CPoint("", ""), std::invalid_argument);
  EXPECT_THROW(CPoint("2", "0"), std::invalid_argument);
}

TEST(Metric, Examples) {
  EXPECT_EQ(dist(spine(), CPoint("1", "0")).value(), 1.0);
  for (std::size_t n = 0; n < 10; ++n) {
    const Distance d = dist(spine(), CPoint(std::string(n, '0') + "1", "0"));
    EXPECT_EQ(d.firstDifference, n);
    EXPECT_EQ(d.value(), std::ldexp(1.0, -static_cast<int>(n)));
  }
  EXPECT_TRUE(dist(CPoint("01", "10"), CPoint("01", "10")).isZero());
  EXPECT_EQ(dist(CPoint("01", "10"), CPoint("", "01")).firstDifference, 2U);  // 0110... vs 0101...
}

TEST(Metric, AxiomsRandom) {
  std::mt19937_64 rng(59);
  for (int t = 0; t < 1000; ++t) {
    const CPoint x = randomPoint(rng), y = randomPoint(rng), z = randomPoint(rng);
    const Distance dxy = dist(x, y), dyz = dist(y, z), dxz = dist(x, z);
    // reference: compare 64 bits directly
    std::optional<std::size_t> first;
    for (std::size_t i = 0; i < 64 && !first; ++i)
      if (x.bit(i) != y.bit(i)) first = i;
    ASSERT_EQ(dxy.firstDifference, first);
    ASSERT_EQ(dxy.isZero(), x == y);
    ASSERT_EQ(dxy, dist(y, x));
    ASSERT_GE(dxy.value(), 0.0);
    ASSERT_LE(dxz.value(), std::max(dxy.value(), dyz.value()));
    ASSERT_LE(dxz.value(), dxy.value() + dyz.value());
  }
}

TEST(Cell, Nesting) {
  std::mt19937_64 rng(61);
  for (std::size_t n = 1; n < 12; ++n) {
    const Cell yn(std::string(n, '0')), yn1(std::string(n + 1, '0'));
    EXPECT_TRUE(yn.contains(yn1));
    EXPECT_FALSE(yn1.contains(yn));
    EXPECT_TRUE(yn1.contains(spine()));
    EXPECT_FALSE(yn1.contains(CPoint(std::string(n, '0') + "1", "0")));
    for (int t = 0; t < 50; ++t) {
      CPoint y = randomPoint(rng);
      if (t % 2 == 0) y = CPoint(std::string(n, '0') + y.prefix(), y.cycle());
      if (yn.contains(y)) { ASSERT_TRUE(inBall(spine(), n - 1, y)); }
    }
  }
  EXPECT_THROW(Cell("012"), std::invalid_argument);
}

TEST(BuildScheme, SpineFrame) {
  const LabelingScheme sch = buildScheme(spineFrame());
  EXPECT_EQ(sch.rootCase(), SchemeCase::IrreflexiveRoot);
  EXPECT_EQ(evalPoint(sch, spine()), 0U);
  EXPECT_EQ(evalPoint(sch, CPoint("001", "01")), 1U);
  EXPECT_EQ(evalPoint(sch, CPoint("1", "0")), 1U);
  EXPECT_EQ(realization(sch, Cell("0")), WorldSet(0b11));
  EXPECT_EQ(realization(sch, Cell("1")), WorldSet(0b10));
  EXPECT_EQ(realization(sch, Cell("")), WorldSet(0b11));
  const SchemeReport rep = verifyScheme(sch, stateCoveringPoints(sch));
  EXPECT_TRUE(rep.passed());
  EXPECT_TRUE(rep.failures.empty());

  // f⁻¹(w0) is the spine point only: the cells realizing w0 are exactly [0^n].
  for (std::size_t d = 0; d <= 6; ++d)
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << d); ++b) {
      std::string s;
      for (std::size_t i = 0; i < d; ++i) s.push_back((b >> i) & 1U ? '1' : '0');
      EXPECT_EQ(realization(sch, Cell(s)).contains(0), s == std::string(d, '0')) << s;
    }
}

TEST(BuildScheme, ClusterFrame) {
  const LabelingScheme sch = buildScheme(clusterFrame());
  EXPECT_EQ(sch.rootCase(), SchemeCase::ReflexiveRoot);
  for (std::size_t d = 0; d <= 5; ++d)
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << d); ++b) {
      std::string s;
      for (std::size_t i = 0; i < d; ++i) s.push_back((b >> i) & 1U ? '1' : '0');
      EXPECT_EQ(realization(sch, Cell(s)), WorldSet(0b11));
    }
  EXPECT_TRUE(verifyScheme(sch, stateCoveringPoints(sch)).passed());
}

TEST(BuildScheme, ConstantScheme) {
  const LabelingScheme sch = buildScheme(loopPoint());
  std::mt19937_64 rng(67);
  for (int t = 0; t < 20; ++t) EXPECT_EQ(evalPoint(sch, randomPoint(rng)), 0U);
  EXPECT_EQ(realization(sch, Cell("0110")), WorldSet(0b1));
  EXPECT_TRUE(verifyScheme(sch, stateCoveringPoints(sch)).passed());
}

TEST(BuildScheme, SplitFrame) {
  const LabelingScheme sch = buildScheme(vFrame());
  EXPECT_EQ(sch.rootCase(), SchemeCase::Split);
  EXPECT_EQ(realization(sch, Cell("1")), WorldSet(0b101));
  EXPECT_EQ(realization(sch, Cell("0")), WorldSet(0b110));
  EXPECT_TRUE(verifyScheme(sch, stateCoveringPoints(sch)).passed());
}

TEST(BuildScheme, Preconditions) {
  const Frame frameA(Relation(2, {{0, 0}, {1, 1}, {1, 0}}), Relation(2, {{0, 1}, {1, 0}}));
  const Frame frameB(Relation(1, {{0, 0}}), Relation(1));
  const Frame twoLoops(Relation::identity(2), Relation::identity(2));
  const Frame notS4D(Relation(2, {{0, 1}}), Relation::inequality(2));
  auto message = [](const Frame& f) {
    try {
      buildScheme(f);
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message(frameB).find("DS"), std::string::npos);
  EXPECT_NE(message(Frame(Relation(2, {{0, 0}, {1, 1}, {0, 1}, {1, 0}}), Relation::universal(2) - Relation(2, {{1, 1}})))
                .find("T1"),
            std::string::npos);
  EXPECT_NE(message(twoLoops).find("W×W"), std::string::npos);
  EXPECT_NE(message(notS4D).find("S4D"), std::string::npos);
  EXPECT_FALSE(message(frameA).empty());
}

TEST(VerifyScheme, MutantTwoSpines) {
  // An unlabeled root with both children on the spine of w0: w0 is attained
  // at two points.
  const LabelingScheme good = buildScheme(spineFrame());
  std::vector<SchemeState> states = good.states();
  SchemeState top;
  top.kind = SchemeState::Kind::Split;
  top.child = {good.root(), good.root()};
  states.push_back(top);
  const LabelingScheme bad(spineFrame(), states, states.size() - 1, SchemeCase::Split);
  const SchemeReport rep = verifyScheme(bad, stateCoveringPoints(bad));
  EXPECT_TRUE(rep.surjective);
  EXPECT_FALSE(rep.singletonFibers);
  EXPECT_FALSE(rep.passed());
  ASSERT_FALSE(rep.failures.empty());
  EXPECT_EQ(rep.failures.front().substr(0, 3), "(c)");
}

TEST(VerifyScheme, MutantDenseIrreflexive) {
  // Every cell returns to the w0 state, so w0 is attained in every cell.
  std::vector<SchemeState> states(2);
  states[0] = SchemeState{SchemeState::Kind::Spine, 0, 0, {0, 1}};
  states[1] = SchemeState{SchemeState::Kind::Spine, 1, 0, {0, 1}};
  const LabelingScheme bad(spineFrame(), states, 0, SchemeCase::IrreflexiveRoot);
  const SchemeReport rep = verifyScheme(bad, stateCoveringPoints(bad));
  EXPECT_FALSE(rep.singletonFibers);
  EXPECT_FALSE(rep.passed());
}

TEST(LabelingScheme, RejectsBadStates) {
  std::vector<SchemeState> loop(1);
  loop[0].child = {0, 0};
  EXPECT_THROW(LabelingScheme(loopPoint(), loop, 0, SchemeCase::ReflexiveRoot), std::invalid_argument);
  std::vector<SchemeState> far(1);
  far[0].label = 0;
  far[0].child = {0, 3};
  EXPECT_THROW(LabelingScheme(loopPoint(), far, 0, SchemeCase::ReflexiveRoot), std::invalid_argument);
}

TEST(Realization, MatchesSampling) {
  for (const Frame& f : {spineFrame(), clusterFrame(), loopPoint(), vFrame()}) {
    const LabelingScheme sch = buildScheme(f);
    for (const char* cell : {"", "0", "1", "00", "01", "10", "11", "010"})
      EXPECT_EQ(realization(sch, Cell(cell)), sampledRealization(sch, cell)) << cell;
  }
}

TEST(EvalPoint, MatchesSimulation) {
  std::mt19937_64 rng(71);
  for (const Frame& f : {spineFrame(), clusterFrame(), loopPoint(), vFrame()}) {
    const LabelingScheme sch = buildScheme(f);
    for (int t = 0; t < 200; ++t) {
      const CPoint x = randomPoint(rng);
      ASSERT_EQ(evalPoint(sch, x), oracle::simulatePoint(sch, x)) << x.str();
    }
  }
}

TEST(CaseII, ConesCycle) {
  // w0 below three reflexive worlds.
  Relation r = Relation::identity(4);
  for (World y = 1; y < 4; ++y) r.insert(0, y);
  const Frame f = frameFromPreorder(r, WorldSet(0b1110));
  const LabelingScheme sch = buildScheme(f);
  ASSERT_EQ(sch.rootCase(), SchemeCase::IrreflexiveRoot);
  const std::size_t n = 3;
  std::vector<World> assigned;
  for (std::size_t j = 0; j < 40; ++j) {
    const auto& s = sch.states()[sch.stateAt(Cell(std::string(j, '0') + "1"))];
    ASSERT_TRUE(s.label.has_value());
    assigned.push_back(*s.label);
  }
  for (std::size_t j = 0; j + n <= assigned.size(); ++j) {
    std::set<World> window(assigned.begin() + j, assigned.begin() + j + n);
    EXPECT_EQ(window, (std::set<World>{1, 2, 3})) << j;
  }
  EXPECT_TRUE(verifyScheme(sch, stateCoveringPoints(sch)).passed());
}

TEST(Pullback, Examples) {
  auto vs = VerifiedScheme::certify(buildScheme(spineFrame()));
  ASSERT_TRUE(vs.has_value());
  const Valuation theta{{"p", WorldSet(0b10)}};
  EXPECT_TRUE(pullbackCheck(*vs, theta, spine(), parse("D p")));
  EXPECT_FALSE(pullbackCheck(*vs, theta, spine(), parse("p")));
  EXPECT_TRUE(pullbackCheck(*vs, theta, CPoint("1", "01"), parse("p -> p")));
}

TEST(Pullback, Unverified) {
  std::vector<SchemeState> states(2);
  states[0] = SchemeState{SchemeState::Kind::Spine, 0, 0, {0, 1}};
  states[1] = SchemeState{SchemeState::Kind::Spine, 1, 0, {0, 1}};
  EXPECT_FALSE(VerifiedScheme::certify(LabelingScheme(spineFrame(), states, 0, SchemeCase::IrreflexiveRoot)));
}

TEST(Pullback, AgreesWithQuotientSpace) {
  // For the spine scheme, Θ-truth sets are unions of the two fibers {x0} and
  // X - {x0}. Every cell around x0 meets both fibers, every other point has a
  // cell missing x0, and X - {x0} is infinite; that fixes interior and D on
  // the quotient.
  struct Q {
    bool atX0;
    bool atRest;
  };
  auto eval = [](auto&& self, const Formula& g, const Valuation& theta) -> Q {
    switch (g.op()) {
      case Op::Letter: {
        auto it = theta.find(g.name());
        const WorldSet s = it == theta.end() ? WorldSet{} : it->second;
        return {s.contains(0), s.contains(1)};
      }
      case Op::Bottom: return {false, false};
      case Op::Implies: {
        Q a = self(self, g.lhs(), theta), b = self(self, g.rhs(), theta);
        return {!a.atX0 || b.atX0, !a.atRest || b.atRest};
      }
      case Op::Box: {
        Q a = self(self, g.operand(), theta);
        return {a.atX0 && a.atRest, a.atRest};
      }
      case Op::Diff: {
        Q a = self(self, g.operand(), theta);
        return {a.atRest, a.atX0 && a.atRest};
      }
    }
    return {false, false};
  };
  auto vs = VerifiedScheme::certify(buildScheme(spineFrame()));
  ASSERT_TRUE(vs.has_value());
  std::mt19937_64 rng(73);
  for (int t = 0; t < 300; ++t) {
    const Valuation theta = oracle::randomValuation(rng, 2, {"p", "q"});
    const Formula g = oracle::randomFormula(rng, 3, {"p", "q"});
    const CPoint x = t % 3 == 0 ? spine() : randomPoint(rng);
    const Q q = eval(eval, g, theta);
    ASSERT_EQ(pullbackCheck(*vs, theta, x, g), x == spine() ? q.atX0 : q.atRest) << render(g) << " at " << x.str();
  }
}

TEST(Property, SuiteOfSmallFrames) {
  std::size_t built = 0;
  for (std::size_t n = 1; n <= 4; ++n)
    for (const auto& shape : canonicalShapes(n)) {
      if (!shape.t1 || !shape.ds) continue;
      const LabelingScheme sch = buildScheme(shape.frame());
      const SchemeReport rep = verifyScheme(sch, stateCoveringPoints(sch));
      ASSERT_TRUE(rep.passed()) << (rep.failures.empty() ? "" : rep.failures.front());
      ++built;
    }
  EXPECT_GT(built, 10U);
}
