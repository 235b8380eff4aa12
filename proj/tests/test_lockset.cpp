#include <gtest/gtest.h>

#include "generator.hpp"
#include "lockset_compressed.hpp"
#include "sequitur.hpp"
#include "support.hpp"

using namespace zt_test;

namespace {

std::vector<VarId> sorted(const std::set<VarId>& s) { return {s.begin(), s.end()}; }

// Unmatched acquires / releases of (t, l) counted straight from the match table.
std::pair<std::uint64_t, std::uint64_t> open_counts(const Trace& t, ThreadId th, LockId l) {
  auto m = match_table(t);
  std::uint64_t acq = 0, rel = 0;
  for (std::size_t i = 1; i <= t.size(); ++i) {
    const auto& e = t.label(i);
    if (e.thread != th || !e.is_lock_op() || e.lock() != l || m[i]) continue;
    (e.op == OpKind::Acquire ? acq : rel)++;
  }
  return {acq, rel};
}

}  // namespace

TEST(LocksHeld, OpenAcquiresAndLaterUnmatchedReleases) {
  Trace t = parse_trace("1|w(a)\n1|rel(m)\n1|acq(l)\n1|w(b)\n1|rel(l)\n1|w(c)\n");
  const auto& s = t.symbols();
  EXPECT_EQ(locksheld_oracle(t, 1), (std::set<LockId>{lk(s, "m")}));
  EXPECT_EQ(locksheld_oracle(t, 4), (std::set<LockId>{lk(s, "l")}));
  EXPECT_TRUE(locksheld_oracle(t, 6).empty());
  EXPECT_THROW(locksheld_oracle(t, 2), UsageError);
}

TEST(LocksHeld, SigmaOne) {
  Trace t = sigma1();
  EXPECT_EQ(locksheld_oracle(t, 5), (std::set<LockId>{lk(t.symbols(), "l")}));
  EXPECT_TRUE(locksheld_oracle(t, 10).empty());
}

TEST(Eraser, SigmaOneViolatesXAndY) {
  Trace t = sigma1();
  auto r = eraser_detect(t);
  const auto& s = t.symbols();
  EXPECT_EQ(r.violations, (std::vector<VarId>{var(s, "x"), var(s, "y")}));
  EXPECT_EQ(sorted(lockset_oracle(t).violations), r.violations);
}

TEST(Eraser, SigmaTwoIsClean) {
  Trace t = sigma2();
  auto r = eraser_detect(t);
  EXPECT_TRUE(r.violations.empty());
  EXPECT_TRUE(lockset_oracle(t).violations.empty());
  const auto& s = t.symbols();
  auto l = LsLock::real(lk(s, "l"));
  EXPECT_EQ(r.locksets.at({th(s, "1"), var(s, "y")}), (LsSet{LsLock::dummy(th(s, "1")), l}));
  EXPECT_EQ(r.locksets.at({th(s, "2"), var(s, "y")}), (LsSet{LsLock::dummy(th(s, "2")), l}));
}

TEST(Eraser, DummyAndReadMarker) {
  Trace t = parse_trace("1|acq(l)\n1|r(x)\n1|rel(l)\n1|w(x)\n");
  const auto& s = t.symbols();
  auto r = eraser_detect(t);
  EXPECT_TRUE(r.violations.empty());  // single thread: its dummy lock is common
  LsSet want{LsLock::dummy(th(s, "1"))};
  EXPECT_EQ(r.locksets.at({th(s, "1"), var(s, "x")}), want);
}

TEST(Eraser, ReadOnlySharingIsNotAViolation) {
  Trace t = parse_trace("1|fork(2)\n1|r(x)\n2|r(x)\n");
  EXPECT_TRUE(eraser_detect(t).violations.empty());
  EXPECT_TRUE(lockset_oracle(t).violations.empty());
}

TEST(Eraser, MatchesOracleOnRandomTraces) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    Trace t = gen_trace(random_spec(10 + seed % 90, 1 + seed % 4, seed % 4, 1 + seed % 4, seed));
    auto got = eraser_detect(t);
    auto want = lockset_oracle(t);
    EXPECT_EQ(got.violations, sorted(want.violations)) << "seed " << seed;
    EXPECT_EQ(got.locksets, want.locksets) << "seed " << seed;
  }
}

TEST(LocksetSummary, GoldensOnSigmaTwo) {
  Slp g = sigma2_slp();
  auto res = analyze_slp_lockset(g, true);
  const auto& s = g.symbols;
  // rules: S=0 U=1 V=2
  EXPECT_EQ(res.summaries.at(1).open_acq(th(s, "1"), lk(s, "l")), 0u);
  LsSet want{LsLock::dummy(th(s, "2")), LsLock::real(lk(s, "l"))};
  EXPECT_EQ(res.summaries.at(2).lockset(th(s, "2"), var(s, "y")), LockSetValue::finite(want));
  EXPECT_TRUE(res.violations.empty());
}

TEST(LocksetSummary, SigmaOneViolations) {
  Slp g = sigma1_slp();
  auto res = analyze_slp_lockset(g);
  EXPECT_EQ(res.violations, (std::vector<VarId>{var(g.symbols, "x"), var(g.symbols, "y")}));
}

TEST(LocksetSummary, UnaccessedPairIsTop) {
  Trace t = parse_trace("1|acq(l)\n2|r(x)\n");
  LsUniverse u = LsUniverse::of(t.symbols());
  auto s = ls_fold(t.labels(), u);
  EXPECT_TRUE(s.lockset(th(t.symbols(), "1"), var(t.symbols(), "x")).top);
  EXPECT_EQ(s.open_acq(th(t.symbols(), "1"), lk(t.symbols(), "l")), 1u);
}

TEST(LocksetSummary, CountersMatchDefinitionOnEveryRule) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Trace t = gen_trace(random_spec(20 + seed % 80, 1 + seed % 4, 1 + seed % 3, 1 + seed % 4, seed));
    Slp g = sequitur_compress(t);
    const auto& s = g.symbols;
    auto res = analyze_slp_lockset(g, true);
    for (const auto& [id, sum] : res.summaries) {
      Trace c = chunk(g, id);
      for (std::uint32_t ti = 0; ti < s.threads.size(); ++ti)
        for (std::uint32_t li = 0; li < s.locks.size(); ++li) {
          auto [acq, rel] = open_counts(c, ThreadId{ti}, LockId{li});
          EXPECT_EQ(sum.open_acq(ThreadId{ti}, LockId{li}), acq) << "seed " << seed << " rule @" << id;
          EXPECT_EQ(sum.open_rel(ThreadId{ti}, LockId{li}), rel) << "seed " << seed << " rule @" << id;
        }
      auto want = lockset_oracle(c);
      for (std::uint32_t ti = 0; ti < s.threads.size(); ++ti)
        for (std::uint32_t xi = 0; xi < s.vars.size(); ++xi) {
          auto it = want.locksets.find({ThreadId{ti}, VarId{xi}});
          auto got = sum.lockset(ThreadId{ti}, VarId{xi});
          if (it == want.locksets.end())
            EXPECT_TRUE(got.top) << "seed " << seed << " rule @" << id;
          else
            EXPECT_EQ(got, LockSetValue::finite(it->second)) << "seed " << seed << " rule @" << id;
        }
    }
    EXPECT_EQ(res.violations, sorted(lockset_oracle(t).violations)) << "seed " << seed;
  }
}

TEST(LocksetSummary, CombineIsAssociative) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    Trace t = gen_trace(random_spec(30, 3, 2, 3, seed));
    LsUniverse u = LsUniverse::of(t.symbols());
    auto l = t.labels();
    auto a = ls_fold(l.subspan(0, 10), u);
    auto b = ls_fold(l.subspan(10, 10), u);
    auto c = ls_fold(l.subspan(20), u);
    auto left = ls_combine(ls_combine(a, b), c);
    auto right = ls_combine(a, ls_combine(b, c));
    for (std::uint32_t ti = 0; ti < u.threads; ++ti)
      for (std::uint32_t xi = 0; xi < u.vars; ++xi)
        EXPECT_EQ(left.lockset(ThreadId{ti}, VarId{xi}), right.lockset(ThreadId{ti}, VarId{xi})) << "seed " << seed;
  }
}
