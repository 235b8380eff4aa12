#include <gtest/gtest.h>

#include "support.hpp"

using namespace zt_test;

TEST(TraceParse, ReadsFixture) {
  Trace t = sigma1();
  ASSERT_EQ(t.size(), 16u);
  EXPECT_EQ(format_label(t.symbols(), t.label(1)), "1|w(x)");
  EXPECT_EQ(format_label(t.symbols(), t.label(15)), "1|join(2)");
  EXPECT_EQ(t.event(3).index, 3u);
}

TEST(TraceParse, CommentsAndBlankLinesSkipped) {
  Trace t = parse_trace("# header\n\n  1|r(x)  \n# mid\n2|w(x)\n");
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(serialize_trace(t), "1|r(x)\n2|w(x)\n");
}

TEST(TraceParse, EmptyInputIsEmptyTrace) {
  EXPECT_TRUE(parse_trace("").empty());
  EXPECT_TRUE(parse_trace("# only a comment\n").empty());
}

TEST(TraceParse, MalformedLineReportsLine) {
  try {
    parse_trace("1|r(x)\n1|frob(x)\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_trace("1r(x)\n"), ParseError);
  EXPECT_THROW(parse_trace("1|r(x\n"), ParseError);
  EXPECT_THROW(parse_trace("1|r()\n"), ParseError);
}

TEST(TraceParse, MissingFileIsIoFailure) {
  EXPECT_THROW(load_trace("/nonexistent/trace"), std::ios_base::failure);
}

TEST(TraceParse, RoundTrip) {
  Trace t = sigma1();
  EXPECT_EQ(parse_trace(serialize_trace(t)), t);
}

TEST(Trace, EventOutOfRange) {
  Trace t = sigma2();
  EXPECT_THROW(t.event(0), UsageError);
  EXPECT_THROW(t.event(12), UsageError);
}

TEST(Trace, SliceKeepsNames) {
  Trace t = sigma1();
  Trace s = t.slice(3, 6);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(serialize_trace(s), "2|r(x)\n2|acq(l)\n2|w(y)\n2|rel(l)\n");
}

TEST(Trace, MatchTable) {
  Trace t = sigma1();
  auto m = match_table(t);
  EXPECT_EQ(m[4], std::optional<std::size_t>(6));
  EXPECT_EQ(m[6], std::optional<std::size_t>(4));
  EXPECT_EQ(m[8], std::optional<std::size_t>(9));
  EXPECT_FALSE(m[1].has_value());
  EXPECT_EQ(match_event(t, 12)->index, 14u);
  EXPECT_THROW(match_event(t, 1), UsageError);
}

TEST(Trace, UnmatchedLockOps) {
  Trace t = parse_trace("1|acq(l)\n1|rel(m)\n");
  auto m = match_table(t);
  EXPECT_FALSE(m[1].has_value());
  EXPECT_FALSE(m[2].has_value());
}

TEST(Trace, ReentrantMatching) {
  Trace t = parse_trace("1|acq(l)\n1|acq(l)\n1|rel(l)\n1|rel(l)\n");
  auto m = match_table(t);
  EXPECT_EQ(m[2], std::optional<std::size_t>(3));
  EXPECT_EQ(m[1], std::optional<std::size_t>(4));
}

TEST(Trace, Projection) {
  Trace t = sigma1();
  auto p = project(t, th(t.symbols(), "2"));
  ASSERT_EQ(p.size(), 8u);
  EXPECT_EQ(p.front().index, 3u);
  EXPECT_EQ(p.back().index, 14u);
}

TEST(Trace, Stats) {
  Trace t = sigma1();
  auto st = trace_stats(t);
  EXPECT_EQ(st.n_events, 16u);
  EXPECT_EQ(st.threads.size(), 2u);
  EXPECT_EQ(st.locks.size(), 1u);
  EXPECT_EQ(st.vars.size(), 2u);
  EXPECT_EQ(st.wvars.size(), 2u);
  EXPECT_EQ(st.rvars.size(), 2u);  // (1,x) and (2,x)
  EXPECT_EQ(st.max_reentrancy, 1u);
}

TEST(Trace, ReadsAndWrites) {
  Trace t = sigma1();
  const auto& s = t.symbols();
  EXPECT_EQ(reads_of(t, th(s, "2"), var(s, "x")), (std::vector<std::size_t>{3, 11}));
  EXPECT_EQ(writes_of(t, var(s, "y")), (std::vector<std::size_t>{5, 10, 13, 16}));
  EXPECT_EQ(first_of(writes_of(t, var(s, "y"))), std::optional<std::size_t>(5));
  EXPECT_EQ(last_of(reads_of(t, th(s, "1"), var(s, "x"))), std::optional<std::size_t>(7));
  EXPECT_FALSE(first_of({}).has_value());
}

TEST(Validate, FixturesAreClean) {
  EXPECT_TRUE(validate(sigma1()).empty());
  EXPECT_TRUE(validate(sigma2()).empty());
}

TEST(Validate, StructuralErrors) {
  EXPECT_TRUE(has_errors(validate(parse_trace("2|r(x)\n1|fork(2)\n"))));
  EXPECT_TRUE(has_errors(validate(parse_trace("1|fork(1)\n"))));
  EXPECT_TRUE(has_errors(validate(parse_trace("1|fork(2)\n1|fork(2)\n"))));
  EXPECT_TRUE(has_errors(validate(parse_trace("1|join(2)\n"))));
  EXPECT_TRUE(has_errors(validate(parse_trace("1|fork(2)\n3|join(2)\n"))));
  EXPECT_TRUE(has_errors(validate(parse_trace("1|acq(l)\n2|acq(l)\n"))));
}

TEST(Validate, UnmatchedLockOpsAreWarnings) {
  auto d = validate(parse_trace("1|rel(l)\n2|acq(m)\n"));
  ASSERT_EQ(d.size(), 2u);
  EXPECT_FALSE(has_errors(d));
  EXPECT_EQ(d[0].event, 1u);
}
