#include <gtest/gtest.h>

#include "support.hpp"

using namespace zt_test;

TEST(SlpParse, FixtureExpandsToTrace) {
  EXPECT_EQ(expand(sigma1_slp()), sigma1());
  EXPECT_EQ(expand(sigma2_slp()), sigma2());
}

TEST(SlpParse, RoundTrip) {
  Slp g = sigma1_slp();
  std::string text = serialize_slp(g);
  EXPECT_EQ(text.rfind("slp v1\nstart @0\n@0 := @1 @2\n", 0), 0u);
  EXPECT_EQ(parse_slp(text), g);
}

TEST(SlpParse, EmptyStartRule) {
  Slp g = parse_slp("slp v1\nstart @0\n@0 :=\n");
  EXPECT_TRUE(expand(g).empty());
  EXPECT_EQ(serialize_slp(g), "slp v1\nstart @0\n@0 :=\n");
  auto d = validate_slp(g);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].severity, Severity::Warning);
}

TEST(SlpParse, Errors) {
  EXPECT_THROW(parse_slp(""), ParseError);
  EXPECT_THROW(parse_slp("slp v2\nstart @0\n@0 := 1|r(x)\n"), ParseError);
  EXPECT_THROW(parse_slp("slp v1\n@0 := 1|r(x)\n"), ParseError);
  EXPECT_THROW(parse_slp("slp v1\nstart @0\n@0 = 1|r(x)\n"), ParseError);
  EXPECT_THROW(parse_slp("slp v1\nstart @0\n@0 := 1|r(x)\n@0 := 1|w(x)\n"), ParseError);
  EXPECT_THROW(parse_slp("slp v1\nstart @1\n@0 := 1|r(x)\n"), ParseError);
  EXPECT_THROW(parse_slp("slp v1\nstart @0\n@0 := 1|r(x) @x\n"), ParseError);
  try {
    parse_slp("slp v1\nstart @0\n@0 := 1|bad(x)\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(SlpParse, LeadingCommentsSkipped) {
  Slp g = parse_slp("# note\n\nslp v1\nstart @0\n@0 := 1|r(x)\n");
  EXPECT_EQ(expand(g).size(), 1u);
}

TEST(SlpValidate, UndefinedReferenceAndCycle) {
  Slp undef = parse_slp("slp v1\nstart @0\n@0 := @1\n");
  EXPECT_TRUE(has_errors(validate_slp(undef)));
  EXPECT_THROW(bottom_up_order(undef), GrammarError);
  EXPECT_THROW(expand(undef), GrammarError);

  Slp cyc = parse_slp("slp v1\nstart @0\n@0 := @1\n@1 := 1|r(x) @0\n");
  EXPECT_TRUE(has_errors(validate_slp(cyc)));
  EXPECT_THROW(bottom_up_order(cyc), GrammarError);
}

TEST(SlpValidate, EmptyNonStartRuleIsError) {
  EXPECT_TRUE(has_errors(validate_slp(parse_slp("slp v1\nstart @0\n@0 := @1\n@1 :=\n"))));
}

TEST(SlpValidate, UnreachableIsWarning) {
  auto d = validate_slp(parse_slp("slp v1\nstart @0\n@0 := 1|r(x)\n@5 := 1|w(x)\n"));
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].severity, Severity::Warning);
}

TEST(Slp, BottomUpOrderChildrenFirst) {
  Slp g = sigma1_slp();
  auto order = bottom_up_order(g);
  ASSERT_EQ(order.size(), 8u);
  EXPECT_EQ(order.back(), 0u);
  std::map<std::uint32_t, std::size_t> pos;
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  for (const auto& [id, body] : g.rules)
    for (const auto& s : body)
      if (!s.is_terminal()) EXPECT_LT(pos[s.rule_id()], pos[id]);
}

TEST(Slp, ChunkLengths) {
  auto len = chunk_lengths(sigma1_slp());
  EXPECT_EQ(len.at(0), 16u);
  EXPECT_EQ(len.at(1), 10u);  // A
  EXPECT_EQ(len.at(2), 6u);   // B
  EXPECT_EQ(len.at(6), 4u);   // F
}

TEST(Slp, GrammarStats) {
  auto g = grammar_stats(sigma1_slp());
  EXPECT_EQ(g.n_terminals, 11u);
  EXPECT_EQ(g.n_nonterminals, 8u);
  EXPECT_EQ(g.size, 19u);
  EXPECT_EQ(g.expanded_length, 16u);
  EXPECT_DOUBLE_EQ(g.compression_ratio, 16.0 / 19.0);
}

TEST(SlpNormalize, SplitsLongRunsInMixedRules) {
  Slp g = parse_slp(
      "slp v1\nstart @0\n@0 := 1|r(a) 1|r(b) 1|r(c) @1 1|w(a)\n@1 := 1|w(b) 1|w(c) 1|w(d) 1|w(e)\n");
  Slp n = normalize(g, 3);
  EXPECT_EQ(expand(n), expand(g));
  // @0 had a run of 3 terminals; the run of 1 after @1 stays.
  ASSERT_EQ(n.rules.at(0).size(), 3u);
  EXPECT_FALSE(n.rules.at(0)[0].is_terminal());
  EXPECT_TRUE(n.rules.at(0)[2].is_terminal());
  // All-terminal rules are left alone.
  EXPECT_EQ(n.rules.at(1), g.rules.at(1));
  EXPECT_TRUE(validate_slp(n).empty());
}

TEST(SlpNormalize, BelowThresholdUnchanged) {
  Slp g = sigma1_slp();
  EXPECT_EQ(normalize(g, 8), g);
  EXPECT_THROW(normalize(g, 1), UsageError);
}
