#include <gtest/gtest.h>

#include "generator.hpp"
#include "support.hpp"

using namespace zt_test;

TEST(Generator, IncLoopShape) {
  Trace t = gen_trace({Pattern::IncLoop, 3, 2, 1, 1, 1});
  EXPECT_EQ(t.size(), 16u);
  EXPECT_EQ(serialize_trace(t.slice(1, 5)), "main|fork(t1)\nmain|fork(t2)\nt1|r(y)\nt1|w(y)\nt2|r(y)\n");
  EXPECT_TRUE(validate(t).empty());
}

TEST(Generator, LockLoopWrapsEachPair) {
  Trace t = gen_trace({Pattern::LockLoop, 2, 2, 1, 1, 1});
  EXPECT_EQ(t.size(), 2u + 2u + 2 * 2 * 4);
  EXPECT_EQ(format_label(t.symbols(), t.label(3)), "t1|acq(l)");
  EXPECT_TRUE(validate(t).empty());
}

TEST(Generator, RandomIsDeterministic) {
  GenSpec spec{Pattern::Random, 120, 4, 3, 4, 99};
  EXPECT_EQ(serialize_trace(gen_trace(spec)), serialize_trace(gen_trace(spec)));
  spec.seed = 100;
  EXPECT_NE(serialize_trace(gen_trace(spec)), serialize_trace(gen_trace(GenSpec{Pattern::Random, 120, 4, 3, 4, 99})));
}

TEST(Generator, RandomHonoursBoundsAndValidation) {
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    GenSpec spec = random_spec(1 + seed % 200, 1 + seed % 4, seed % 4, 1 + seed % 4, seed);
    Trace t = gen_trace(spec);
    EXPECT_EQ(t.size(), spec.iterations);
    EXPECT_FALSE(has_errors(validate(t))) << "seed " << seed;
    auto st = trace_stats(t);
    EXPECT_LE(st.threads.size(), spec.threads);
    EXPECT_LE(st.locks.size(), spec.locks);
    EXPECT_LE(st.vars.size(), spec.vars);
    EXPECT_LE(st.max_reentrancy, 3u);
  }
}

TEST(Generator, BadSpecs) {
  EXPECT_THROW(gen_trace({Pattern::Random, 10, 0, 1, 1, 1}), UsageError);
  EXPECT_THROW(gen_trace({Pattern::Random, 10, 2, 1, 0, 1}), UsageError);
  EXPECT_THROW(gen_trace({Pattern::IncLoop, 10, 0, 1, 1, 1}), UsageError);
  EXPECT_THROW(pattern_from_name("spiral"), UsageError);
  EXPECT_EQ(pattern_from_name("lock-loop"), Pattern::LockLoop);
  EXPECT_EQ(pattern_name(Pattern::Random), "random");
}
