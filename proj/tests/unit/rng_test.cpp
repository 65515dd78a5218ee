#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "synthgen/rng.hpp"

using synthgen::CounterRng;
using synthgen::derive_seed;

TEST(Rng, SameKeySameStream) {
    CounterRng a(42), b(42);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, CounterJumpMatchesReplay) {
    CounterRng a(7);
    for (int i = 0; i < 10; ++i) a.next_u64();
    CounterRng b(7, 10);
    EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, DerivedSeedsDifferByLabelAndIndex) {
    EXPECT_NE(derive_seed(1, "split"), derive_seed(1, "train"));
    EXPECT_NE(derive_seed(1, "split"), derive_seed(2, "split"));
    EXPECT_EQ(derive_seed(1, "split"), derive_seed(1, "split"));
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(99, i));
    EXPECT_EQ(seen.size(), 1000u);
}

TEST(Rng, UniformRangeAndMean) {
    CounterRng r(3);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    // sd of the mean is sqrt(1/12/n) ~ 6.5e-4
    EXPECT_NEAR(sum / n, 0.5, 4e-3);
}

TEST(Rng, OpenUniformNeverZero) {
    CounterRng r(5);
    for (int i = 0; i < 100000; ++i) ASSERT_GT(r.uniform_open0(), 0.0);
}

TEST(Rng, BelowIsUnbiasedOverSmallRange) {
    CounterRng r(11);
    std::vector<int> counts(7, 0);
    const int n = 70000;
    for (int i = 0; i < n; ++i) ++counts[r.below(7)];
    for (int c : counts) EXPECT_NEAR(c, n / 7.0, 5.0 * std::sqrt(n / 7.0));
}

TEST(Rng, NormalMoments) {
    CounterRng r(17);
    const int n = 200000;
    double s = 0.0, s2 = 0.0, s4 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        s += z;
        s2 += z * z;
        s4 += z * z * z * z;
    }
    EXPECT_NEAR(s / n, 0.0, 0.01);
    EXPECT_NEAR(s2 / n, 1.0, 0.02);
    EXPECT_NEAR(s4 / n, 3.0, 0.1);
}
