#include <gtest/gtest.h>

#include <random>

#include "twistl/kloosterman.hpp"

using namespace twistl;

TEST(Kloosterman, SmallValues) {
    EXPECT_DOUBLE_EQ(kloosterman(4, 9, 1).value, 1.0);
    EXPECT_NEAR(kloosterman(1, 2, 3).value, 2.0, 1e-12);
    EXPECT_NEAR(kloosterman(1, 1, 5).value, 2.0 + 2.0 * std::cos(4.0 * std::numbers::pi / 5.0), 1e-12);
    EXPECT_THROW(kloosterman(1, 1, 0), DomainError);
}

TEST(Kloosterman, RamanujanSum) {
    // S(0, n; c) is the Ramanujan sum; for prime c it is c - 1 or -1
    EXPECT_NEAR(kloosterman(0, 0, 13).value, 12.0, 1e-12);
    EXPECT_NEAR(kloosterman(0, 5, 13).value, -1.0, 1e-12);
}

TEST(Kloosterman, Symmetries) {
    for (i64 c = 2; c < 40; ++c)
        for (i64 m = -3; m <= 5; ++m)
            for (i64 n = 0; n <= 6; ++n) {
                EXPECT_NEAR(kloosterman(m, n, c).value, kloosterman(n, m, c).value, 1e-10);
                if (m != 0 && std::gcd(std::abs(m), c) == 1) {
                    EXPECT_NEAR(kloosterman(m, n, c).value, kloosterman(1, m * n, c).value, 1e-10);
                }
            }
}

TEST(Kloosterman, WeilBoundSample) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<i64> d(-1000, 1000);
    for (i64 c = 1; c <= 200; ++c)
        for (int i = 0; i < 20; ++i) {
            const i64 m = d(rng), n = d(rng);
            EXPECT_LE(std::abs(kloosterman(m, n, c).value), weil_bound(m, n, c) + 1e-9);
        }
}

TEST(KloostermanTable, MatchesDirectEvaluation) {
    for (const i64 q : {11, 37}) {
        const std::vector<KloostermanTarget> targets{{1, 1}, {2, 3}, {4, 9}, {q, 1}, {q, q}, {6, 35}};
        const KloostermanTable t(q, targets, 300);
        for (i64 c = 1; c <= 300; ++c)
            for (std::size_t j = 0; j < targets.size(); ++j)
                ASSERT_NEAR(t.value(c, j), kloosterman(targets[j].m, targets[j].n, c * q).value, 1e-9)
                    << "q=" << q << " c=" << c << " j=" << j;
    }
}

TEST(KloostermanTable, LargePrimeFactorsUseTheWalk) {
    // c q with prime factors above the walk threshold
    const i64 q = 11;
    const std::vector<KloostermanTarget> targets{{1, 2}, {3, 5}, {7, 7}};
    const KloostermanTable t(q, targets, 2000);
    for (const i64 c : {41, 43, 82, 97, 101 * 3, 1999, 2 * 997})
        for (std::size_t j = 0; j < targets.size(); ++j)
            EXPECT_NEAR(t.value(c, j), kloosterman(targets[j].m, targets[j].n, c * q).value, 1e-8) << c;
}

TEST(KloostermanTable, BoundsChecked) {
    const KloostermanTable t(11, {{1, 1}}, 10);
    EXPECT_THROW(t.value(11, 0), DomainError);
    EXPECT_THROW(t.value(1, 1), DomainError);
    EXPECT_THROW(KloostermanTable(12, {{1, 1}}, 10), DomainError);
}
