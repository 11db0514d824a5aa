#include <gtest/gtest.h>

#include <random>

#include "egyptfrac/counting.hpp"
#include "oracles.hpp"

using namespace egyptfrac;

namespace {

Rational frac(std::int64_t p, std::int64_t q) { return Rational(BigInt(p), BigInt(q)); }

// Oracle counts from the dictionary subset-sum table.
std::pair<std::uint64_t, std::uint64_t> oracle_counts(std::uint64_t n, std::int64_t p, std::int64_t q) {
    const auto [L, table] = oracle::subset_sum_table(n);
    std::uint64_t exact = 0, at_most = 0;
    for (const auto& [s, c] : table) {
        // compare s / L with p / q as s q <=> p L
        const unsigned __int128 lhs = s * static_cast<unsigned __int128>(q);
        const unsigned __int128 rhs = L * static_cast<unsigned __int128>(p);
        if (lhs == rhs) exact += c;
        if (lhs <= rhs) at_most += c;
    }
    return {exact, at_most};
}

struct Frozen {
    std::uint64_t n;
    std::int64_t p, q;
    std::uint64_t exact, at_most;
};

// Independently computed subset-sum counts.
const std::vector<Frozen> kFrozen{
    {6, 1, 3, 1, 5},           {6, 1, 1, 2, 26},          {6, 2, 1, 1, 57},
    {10, 1, 2, 2, 60},         {10, 3, 2, 2, 532},        {12, 1, 3, 2, 49},
    {12, 1, 1, 3, 921},        {20, 1, 1, 22, 122316},    {20, 1, 2, 12, 7745},
    {24, 1, 1, 41, 1434130},   {24, 3, 2, 42, 5136525},   {30, 1, 1, 200, 58415377},
    {30, 2, 1, 224, 538216528}, {30, 1, 3, 27, 80191},
};

}  // namespace

TEST(Counting, TinyHandChecked) {
    // only {1}
    EXPECT_EQ(count_brute({3, Rational(1), CountMode::Exact}).count, 1);
    // {2,3,6} and {1} both sum to 1 in [6]
    EXPECT_EQ(count_brute({6, Rational(1), CountMode::Exact}).count, 2);
    // sums <= 1/2 in [2]: {}, {2}
    EXPECT_EQ(count_brute({2, frac(1, 2), CountMode::AtMost}).count, 2);
}

TEST(Counting, BruteMatchesOracleTable) {
    for (std::uint64_t n = 1; n <= 14; ++n) {
        for (auto [p, q] : std::vector<std::pair<int, int>>{{1, 3}, {1, 2}, {1, 1}, {3, 2}, {2, 1}, {5, 6}}) {
            const auto [e, a] = oracle_counts(n, p, q);
            EXPECT_EQ(count_brute({n, frac(p, q), CountMode::Exact}).count, e) << n << " " << p << "/" << q;
            EXPECT_EQ(count_brute({n, frac(p, q), CountMode::AtMost}).count, a) << n << " " << p << "/" << q;
        }
    }
}

TEST(Counting, MitmMatchesFrozenValues) {
    for (const auto& f : kFrozen) {
        EXPECT_EQ(count_mitm({f.n, frac(f.p, f.q), CountMode::Exact}).count, f.exact) << f.n;
        EXPECT_EQ(count_mitm({f.n, frac(f.p, f.q), CountMode::AtMost}).count, f.at_most) << f.n;
    }
}

TEST(Counting, FrozenValuesAgreeWithOracle) {
    for (const auto& f : kFrozen) {
        if (f.n > 24) continue;
        const auto [e, a] = oracle_counts(f.n, f.p, f.q);
        EXPECT_EQ(e, f.exact);
        EXPECT_EQ(a, f.at_most);
    }
}

TEST(Counting, MitmAgreesWithBruteOnRandomTargets) {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 40; ++trial) {
        const std::uint64_t n = 1 + gen() % 18;
        const auto q = static_cast<std::int64_t>(1 + gen() % 12);
        const auto p = static_cast<std::int64_t>(1 + gen() % (3 * q));
        for (auto mode : {CountMode::Exact, CountMode::AtMost}) {
            EXPECT_EQ(count_mitm({n, frac(p, q), mode}).count, count_brute({n, frac(p, q), mode}).count)
                << n << " " << p << "/" << q;
        }
    }
}

TEST(Counting, WidthSelectionIsTransparent) {
    const CountQuery q{22, Rational(1), CountMode::AtMost};
    const auto narrow = count_mitm_with<std::uint64_t>(q);
    const auto wide = count_mitm_with<unsigned __int128>(q);
    const auto big = count_mitm_with<BigInt>(q);
    EXPECT_EQ(narrow.count, wide.count);
    EXPECT_EQ(wide.count, big.count);
}

TEST(Counting, OverflowIsReportedNotWrapped) {
    EXPECT_THROW(count_mitm_with<std::uint64_t>({46, Rational(1), CountMode::Exact}), overflow_error);
}

TEST(Counting, AtMostIsMonotoneInX) {
    BigInt prev = 0;
    for (int k = 1; k <= 16; ++k) {
        const auto c = count_mitm({16, frac(k, 4), CountMode::AtMost}).count;
        EXPECT_GE(c, prev);
        prev = c;
    }
    EXPECT_EQ(prev, BigInt(1) << 16);  // x = 4 exceeds H_16
}

TEST(Counting, ExactWithUnreachableDenominatorIsZero) {
    // 11 does not divide lcm(1..10)
    EXPECT_EQ(count_mitm({10, frac(1, 11), CountMode::Exact}).count, 0);
}

TEST(Counting, CapsAndDomain) {
    EXPECT_THROW(count_brute({26, Rational(1), CountMode::Exact}), refusal_error);
    EXPECT_THROW(count_mitm({49, Rational(1), CountMode::Exact}), refusal_error);
    EXPECT_THROW(count_mitm({10, Rational(0), CountMode::Exact}), domain_error);
    EXPECT_THROW(count_brute({0, Rational(1), CountMode::Exact}), domain_error);
}

TEST(Enumerate, ListsExactRepresentations) {
    const auto reps = enumerate_representations(12, Rational(1), 100);
    ASSERT_EQ(reps.size(), 3u);
    EXPECT_EQ(reps[0], (std::vector<std::uint64_t>{1}));
    for (const auto& r : reps) {
        const auto o = oracle::direct_sum(r);
        EXPECT_EQ(o.num, 1);
        EXPECT_EQ(o.den, 1);
    }
    EXPECT_TRUE(std::is_sorted(reps.begin(), reps.end()));
    EXPECT_EQ(enumerate_representations(20, Rational(1), 1000).size(), 22u);
    EXPECT_EQ(enumerate_representations(20, Rational(1), 5).size(), 5u);
}
