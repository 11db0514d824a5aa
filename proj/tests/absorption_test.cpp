#include <gtest/gtest.h>

#include <set>

#include "egyptfrac/absorption.hpp"
#include "oracles.hpp"

using namespace egyptfrac;

namespace {

AbsorptionParams with_seed(std::uint64_t seed) {
    AbsorptionParams p;
    p.seed = seed;
    return p;
}

}  // namespace

TEST(AbsorptionConfig, PartitionIsDisjointAndWellFormed) {
    const auto cfg = build_config(5000, Rational(1), with_seed(1));
    EXPECT_EQ(cfg.K, 12u);
    EXPECT_EQ(cfg.smooth_bound, 208u);
    std::set<std::uint64_t> seen;
    for (auto r : cfg.reservoir) {
        EXPECT_EQ(r % 12, 0u);
        EXPECT_TRUE(seen.insert(r).second);
    }
    EXPECT_EQ(cfg.reservoir.size(), 5000u / 12);
    for (const auto& [q, pool] : cfg.pools) {
        EXPECT_TRUE(oracle::brute_is_prime_power(q));
        EXPECT_GT(q, cfg.L);
        for (auto m : pool) {
            EXPECT_GT(m, 2500u);
            EXPECT_EQ(oracle::trial_max_prime_power(m), q);
            EXPECT_TRUE(seen.insert(m).second);
        }
    }
    for (auto m : cfg.universe) {
        EXPECT_LE(oracle::trial_max_prime_power(m), cfg.smooth_bound);
        EXPECT_TRUE(seen.insert(m).second) << m;
    }
}

TEST(AbsorptionConfig, RejectsBadParameters) {
    AbsorptionParams p;
    p.L = 1;
    EXPECT_THROW(build_config(5000, Rational(1), p), config_error);
    p.L = 4;
    try {
        build_config(40, Rational(1), p);
        FAIL() << "expected config_error";
    } catch (const config_error& e) {
        EXPECT_NE(std::string(e.what()).find("minimum is n = 48"), std::string::npos);
    }
    p.eta = 1.0;
    EXPECT_THROW(build_config(5000, Rational(1), p), config_error);
}

TEST(BaseSample, StaysBelowCapAndInUniverse) {
    const auto cfg = build_config(5000, Rational(1), with_seed(3));
    const std::set<std::uint64_t> uni(cfg.universe.begin(), cfg.universe.end());
    for (std::uint64_t attempt = 0; attempt < 5; ++attempt) {
        const auto base = sample_base_set(cfg, attempt);
        EXPECT_LE(reciprocal_sum(base.base_set), Rational(BigInt(3), BigInt(4)));
        EXPECT_EQ(base.x0, Rational(1) - reciprocal_sum(base.base_set));
        for (auto m : base.base_set) EXPECT_TRUE(uni.count(m));
    }
}

TEST(Cancellation, FirstStepClearsPrime) {
    // x0 = 1/7 on a tiny instance: the cofactor set must cancel 7 from the denominator
    AbsorptionParams p;
    p.L = 4;
    const auto cfg = build_config(200, Rational(1), p);
    const Rational x0(BigInt(1), BigInt(7));
    const auto out = cancel_prime_powers(cfg, {}, x0);
    ASSERT_TRUE(out.success) << out.failure;
    ASSERT_GE(out.steps.size(), 1u);
    const auto& st = out.steps[0];
    EXPECT_EQ(st.q, 7u);
    // sum of inverses of B modulo 7 equals u (v/q)^{-1} = 1
    EXPECT_EQ(inverse_sum_mod(st.B, 7), 1u);
    EXPECT_NE(st.x_after.den() % 7, 0);
    EXPECT_EQ(BigInt(12) % out.x_f.den(), 0);
    Rational rest = x0;
    for (const auto& s : out.steps) rest -= reciprocal_sum(detail::elements_of(s));
    EXPECT_EQ(out.x_f, rest);
}

TEST(Cancellation, StepsAreDescendingAndDisjoint) {
    const auto cfg = build_config(5000, Rational(1), with_seed(5));
    const auto base = sample_base_set(cfg, 0);
    const auto out = cancel_prime_powers(cfg, base.base_set, base.x0);
    if (!out.success) GTEST_SKIP() << "attempt failed: " << out.failure;
    std::set<std::uint64_t> used(base.base_set.begin(), base.base_set.end());
    std::uint64_t last = UINT64_MAX;
    Rational cur = base.x0;
    for (const auto& st : out.steps) {
        EXPECT_LT(st.q, last);
        last = st.q;
        EXPECT_LE(st.B.size(), cfg.params.s_max);
        for (auto b : st.B) {
            EXPECT_NE(b % st.p, 0u);
            EXPECT_TRUE(used.insert(st.q * b).second);
            EXPECT_NE((st.q * b) % cfg.K, 0u);
        }
        EXPECT_EQ(st.x_before, cur);
        cur = st.x_after;
        EXPECT_GT(cur.sign(), 0);
        EXPECT_NE(cur.den() % st.p, 0);
    }
}

TEST(UnitFractionSearch, FindsSmallDecompositions) {
    const auto r = unit_fraction_search(Rational(BigInt(5), BigInt(6)), 10, 100000);
    ASSERT_TRUE(r.found);
    EXPECT_EQ(reciprocal_sum(r.D), Rational(BigInt(5), BigInt(6)));
    EXPECT_EQ(r.D, (std::vector<std::uint64_t>{2, 3}));
    EXPECT_TRUE(unit_fraction_search(Rational{}, 10, 10).found);
    // 1/7 cannot be written with denominators <= 6
    EXPECT_FALSE(unit_fraction_search(Rational(BigInt(1), BigInt(7)), 6, 100000).found);
    // H_5 is the largest reachable sum on [5]
    EXPECT_TRUE(unit_fraction_search(harmonic(5), 5, 100000).found);
    EXPECT_FALSE(unit_fraction_search(harmonic(5) + Rational(BigInt(1), BigInt(60)), 5, 100000).found);
}

TEST(Verify, RepresentationChecks) {
    EXPECT_TRUE(verify_representation({2, 3, 6}, 6, Rational(1)));
    EXPECT_FALSE(verify_representation({2, 3, 6}, 5, Rational(1)));
    EXPECT_FALSE(verify_representation({2, 2}, 6, Rational(1)));
    EXPECT_FALSE(verify_representation({2, 4}, 6, Rational(1)));
    EXPECT_TRUE(denominator_admissible(Rational(BigInt(1), BigInt(12)), 10));
    EXPECT_FALSE(denominator_admissible(Rational(BigInt(1), BigInt(7)), 10));
    EXPECT_FALSE(denominator_admissible(Rational(BigInt(1), BigInt(8)), 10));
}

TEST(Construct, SucceedsAndReplays) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto t = construct_representation(5000, Rational(1), with_seed(seed));
        ASSERT_TRUE(t.success) << seed << ": " << t.failure;
        const auto o = reciprocal_sum(t.final_set);
        EXPECT_EQ(o, Rational(1));
        EXPECT_TRUE(replay_trace(t));
        EXPECT_TRUE(std::is_sorted(t.final_set.begin(), t.final_set.end()));
        EXPECT_LE(t.final_set.back(), 5000u);
    }
}

TEST(Construct, OtherTargets) {
    for (const auto& x : {Rational(BigInt(1), BigInt(2)), Rational(BigInt(3), BigInt(2)), Rational(2)}) {
        const auto t = construct_representation(5000, x, with_seed(1));
        ASSERT_TRUE(t.success) << x << ": " << t.failure;
        EXPECT_TRUE(verify_representation(t.final_set, 5000, x));
        EXPECT_TRUE(replay_trace(t));
    }
}

TEST(Construct, TamperedTraceFailsReplay) {
    auto t = construct_representation(5000, Rational(1), with_seed(2));
    ASSERT_TRUE(t.success);
    auto broken = t;
    broken.final_set.pop_back();
    EXPECT_FALSE(replay_trace(broken));
    if (!t.steps.empty()) {
        broken = t;
        broken.steps[0].x_after += Rational(BigInt(1), BigInt(5000));
        EXPECT_FALSE(replay_trace(broken));
    }
}

TEST(Construct, InadmissibleTargetRejected) {
    EXPECT_THROW(construct_representation(5000, Rational(BigInt(1), BigInt(4999)), with_seed(1)), domain_error);
    EXPECT_THROW(construct_representation(5000, Rational(0), with_seed(1)), domain_error);
}
