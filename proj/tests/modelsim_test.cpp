#include <gtest/gtest.h>

#include "egyptfrac/modelsim.hpp"

using namespace egyptfrac;

TEST(CounterRng, DeterministicAndStreamSeparated) {
    const CounterRng a(42, 0), b(42, 0), c(42, 1), d(43, 0);
    int same_c = 0, same_d = 0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        EXPECT_EQ(a.bits(i), b.bits(i));
        same_c += a.bits(i) == c.bits(i);
        same_d += a.bits(i) == d.bits(i);
        const double u = a.uniform(i);
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
    EXPECT_EQ(same_c, 0);
    EXPECT_EQ(same_d, 0);
}

TEST(CounterRng, UniformMoments) {
    const CounterRng r(9, 5);
    double s = 0.0, s2 = 0.0;
    const int N = 200000;
    for (int i = 0; i < N; ++i) {
        const double u = r.uniform(static_cast<std::uint64_t>(i));
        s += u;
        s2 += u * u;
    }
    EXPECT_NEAR(s / N, 0.5, 0.005);
    EXPECT_NEAR(s2 / N - (s / N) * (s / N), 1.0 / 12.0, 0.002);
}

TEST(ModelMoments, ClosedFormMatchesDirectSums) {
    const auto prof = discrete_profile(200, 1.0);
    const auto mom = model_moments(prof);
    double mean = 0.0, var = 0.0;
    for (std::uint64_t m = 1; m <= 200; ++m) {
        const double p = prof.probability(m);
        mean += p / static_cast<double>(m);
        var += p * (1 - p) / static_cast<double>(m * m);
    }
    EXPECT_NEAR(mom.mean, 1.0, 1e-10);
    EXPECT_NEAR(mom.mean, mean, 1e-14);
    EXPECT_NEAR(mom.variance, var, 1e-15);
    EXPECT_GT(mom.third_abs_sum, 0.0);
    EXPECT_TRUE(std::isfinite(mom.berry_esseen_ratio()));
}

TEST(SampleModel, ReproducibleAndExact) {
    const auto prof = discrete_profile(100, 1.0);
    const auto a = sample_model(prof, 7, 3);
    const auto b = sample_model(prof, 7, 3);
    EXPECT_EQ(a.subset, b.subset);
    long double direct = 0.0L;
    for (auto m : a.subset) direct += 1.0L / static_cast<long double>(m);
    EXPECT_NEAR(a.z.to_double(), static_cast<double>(direct), 1e-13);
    EXPECT_TRUE(std::is_sorted(a.subset.begin(), a.subset.end()));
}

TEST(SampleModel, InclusionFrequenciesTrackProfile) {
    const auto prof = discrete_profile(50, 0.7);
    std::vector<int> hits(51, 0);
    const int T = 20000;
    for (int t = 0; t < T; ++t) {
        for (auto m : sample_model(prof, 1, static_cast<std::uint64_t>(t)).subset) ++hits[m];
    }
    for (std::uint64_t m = 1; m <= 50; ++m) {
        const double p = prof.probability(m);
        const double se = std::sqrt(p * (1 - p) / T);
        EXPECT_NEAR(hits[m] / static_cast<double>(T), p, 5 * se + 1e-3) << m;
    }
}

TEST(EstimateProb, ExactComparisonMatchesRational) {
    // compare with a slow estimator that uses only exact sums
    const auto prof = discrete_profile(40, 1.0);
    const Rational x(1);
    const auto est = estimate_prob_at_most(prof, x, 2000, 5);
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < 2000; ++t) hits += sample_model(prof, 5, t).z <= x ? 1 : 0;
    EXPECT_DOUBLE_EQ(est.estimate, static_cast<double>(hits) / 2000.0);
    EXPECT_EQ(est.trials, 2000u);
    EXPECT_FALSE(est.truncated);
}

TEST(EstimateProb, NearHalfForModerateN) {
    const auto prof = discrete_profile(2000, 1.0);
    const auto est = estimate_prob_at_most(prof, Rational(1), 20000, 11);
    const auto mom = model_moments(prof);
    EXPECT_NEAR(est.estimate, 0.5, 5.0 / std::sqrt(prof.c * 2000.0) + 4 * est.std_error);
    EXPECT_NEAR(est.mean, mom.mean, 6 * std::sqrt(mom.variance / 20000.0));
    EXPECT_NEAR(est.variance, mom.variance, 0.1 * mom.variance);
}

TEST(EstimateProb, DeadlineTruncates) {
    const auto prof = discrete_profile(1000, 1.0);
    const auto est = estimate_prob_at_most(prof, Rational(1), 100'000'000, 1, std::chrono::steady_clock::now());
    EXPECT_TRUE(est.truncated);
    EXPECT_LT(est.trials, 100'000'000u);
    EXPECT_THROW(estimate_prob_at_most(prof, Rational(1), 0, 1), domain_error);
}
