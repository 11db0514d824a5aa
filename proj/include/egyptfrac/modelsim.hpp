#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "egyptfrac/entropy.hpp"
#include "egyptfrac/exactmath.hpp"
#include "egyptfrac/random.hpp"
#include "egyptfrac/rational.hpp"

namespace egyptfrac {

/// Closed-form moments of Z = sum_m Y_m / m with Y_m ~ Bernoulli(p_m).
struct MomentSummary {
    double mean = 0.0;
    double variance = 0.0;
    /// sum over m of E|Y_m/m - p_m/m|^3
    double third_abs_sum = 0.0;

    /// sum rho / (sum zeta)^{3/2}; infinite for a degenerate model.
    double berry_esseen_ratio() const {
        return variance > 0 ? third_abs_sum / std::pow(variance, 1.5) : INFINITY;
    }
};

inline MomentSummary model_moments(const EntropyProfile& profile) {
    MomentSummary s;
    for (std::uint64_t m = 1; m <= profile.n; ++m) {
        const double p = profile.p[m - 1];
        const double inv = 1.0 / static_cast<double>(m);
        const double hi = (1.0 - p) * inv;
        const double lo = p * inv;
        s.mean += p * inv;
        s.variance += p * (1.0 - p) * inv * inv;
        s.third_abs_sum += p * hi * hi * hi + (1.0 - p) * lo * lo * lo;
    }
    return s;
}

/// One draw of (Y_1, ..., Y_n) and its exact reciprocal sum.
struct ModelSample {
    std::vector<std::uint64_t> subset;
    Rational z;
};

namespace detail {

// Y_m for trial `trial` uses counter m of the stream keyed by (seed, trial).
template <class Visit>
void draw_model(const EntropyProfile& profile, std::uint64_t seed, std::uint64_t trial, Visit&& visit) {
    const CounterRng rng(seed, trial);
    for (std::uint64_t m = 1; m <= profile.n; ++m) {
        const double p = profile.p[m - 1];
        if (p > 0.0 && rng.uniform(m) < p) visit(m);
    }
}

}  // namespace detail

inline ModelSample sample_model(const EntropyProfile& profile, std::uint64_t seed, std::uint64_t trial = 0) {
    ModelSample s;
    detail::draw_model(profile, seed, trial, [&](std::uint64_t m) { s.subset.push_back(m); });
    s.z = reciprocal_sum(s.subset);
    return s;
}

struct ProbabilityEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    /// empirical moments of Z over the trials
    double mean = 0.0;
    double variance = 0.0;
    /// trials whose comparison with x needed exact rational arithmetic
    std::uint64_t exact_comparisons = 0;
    bool truncated = false;
};

/// Monte Carlo estimate of Pr[Z <= x]. Each comparison is exact: Z is summed
/// in floating point with a rounding bound and recomputed as a rational when
/// the bound straddles x.
inline ProbabilityEstimate estimate_prob_at_most(
    const EntropyProfile& profile, const Rational& x, std::uint64_t trials, std::uint64_t seed,
    std::optional<std::chrono::steady_clock::time_point> deadline = std::nullopt) {
    if (trials == 0) throw domain_error("estimate_prob_at_most: trials must be positive");
    ProbabilityEstimate est;
    est.seed = seed;
    const double xd = x.to_double();
    std::uint64_t hits = 0;
    double mean = 0.0;
    double m2 = 0.0;
    std::vector<std::uint64_t> chosen;
    std::uint64_t done = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        if (deadline && (t & 1023) == 0 && std::chrono::steady_clock::now() > *deadline) {
            est.truncated = true;
            break;
        }
        chosen.clear();
        double z = 0.0;
        detail::draw_model(profile, seed, t, [&](std::uint64_t m) {
            chosen.push_back(m);
            z += 1.0 / static_cast<double>(m);
        });
        // recursive summation of k correctly rounded terms: |error| <= (k+1) u z
        const double bound = (static_cast<double>(chosen.size()) + 2.0) * 0x1.0p-52 * z;
        bool at_most;
        if (z + bound < xd) {
            at_most = true;
        } else if (z - bound > xd) {
            at_most = false;
        } else {
            ++est.exact_comparisons;
            at_most = reciprocal_sum(chosen) <= x;
        }
        hits += at_most ? 1 : 0;
        ++done;
        const double delta = z - mean;
        mean += delta / static_cast<double>(done);
        m2 += delta * (z - mean);
    }
    est.trials = done;
    if (done > 0) {
        const double f = static_cast<double>(hits) / static_cast<double>(done);
        est.estimate = f;
        est.std_error = std::sqrt(f * (1.0 - f) / static_cast<double>(done));
        est.mean = mean;
        est.variance = done > 1 ? m2 / static_cast<double>(done - 1) : 0.0;
    }
    return est;
}

}  // namespace egyptfrac
