#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "egyptfrac/errors.hpp"
#include "egyptfrac/rational.hpp"

namespace egyptfrac {

namespace detail {

// Balanced pairwise summation keeps intermediate denominators small compared
// with a left fold over a long list of unit fractions.
inline Rational reciprocal_tree_sum(std::span<const std::uint64_t> a) {
    if (a.empty()) return Rational{};
    if (a.size() == 1) return Rational::unit(a[0]);
    const auto mid = a.size() / 2;
    return reciprocal_tree_sum(a.first(mid)) + reciprocal_tree_sum(a.subspan(mid));
}

}  // namespace detail

/// s(A) = sum of 1/a over A, exact and in lowest terms.
/// Elements are expected to be distinct; 0 is rejected.
inline Rational reciprocal_sum(std::span<const std::uint64_t> elements) {
    for (auto a : elements) {
        if (a == 0) throw domain_error("reciprocal_sum: element 0 has no reciprocal");
    }
    return detail::reciprocal_tree_sum(elements);
}

inline Rational reciprocal_sum(const std::vector<std::uint64_t>& elements) {
    return reciprocal_sum(std::span<const std::uint64_t>(elements));
}

/// H_n = 1 + 1/2 + ... + 1/n.
inline Rational harmonic(std::uint64_t n) {
    if (n == 0) throw domain_error("harmonic: n must be at least 1");
    std::vector<std::uint64_t> all(n);
    std::iota(all.begin(), all.end(), std::uint64_t{1});
    return detail::reciprocal_tree_sum(all);
}

/// lcm(1, 2, ..., n).
inline BigInt lcm_range(std::uint64_t n) {
    if (n == 0) throw domain_error("lcm_range: n must be at least 1");
    BigInt l = 1;
    for (std::uint64_t m = 2; m <= n; ++m) {
        const BigInt bm = m;
        l = l / gcd(l, bm) * bm;
    }
    return l;
}

/// A prime power q = p^a.
struct PrimePower {
    std::uint64_t p;
    std::uint64_t q;
    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Smallest-prime-factor table for 1..limit. Immutable after construction.
class FactorSieve {
public:
    explicit FactorSieve(std::uint64_t limit) : limit_(limit), spf_(limit + 1, 0) {
        if (limit == 0) throw domain_error("FactorSieve: limit must be positive");
        for (std::uint64_t i = 2; i <= limit; ++i) {
            if (spf_[i] != 0) continue;
            spf_[i] = static_cast<std::uint32_t>(i);
            for (std::uint64_t j = i * i; j <= limit; j += i) {
                if (spf_[j] == 0) spf_[j] = static_cast<std::uint32_t>(i);
            }
        }
        if (limit >= 1) spf_[1] = 1;
    }

    std::uint64_t limit() const { return limit_; }

    std::uint64_t smallest_prime_factor(std::uint64_t m) const {
        check(m);
        return spf_[m];
    }

    bool is_prime(std::uint64_t m) const { return m >= 2 && smallest_prime_factor(m) == m; }

    /// (p, p^e) for each prime p dividing m, ascending in p.
    std::vector<PrimePower> prime_power_factors(std::uint64_t m) const {
        check(m);
        std::vector<PrimePower> out;
        while (m > 1) {
            const std::uint64_t p = spf_[m];
            std::uint64_t q = 1;
            while (m % p == 0) {
                m /= p;
                q *= p;
            }
            out.push_back({p, q});
        }
        return out;
    }

    /// Largest p^{v_p(m)} over primes p | m; 1 for m = 1.
    std::uint64_t max_prime_power_factor(std::uint64_t m) const {
        check(m);
        std::uint64_t best = 1;
        while (m > 1) {
            const std::uint64_t p = spf_[m];
            std::uint64_t q = 1;
            while (m % p == 0) {
                m /= p;
                q *= p;
            }
            best = std::max(best, q);
        }
        return best;
    }

    /// True iff every prime power factor of m is at most t.
    bool is_powersmooth(std::uint64_t m, std::uint64_t t) const {
        return max_prime_power_factor(m) <= t;
    }

private:
    void check(std::uint64_t m) const {
        if (m == 0 || m > limit_) {
            throw domain_error("FactorSieve: " + std::to_string(m) + " outside [1, " +
                               std::to_string(limit_) + "]");
        }
    }

    std::uint64_t limit_;
    std::vector<std::uint32_t> spf_;
};

inline std::uint64_t max_prime_power_factor(std::uint64_t m, const FactorSieve& sieve) {
    return sieve.max_prime_power_factor(m);
}

inline bool is_powersmooth(std::uint64_t m, std::uint64_t t, const FactorSieve& sieve) {
    return sieve.is_powersmooth(m, t);
}

/// Number of m in [1, n] whose prime power factors are all <= t.
inline std::uint64_t powersmooth_count(std::uint64_t n, std::uint64_t t, const FactorSieve& sieve) {
    if (n == 0 || t == 0) throw domain_error("powersmooth_count: n and t must be positive");
    std::uint64_t count = 0;
    for (std::uint64_t m = 1; m <= n; ++m) count += sieve.is_powersmooth(m, t) ? 1 : 0;
    return count;
}

inline std::uint64_t powersmooth_count(std::uint64_t n, std::uint64_t t) {
    if (n == 0 || t == 0) throw domain_error("powersmooth_count: n and t must be positive");
    return powersmooth_count(n, t, FactorSieve(n));
}

/// All prime powers p^a (a >= 1) in [lo, hi], largest first.
inline std::vector<PrimePower> prime_powers_in(std::uint64_t lo, std::uint64_t hi,
                                               const FactorSieve& sieve) {
    if (lo > hi) throw domain_error("prime_powers_in: lo > hi");
    std::vector<PrimePower> out;
    for (std::uint64_t m = hi; m >= std::max<std::uint64_t>(lo, 2); --m) {
        const auto p = sieve.smallest_prime_factor(m);
        std::uint64_t r = m;
        while (r % p == 0) r /= p;
        if (r == 1) out.push_back({p, m});
    }
    return out;
}

inline std::vector<PrimePower> prime_powers_in(std::uint64_t lo, std::uint64_t hi) {
    if (lo > hi) throw domain_error("prime_powers_in: lo > hi");
    return prime_powers_in(lo, hi, FactorSieve(std::max<std::uint64_t>(hi, 2)));
}

/// Density of n^u-smooth integers for u in (1/2, 1]: 1 + ln u.
inline double smooth_density_linear(double u) {
    if (!(u > 0.5 && u <= 1.0)) {
        throw domain_error("smooth_density_linear: u must lie in (1/2, 1]");
    }
    return 1.0 + std::log(u);
}

}  // namespace egyptfrac
