#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "egyptfrac/errors.hpp"
#include "egyptfrac/rational.hpp"

namespace egyptfrac {

inline constexpr std::uint64_t kMaxModulus = 1'000'000;
// element count times modulus for the reconstruction table
inline constexpr std::uint64_t kMaxTableCells = 400'000'000;

/// b in [0, q) with a b = 1 (mod q).
inline std::uint64_t mod_inverse(std::int64_t a, std::uint64_t q) {
    if (q == 0) throw domain_error("mod_inverse: modulus must be positive");
    if (q == 1) return 0;
    const auto qi = static_cast<__int128>(q);
    __int128 r0 = static_cast<__int128>(a) % qi;
    if (r0 < 0) r0 += qi;
    __int128 r1 = qi;
    __int128 s0 = 1, s1 = 0;
    while (r1 != 0) {
        const __int128 t = r0 / r1;
        r0 -= t * r1;
        std::swap(r0, r1);
        s0 -= t * s1;
        std::swap(s0, s1);
    }
    if (r0 != 1) {
        throw domain_error("mod_inverse: " + std::to_string(a) + " is not invertible modulo " + std::to_string(q));
    }
    s0 %= qi;
    if (s0 < 0) s0 += qi;
    return static_cast<std::uint64_t>(s0);
}

/// Integer in (-q/2, q/2] congruent to v modulo q.
inline std::int64_t signed_representative(std::int64_t v, std::uint64_t q) {
    const auto qi = static_cast<std::int64_t>(q);
    std::int64_t r = v % qi;
    if (r < 0) r += qi;
    if (2 * r > qi) r -= qi;
    return r;
}

inline bool is_prime_power(std::uint64_t q) {
    if (q < 2) return false;
    std::uint64_t p = 0;
    for (std::uint64_t d = 2; d * d <= q; ++d) {
        if (q % d == 0) {
            p = d;
            break;
        }
    }
    if (p == 0) return true;
    while (q % p == 0) q /= p;
    return q == 1;
}

/// Elements of I in the order that defines lexicographic preference.
struct ModInstance {
    std::uint64_t q = 1;
    std::vector<std::uint64_t> elements;
    unsigned s_max = 0;

    void validate() const {
        if (q != 1 && !is_prime_power(q)) throw domain_error("modular instance: q = " + std::to_string(q) + " is not a prime power");
        if (q > kMaxModulus) throw refusal_error("modular instance: q exceeds the configured cap " + std::to_string(kMaxModulus));
        if (s_max > 250) throw refusal_error("modular instance: s_max is capped at 250");
        std::set<std::uint64_t> seen;
        for (auto e : elements) {
            if (e == 0 || std::gcd(e, q) != 1) {
                throw domain_error("modular instance: element " + std::to_string(e) + " is not coprime to q");
            }
            if (!seen.insert(e).second) throw domain_error("modular instance: duplicate element " + std::to_string(e));
        }
    }
};

/// Instance over the integers of [lo, hi] coprime to q, ascending.
inline ModInstance interval_instance(std::uint64_t q, std::uint64_t lo, std::uint64_t hi, unsigned s_max) {
    ModInstance inst{q, {}, s_max};
    for (std::uint64_t i = std::max<std::uint64_t>(lo, 1); i <= hi; ++i) {
        if (std::gcd(i, q) == 1) inst.elements.push_back(i);
    }
    inst.validate();
    return inst;
}

struct ModSubsetSolution {
    ModInstance instance;
    std::uint64_t target = 0;
    std::vector<std::uint64_t> subset;
    std::size_t size() const { return subset.size(); }
};

/// Sum of inverses of `subset` modulo q.
inline std::uint64_t inverse_sum_mod(const std::vector<std::uint64_t>& subset, std::uint64_t q) {
    std::uint64_t s = 0;
    for (auto e : subset) s = (s + mod_inverse(static_cast<std::int64_t>(e), q)) % q;
    return s;
}

/// Minimum-size subset of I whose inverses sum to target mod q; among the
/// minimum-size subsets the lexicographically first by position in
/// `instance.elements`. nullopt when no subset of size <= s_max exists.
inline std::optional<ModSubsetSolution> min_subset_inverse_sum(const ModInstance& instance, std::uint64_t target) {
    instance.validate();
    const std::uint64_t q = instance.q;
    if (q == 1) return ModSubsetSolution{instance, 0, {}};
    target %= q;
    if (target == 0) return ModSubsetSolution{instance, 0, {}};
    const std::size_t k = instance.elements.size();
    if (static_cast<std::uint64_t>(k + 1) * q > kMaxTableCells) {
        throw refusal_error("min_subset_inverse_sum: table of " + std::to_string(k + 1) + " x " + std::to_string(q) +
                            " cells exceeds the cap");
    }
    const std::uint8_t inf = static_cast<std::uint8_t>(instance.s_max + 1);
    std::vector<std::uint64_t> inv(k);
    for (std::size_t i = 0; i < k; ++i) inv[i] = mod_inverse(static_cast<std::int64_t>(instance.elements[i]), q);

    // best[i * q + r]: fewest elements among positions i..k-1 with inverse sum r
    std::vector<std::uint8_t> best((k + 1) * q, inf);
    best[k * q + 0] = 0;
    for (std::size_t i = k; i-- > 0;) {
        const std::uint8_t* next = &best[(i + 1) * q];
        std::uint8_t* cur = &best[i * q];
        std::copy(next, next + q, cur);
        for (std::uint64_t r = 0; r < q; ++r) {
            const std::uint64_t from = (r + q - inv[i]) % q;
            const std::uint8_t via = next[from] >= inf ? inf : static_cast<std::uint8_t>(next[from] + 1);
            if (via < cur[r]) cur[r] = via;
        }
    }
    if (best[target] >= inf) return std::nullopt;

    ModSubsetSolution sol{instance, target, {}};
    std::uint64_t r = target;
    unsigned need = best[target];
    for (std::size_t i = 0; i < k && need > 0; ++i) {
        const std::uint64_t from = (r + q - inv[i]) % q;
        if (best[(i + 1) * q + from] == need - 1) {
            sol.subset.push_back(instance.elements[i]);
            r = from;
            --need;
        }
    }
    return sol;
}

/// Minimum subset size per residue (-1 when unreachable within s_max).
struct ResidueCoverage {
    std::uint64_t q = 1;
    std::vector<int> min_size;

    std::size_t reachable() const {
        return static_cast<std::size_t>(std::count_if(min_size.begin(), min_size.end(), [](int s) { return s >= 0; }));
    }
    bool total() const { return reachable() == min_size.size(); }
    int max_min_size() const { return min_size.empty() ? 0 : *std::max_element(min_size.begin(), min_size.end()); }
    /// histogram[s] = number of residues whose minimum size is s
    std::vector<std::size_t> histogram() const {
        std::vector<std::size_t> h(static_cast<std::size_t>(std::max(0, max_min_size())) + 1, 0);
        for (int s : min_size) {
            if (s >= 0) ++h[static_cast<std::size_t>(s)];
        }
        return h;
    }
};

inline ResidueCoverage residue_coverage(const ModInstance& instance) {
    instance.validate();
    const std::uint64_t q = instance.q;
    const int inf = static_cast<int>(instance.s_max) + 1;
    std::vector<int> dp(q, inf), next(q);
    dp[0] = 0;
    for (auto e : instance.elements) {
        const std::uint64_t v = mod_inverse(static_cast<std::int64_t>(e), q);
        next = dp;
        for (std::uint64_t r = 0; r < q; ++r) {
            if (dp[r] + 1 < next[(r + v) % q]) next[(r + v) % q] = dp[r] + 1;
        }
        dp.swap(next);
    }
    ResidueCoverage cov{q, {}};
    cov.min_size.resize(q);
    for (std::uint64_t r = 0; r < q; ++r) cov.min_size[r] = dp[r] >= inf ? -1 : dp[r];
    return cov;
}

/// T with T d_i = d_i' (mod q) and |d_i'| <= 2 (q / a_i) (A / q)^{1/k}, A = prod a_i.
struct ShrinkResult {
    std::uint64_t T = 0;
    std::vector<std::int64_t> d_prime;
    std::vector<double> bounds;
};

/// Exact test of |d'| <= 2 (q/a) (A/q)^{1/k}, i.e. (|d'| a)^k q <= (2q)^k A.
inline bool shrink_bound_holds(std::int64_t d_prime, std::uint64_t q, std::uint64_t a, const BigInt& A, std::size_t k) {
    const BigInt lhs = pow(BigInt(static_cast<std::uint64_t>(std::abs(d_prime))) * a, static_cast<unsigned>(k)) * q;
    const BigInt rhs = pow(BigInt(2 * q), static_cast<unsigned>(k)) * A;
    return lhs <= rhs;
}

/// True iff every width b_i = 2 (q/a_i) (A/q)^{1/k} is at most q, i.e.
/// 2^k A <= a_i^k q for all i. The bucket count is then below q and a T is
/// guaranteed; outside this regime a valid T can fail to exist.
inline bool shrink_pigeonhole_applies(std::uint64_t q, const std::vector<std::uint64_t>& a) {
    BigInt A = 1;
    for (auto v : a) A *= v;
    const auto k = static_cast<unsigned>(a.size());
    for (auto v : a) {
        if (pow(BigInt(2), k) * A > pow(BigInt(v), k) * q) return false;
    }
    return true;
}

/// Pigeonhole construction: s in Z_q is bucketed by floor(ol(s d_i) / b_i);
/// two residues in one bucket give T = s' - s. Throws domain_error when no
/// T in [1, q) meets the bound, which can only happen when
/// shrink_pigeonhole_applies is false.
inline ShrinkResult dirichlet_shrink(std::uint64_t q, const std::vector<std::int64_t>& d,
                                     const std::vector<std::uint64_t>& a) {
    if (!is_prime_power(q)) throw domain_error("dirichlet_shrink: q must be a prime power");
    if (d.empty() || d.size() != a.size()) throw domain_error("dirichlet_shrink: need k >= 1 and |d| = |a|");
    const std::size_t k = d.size();
    BigInt A = 1;
    for (std::size_t i = 0; i < k; ++i) {
        if (a[i] == 0) throw domain_error("dirichlet_shrink: a_i must be positive");
        if (std::gcd(static_cast<std::uint64_t>(std::abs(d[i]) % static_cast<std::int64_t>(q)), q) != 1) {
            throw domain_error("dirichlet_shrink: d_i must be coprime to q");
        }
        A *= a[i];
    }
    const double qd = static_cast<double>(q);
    const double ratio = std::pow(A.convert_to<double>() / qd, 1.0 / static_cast<double>(k));
    ShrinkResult out;
    out.bounds.resize(k);
    for (std::size_t i = 0; i < k; ++i) out.bounds[i] = 2.0 * (qd / static_cast<double>(a[i])) * ratio;

    auto attempt = [&](std::uint64_t s_lo, std::uint64_t s_hi) -> bool {
        std::vector<std::int64_t> dp(k);
        for (std::size_t i = 0; i < k; ++i) {
            const auto lo = static_cast<__int128>(s_lo) * d[i];
            const auto hi = static_cast<__int128>(s_hi) * d[i];
            const auto qi = static_cast<__int128>(q);
            dp[i] = signed_representative(static_cast<std::int64_t>(hi % qi), q) -
                    signed_representative(static_cast<std::int64_t>(lo % qi), q);
            if (!shrink_bound_holds(dp[i], q, a[i], A, k)) return false;
        }
        out.T = s_hi - s_lo;
        out.d_prime = std::move(dp);
        return true;
    };

    std::map<std::vector<std::int64_t>, std::uint64_t> buckets;
    std::vector<std::int64_t> key(k);
    for (std::uint64_t s = 0; s < q; ++s) {
        for (std::size_t i = 0; i < k; ++i) {
            const auto v = static_cast<std::int64_t>((static_cast<__int128>(s) * d[i]) % static_cast<__int128>(q));
            key[i] = static_cast<std::int64_t>(std::floor(static_cast<double>(signed_representative(v, q)) / out.bounds[i]));
        }
        auto [it, inserted] = buckets.emplace(key, s);
        if (!inserted && attempt(it->second, s)) return out;
    }
    // Rounding at bucket edges can defeat the pigeonhole pass; scan T directly.
    for (std::uint64_t T = 1; T < q; ++T) {
        if (attempt(0, T)) return out;
    }
    throw domain_error("dirichlet_shrink: no T < q satisfies the bound for these inputs");
}

}  // namespace egyptfrac
