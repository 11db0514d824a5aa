#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "egyptfrac/entropy.hpp"
#include "egyptfrac/errors.hpp"
#include "egyptfrac/exactmath.hpp"
#include "egyptfrac/modular.hpp"
#include "egyptfrac/random.hpp"
#include "egyptfrac/rational.hpp"

namespace egyptfrac {

/// Tuning knobs for the absorption construction.
struct AbsorptionParams {
    /// prime powers <= L are left in the final denominator and absorbed by the reservoir
    std::uint64_t L = 4;
    /// the base set targets (1 - eta) x
    double eta = 0.25;
    unsigned max_attempts = 50;
    /// subset-size cap for each modular cancellation
    unsigned s_max = 12;
    /// overshoot guard: re-solves per prime power after dropping an element
    unsigned max_alternatives = 10;
    /// powersmoothness of the base universe; 0 picks n / (2 s_max)
    std::uint64_t smooth_bound = 0;
    /// rejection-sampling draws per attempt
    unsigned base_retries = 200;
    /// node budget of one reservoir search
    std::uint64_t reservoir_nodes = 2'000'000;
    std::uint64_t seed = 1;
};

/// Partition of [n] used by one construction.
struct AbsorptionConfig {
    std::uint64_t n = 0;
    Rational x;
    std::uint64_t L = 0;
    std::uint64_t K = 0;
    double eta = 0.0;
    std::uint64_t smooth_bound = 0;
    std::uint64_t seed = 0;
    AbsorptionParams params;
    /// multiples of K in [n]
    std::vector<std::uint64_t> reservoir;
    /// P(q): elements of (n/2, n] \ R whose largest prime power factor is q, for L < q <= smooth_bound
    std::map<std::uint64_t, std::vector<std::uint64_t>> pools;
    /// smooth_bound-powersmooth elements outside R and every P(q)
    std::vector<std::uint64_t> universe;
    std::shared_ptr<const FactorSieve> sieve;

    bool in_reservoir(std::uint64_t m) const { return m % K == 0; }
};

inline AbsorptionConfig build_config(std::uint64_t n, const Rational& x, const AbsorptionParams& params) {
    if (x.sign() <= 0) throw domain_error("build_config: x must be positive");
    if (params.L < 2) throw config_error("build_config: L must be at least 2 (L = 1 makes K = 1 and the reservoir all of [n])");
    if (!(params.eta > 0.0 && params.eta < 1.0)) throw config_error("build_config: eta must lie in (0, 1)");
    if (params.L > 40) throw config_error("build_config: L is capped at 40 so that K fits in 64 bits");
    const auto K = static_cast<std::uint64_t>(lcm_range(params.L));
    if (n < 4 * K) {
        throw config_error("build_config: n = " + std::to_string(n) + " is too small for K = " + std::to_string(K) +
                           "; the minimum is n = " + std::to_string(4 * K));
    }
    AbsorptionConfig cfg;
    cfg.n = n;
    cfg.x = x;
    cfg.L = params.L;
    cfg.K = K;
    cfg.eta = params.eta;
    cfg.seed = params.seed;
    cfg.params = params;
    cfg.smooth_bound = params.smooth_bound != 0 ? params.smooth_bound : n / (2 * std::max(1u, params.s_max));
    cfg.smooth_bound = std::max(cfg.smooth_bound, params.L);
    cfg.sieve = std::make_shared<const FactorSieve>(n);
    const auto& sieve = *cfg.sieve;

    for (std::uint64_t m = K; m <= n; m += K) cfg.reservoir.push_back(m);
    std::vector<bool> pooled(n + 1, false);
    for (std::uint64_t m = n / 2 + 1; m <= n; ++m) {
        if (cfg.in_reservoir(m)) continue;
        const auto top = sieve.max_prime_power_factor(m);
        if (top > cfg.L && top <= cfg.smooth_bound) {
            cfg.pools[top].push_back(m);
            pooled[m] = true;
        }
    }
    for (std::uint64_t m = 1; m <= n; ++m) {
        if (cfg.in_reservoir(m) || pooled[m]) continue;
        if (sieve.max_prime_power_factor(m) <= cfg.smooth_bound) cfg.universe.push_back(m);
    }
    return cfg;
}

inline AbsorptionConfig build_config(std::uint64_t n, const Rational& x, std::uint64_t L, double eta, std::uint64_t seed) {
    AbsorptionParams p;
    p.L = L;
    p.eta = eta;
    p.seed = seed;
    return build_config(n, x, p);
}

struct BaseSample {
    std::vector<std::uint64_t> base_set;
    Rational x0;
    unsigned draws = 0;
};

/// Draws A0 from the universe with the maximum-entropy probabilities for
/// target (1 - eta) x, rejecting draws with s(A0) > (1 - eta) x.
inline BaseSample sample_base_set(const AbsorptionConfig& cfg, std::uint64_t attempt = 0) {
    const Rational cap = cfg.x * Rational(BigInt(static_cast<std::uint64_t>(std::llround((1.0 - cfg.eta) * 1e9))),
                                          BigInt(1'000'000'000));
    const double cap_d = cap.to_double();
    const auto br = solve_multiplier(cfg.universe, static_cast<double>(cfg.n), cap_d);
    const double c = br.saturated ? 0.0 : 0.5 * (br.lo + br.hi);
    std::vector<double> prob(cfg.universe.size());
    for (std::size_t i = 0; i < prob.size(); ++i) {
        prob[i] = br.saturated ? 0.5 : logistic_tail(c * static_cast<double>(cfg.n) / static_cast<double>(cfg.universe[i]));
    }
    const std::uint64_t retries = std::max(1u, cfg.params.base_retries);
    for (std::uint64_t r = 0; r < retries; ++r) {
        const CounterRng rng(cfg.seed, attempt * retries + r);
        BaseSample s;
        s.draws = static_cast<unsigned>(r + 1);
        double approx = 0.0;
        for (std::size_t i = 0; i < prob.size(); ++i) {
            if (prob[i] > 0.0 && rng.uniform(cfg.universe[i]) < prob[i]) {
                s.base_set.push_back(cfg.universe[i]);
                approx += 1.0 / static_cast<double>(cfg.universe[i]);
            }
        }
        const double slack = (static_cast<double>(s.base_set.size()) + 2.0) * 0x1.0p-52 * approx;
        if (approx - slack > cap_d) continue;
        const Rational sum = reciprocal_sum(s.base_set);
        if (sum > cap) continue;
        s.x0 = cfg.x - sum;
        return s;
    }
    throw sampling_error("sample_base_set: no draw with s(A0) <= (1 - eta) x within " + std::to_string(retries) +
                         " retries");
}

struct CancellationStep {
    std::uint64_t q = 0;
    std::uint64_t p = 0;
    /// cofactors b; the elements added to A are q * b
    std::vector<std::uint64_t> B;
    Rational x_before;
    Rational x_after;
    std::size_t pool_size = 0;
};

struct CancellationOutcome {
    std::vector<CancellationStep> steps;
    Rational x_f;
    bool success = false;
    std::string failure;
};

namespace detail {

inline std::vector<std::uint64_t> elements_of(const CancellationStep& st) {
    std::vector<std::uint64_t> out;
    out.reserve(st.B.size());
    for (auto b : st.B) out.push_back(st.q * b);
    return out;
}

}  // namespace detail

/// Walks the prime powers q in (L, n] from the largest down. When q exactly
/// divides den(x_i), picks a minimum set B of cofactors b (q b unused, not in
/// the reservoir, gcd(b, q) = 1, prime power factors of b below q) with
/// sum 1/b = u_i (v_i / q)^{-1} mod q, which clears p from the denominator of
/// x_{i+1} = x_i - s(q B).
inline CancellationOutcome cancel_prime_powers(const AbsorptionConfig& cfg, const std::vector<std::uint64_t>& base_set,
                                               const Rational& x0) {
    const auto& sieve = *cfg.sieve;
    CancellationOutcome out;
    std::vector<bool> used(cfg.n + 1, false);
    for (auto a : base_set) used.at(a) = true;
    Rational x = x0;
    if (x.sign() <= 0) {
        out.failure = "x0 is not positive";
        out.x_f = x;
        return out;
    }
    for (const auto& pp : prime_powers_in(cfg.L + 1, cfg.n, sieve)) {
        const std::uint64_t q = pp.q;
        const BigInt& v = x.den();
        if (v % q != 0) continue;
        const BigInt rest = v / q;
        if (rest % pp.p == 0) {
            out.failure = "denominator carries a power of " + std::to_string(pp.p) + " above " + std::to_string(q);
            out.x_f = x;
            return out;
        }
        const auto u_mod = static_cast<std::uint64_t>(BigInt(((x.num() % q) + q) % q));
        const auto rest_mod = static_cast<std::uint64_t>(BigInt(rest % q));
        const std::uint64_t target =
            static_cast<std::uint64_t>((static_cast<unsigned __int128>(u_mod) * mod_inverse(static_cast<std::int64_t>(rest_mod), q)) % q);

        std::vector<std::uint64_t> pool;
        for (std::uint64_t b = cfg.n / q; b >= 1; --b) {
            const std::uint64_t m = q * b;
            if (b % pp.p == 0 || used[m] || cfg.in_reservoir(m)) continue;
            if (b > 1 && sieve.max_prime_power_factor(b) >= q) continue;
            pool.push_back(b);
        }

        bool placed = false;
        std::set<std::uint64_t> dropped;
        for (unsigned alt = 0; alt <= cfg.params.max_alternatives && !placed; ++alt) {
            ModInstance inst{q, {}, cfg.params.s_max};
            for (auto b : pool) {
                if (!dropped.count(b)) inst.elements.push_back(b);
            }
            const auto sol = min_subset_inverse_sum(inst, target);
            if (!sol) {
                out.failure = "no cancelling subset for q = " + std::to_string(q) + " (pool of " +
                              std::to_string(inst.elements.size()) + " cofactors, s_max = " +
                              std::to_string(cfg.params.s_max) + ")";
                out.x_f = x;
                return out;
            }
            CancellationStep st;
            st.q = q;
            st.p = pp.p;
            st.B = sol->subset;
            st.pool_size = inst.elements.size();
            const Rational mass = reciprocal_sum(detail::elements_of(st));
            if (mass >= x) {
                // drop the heaviest element (largest b is lightest) and re-solve
                dropped.insert(*std::min_element(st.B.begin(), st.B.end()));
                continue;
            }
            st.x_before = x;
            x -= mass;
            st.x_after = x;
            for (auto b : st.B) used[q * b] = true;
            out.steps.push_back(std::move(st));
            placed = true;
        }
        if (!placed) {
            out.failure = "overshoot at q = " + std::to_string(q) + " after " +
                          std::to_string(cfg.params.max_alternatives) + " alternatives";
            out.x_f = x;
            return out;
        }
    }
    out.x_f = x;
    if (BigInt(cfg.K) % x.den() != 0) {
        out.failure = "final denominator " + x.den().str() + " does not divide K";
        return out;
    }
    out.success = true;
    return out;
}

struct ReservoirResult {
    std::vector<std::uint64_t> D;
    bool found = false;
    std::uint64_t nodes = 0;
    Rational remainder;
};

/// Finds D in [limit] with sum 1/d = target by depth-first search, largest
/// reciprocal first. Branches are cut when the remaining reciprocals cannot
/// cover the remainder or when some prime power p^e of the remainder's
/// denominator has no multiple left to cancel it.
inline ReservoirResult unit_fraction_search(const Rational& target, std::uint64_t limit, std::uint64_t node_budget) {
    ReservoirResult res;
    res.remainder = target;
    if (target.sign() < 0) return res;
    if (target.is_zero()) {
        res.found = true;
        return res;
    }
    if (limit == 0) return res;
    const FactorSieve sieve(std::max<std::uint64_t>(limit, 2));
    std::vector<std::uint64_t> primes;
    for (std::uint64_t m = 2; m <= limit; ++m) {
        if (sieve.is_prime(m)) primes.push_back(m);
    }
    // tail[d] = 1/d + ... + 1/limit, with a small relative safety margin
    std::vector<double> tail(limit + 2, 0.0);
    for (std::uint64_t d = limit; d >= 1; --d) tail[d] = tail[d + 1] + 1.0 / static_cast<double>(d);
    auto tail_covers = [&](std::uint64_t from, double r) { return tail[from] * (1.0 + 1e-12) + 1e-15 >= r; };

    std::vector<std::uint64_t> chosen;
    bool aborted = false;

    auto cancellable = [&](const Rational& r, std::uint64_t next) {
        BigInt den = r.den();
        for (auto p : primes) {
            if (den == 1) break;
            if (den % p != 0) continue;
            std::uint64_t pe = 1;
            while (den % p == 0) {
                den /= p;
                pe *= p;
                if (pe > limit) return false;
            }
            if ((limit / pe) * pe < next) return false;
        }
        return den == 1;
    };

    auto dfs = [&](auto&& self, std::uint64_t next, const Rational& r) -> bool {
        if (r.is_zero()) return true;
        if (++res.nodes > node_budget) {
            aborted = true;
            return false;
        }
        if (next > limit) return false;
        const double rd = r.to_double();
        if (!tail_covers(next, rd)) return false;
        if (!cancellable(r, next)) return false;
        // smallest d with 1/d <= r
        BigInt first_big = (r.den() + r.num() - 1) / r.num();
        std::uint64_t first = first_big > BigInt(limit) ? limit + 1 : static_cast<std::uint64_t>(first_big);
        first = std::max(first, next);
        for (std::uint64_t d = first; d <= limit; ++d) {
            if (!tail_covers(d, rd)) break;
            chosen.push_back(d);
            if (self(self, d + 1, r - Rational::unit(d))) return true;
            chosen.pop_back();
            if (aborted) return false;
        }
        return false;
    };
    res.found = dfs(dfs, 1, target);
    if (res.found) {
        res.D = chosen;
        res.remainder = Rational{};
    }
    return res;
}

/// D subset of [n/K] with s(D) = K x_f, so that K D inside the reservoir
/// contributes exactly x_f.
inline ReservoirResult reservoir_decompose(const AbsorptionConfig& cfg, const Rational& x_f) {
    if (x_f.sign() < 0) throw domain_error("reservoir_decompose: x_f must be non-negative");
    const Rational scaled = x_f * Rational(BigInt(cfg.K));
    if (!scaled.is_integer()) throw domain_error("reservoir_decompose: K x_f must be an integer");
    return unit_fraction_search(scaled, cfg.n / cfg.K, cfg.params.reservoir_nodes);
}

struct AbsorptionTrace {
    std::uint64_t n = 0;
    Rational x;
    std::uint64_t L = 0;
    std::uint64_t K = 0;
    double eta = 0.0;
    std::uint64_t seed = 0;
    unsigned attempts = 0;
    std::vector<std::uint64_t> base_set;
    Rational x0;
    std::vector<CancellationStep> steps;
    Rational x_f;
    std::vector<std::uint64_t> D;
    std::vector<std::uint64_t> final_set;
    bool success = false;
    std::string failure;
};

/// True iff A is a set of distinct integers in [1, n] with s(A) = x.
inline bool verify_representation(const std::vector<std::uint64_t>& A, std::uint64_t n, const Rational& x) {
    std::set<std::uint64_t> seen;
    for (auto a : A) {
        if (a == 0 || a > n) return false;
        if (!seen.insert(a).second) return false;
    }
    return reciprocal_sum(A) == x;
}

/// Prime power factors of den(x) must all be <= n / 2.
inline bool denominator_admissible(const Rational& x, std::uint64_t n) {
    BigInt den = x.den();
    const std::uint64_t bound = n / 2;
    for (std::uint64_t p = 2; p <= bound && den != 1; ++p) {
        if (den % p != 0) continue;
        std::uint64_t pe = 1;
        while (den % p == 0) {
            den /= p;
            pe *= p;
            if (pe > bound) return false;
        }
    }
    return den == 1;
}

/// Recomputes every quantity of a successful trace from its sets and checks
/// the step invariants; false on the first mismatch.
inline bool replay_trace(const AbsorptionTrace& t) {
    if (!t.success) return false;
    if (t.x0 != t.x - reciprocal_sum(t.base_set)) return false;
    std::set<std::uint64_t> all(t.base_set.begin(), t.base_set.end());
    if (all.size() != t.base_set.size()) return false;
    Rational cur = t.x0;
    std::uint64_t last_q = 0;
    for (const auto& st : t.steps) {
        if (last_q != 0 && st.q >= last_q) return false;
        last_q = st.q;
        if (st.x_before != cur) return false;
        if (cur.den() % st.q != 0) return false;
        const auto elems = detail::elements_of(st);
        for (auto e : elems) {
            if (!all.insert(e).second) return false;
        }
        const Rational mass = reciprocal_sum(elems);
        if (!(mass < cur)) return false;
        cur -= mass;
        if (st.x_after != cur) return false;
        if (cur.den() % st.p == 0) return false;
    }
    if (cur != t.x_f) return false;
    if (BigInt(t.K) % t.x_f.den() != 0) return false;
    if (reciprocal_sum(t.D) != t.x_f * Rational(BigInt(t.K))) return false;
    for (auto d : t.D) {
        if (!all.insert(t.K * d).second) return false;
    }
    std::vector<std::uint64_t> expect(all.begin(), all.end());
    std::vector<std::uint64_t> got = t.final_set;
    std::sort(got.begin(), got.end());
    if (expect != got) return false;
    return verify_representation(t.final_set, t.n, t.x);
}

/// Full construction with up to params.max_attempts base-set resamples.
/// On failure the returned trace has success = false and describes the last
/// attempt.
inline AbsorptionTrace construct_representation(std::uint64_t n, const Rational& x, const AbsorptionParams& params) {
    if (x.sign() <= 0) throw domain_error("construct_representation: x must be positive");
    if (!denominator_admissible(x, n)) {
        throw domain_error("construct_representation: den(x) = " + x.den().str() +
                           " has a prime power factor above n/2 = " + std::to_string(n / 2));
    }
    const AbsorptionConfig cfg = build_config(n, x, params);
    AbsorptionTrace trace;
    trace.n = n;
    trace.x = x;
    trace.L = cfg.L;
    trace.K = cfg.K;
    trace.eta = cfg.eta;
    trace.seed = cfg.seed;
    for (unsigned attempt = 0; attempt < std::max(1u, params.max_attempts); ++attempt) {
        trace.attempts = attempt + 1;
        trace.steps.clear();
        trace.D.clear();
        trace.final_set.clear();
        BaseSample base;
        try {
            base = sample_base_set(cfg, attempt);
        } catch (const sampling_error& e) {
            trace.failure = e.what();
            continue;
        }
        trace.base_set = base.base_set;
        trace.x0 = base.x0;
        auto cancel = cancel_prime_powers(cfg, base.base_set, base.x0);
        trace.steps = std::move(cancel.steps);
        trace.x_f = cancel.x_f;
        if (!cancel.success) {
            trace.failure = cancel.failure;
            continue;
        }
        const auto res = reservoir_decompose(cfg, cancel.x_f);
        if (!res.found) {
            trace.failure = "reservoir search failed for K x_f = " + (cancel.x_f * Rational(BigInt(cfg.K))).str() +
                            " after " + std::to_string(res.nodes) + " nodes";
            continue;
        }
        trace.D = res.D;
        trace.final_set = base.base_set;
        for (const auto& st : trace.steps) {
            for (auto b : st.B) trace.final_set.push_back(st.q * b);
        }
        for (auto d : trace.D) trace.final_set.push_back(cfg.K * d);
        std::sort(trace.final_set.begin(), trace.final_set.end());
        trace.success = verify_representation(trace.final_set, n, x);
        if (trace.success) {
            trace.failure.clear();
            return trace;
        }
        trace.failure = "assembled set failed exact verification";
    }
    return trace;
}

}  // namespace egyptfrac
