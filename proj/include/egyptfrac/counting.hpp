#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "egyptfrac/errors.hpp"
#include "egyptfrac/exactmath.hpp"
#include "egyptfrac/rational.hpp"

namespace egyptfrac {

enum class CountMode { Exact, AtMost };
enum class CountMethod { BruteForce, MeetInMiddle };

inline std::string_view to_string(CountMode m) { return m == CountMode::Exact ? "exact" : "at_most"; }
inline std::string_view to_string(CountMethod m) {
    return m == CountMethod::BruteForce ? "brute_force" : "meet_in_middle";
}

/// Count subsets A of [n] with s(A) = x (Exact) or s(A) <= x (AtMost).
struct CountQuery {
    std::uint64_t n;
    Rational x;
    CountMode mode = CountMode::Exact;

    void validate() const {
        if (n == 0) throw domain_error("count: n must be at least 1");
        if (x.sign() <= 0) throw domain_error("count: x must be positive");
    }
};

struct CountResult {
    CountQuery query;
    BigInt count;
    CountMethod method;
    std::chrono::duration<double> elapsed;
};

inline constexpr std::uint64_t kBruteForceCap = 25;
inline constexpr std::uint64_t kMeetInMiddleCap = 48;

/// Reference counter: walks all 2^n subsets in Gray-code order carrying the
/// exact rational reciprocal sum.
inline CountResult count_brute(const CountQuery& query, std::uint64_t cap = kBruteForceCap) {
    query.validate();
    if (query.n > cap) {
        throw refusal_error("count_brute: n = " + std::to_string(query.n) +
                            " exceeds the brute-force cap of " + std::to_string(cap));
    }
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t n = query.n;
    std::vector<Rational> unit(n + 1);
    for (std::uint64_t a = 1; a <= n; ++a) unit[a] = Rational::unit(a);

    auto hit = [&](const Rational& s) {
        return query.mode == CountMode::Exact ? s == query.x : s <= query.x;
    };

    std::uint64_t count = hit(Rational{}) ? 1 : 0;
    std::uint64_t included = 0;
    Rational sum;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t i = 1; i < total; ++i) {
        const auto bit = static_cast<unsigned>(std::countr_zero(i));
        const std::uint64_t mask = std::uint64_t{1} << bit;
        if (included & mask) {
            sum -= unit[bit + 1];
        } else {
            sum += unit[bit + 1];
        }
        included ^= mask;
        if (hit(sum)) ++count;
    }
    return {query, BigInt(count), CountMethod::BruteForce,
            std::chrono::steady_clock::now() - start};
}

namespace detail {

template <class Int>
struct Weighted {
    Int value;
    std::uint64_t multiplicity;
};

// All subset sums of the given weights, sorted and aggregated by value.
template <class Int>
std::vector<Weighted<Int>> half_sums(const std::vector<Int>& weights) {
    std::vector<Int> sums{Int(0)};
    sums.reserve(std::size_t{1} << weights.size());
    for (const auto& w : weights) {
        const auto sz = sums.size();
        for (std::size_t i = 0; i < sz; ++i) sums.push_back(sums[i] + w);
    }
    std::sort(sums.begin(), sums.end());
    std::vector<Weighted<Int>> out;
    for (const auto& s : sums) {
        if (!out.empty() && out.back().value == s) {
            ++out.back().multiplicity;
        } else {
            out.push_back({s, 1});
        }
    }
    return out;
}

template <class Int>
Int narrow(const BigInt& v) {
    if constexpr (std::is_same_v<Int, BigInt>) {
        return v;
    } else {
        // cpp_int converts to unsigned __int128 via its own conversion operator.
        return static_cast<Int>(v);
    }
}

template <class Int>
constexpr unsigned int_bits() {
    if constexpr (std::is_same_v<Int, BigInt>) {
        return std::numeric_limits<unsigned>::max();
    } else if constexpr (std::is_same_v<Int, unsigned __int128>) {
        return 128;
    } else {
        return std::numeric_limits<Int>::digits;
    }
}

}  // namespace detail

/// Meet-in-the-middle counter over a caller-chosen unsigned integer width.
/// All reciprocals are scaled by lcm(1..n); throws overflow_error when the
/// scaled total does not fit in Int.
template <class Int>
CountResult count_mitm_with(const CountQuery& query, std::uint64_t cap = kMeetInMiddleCap) {
    query.validate();
    if (query.n > cap) {
        throw refusal_error("count_mitm: n = " + std::to_string(query.n) +
                            " exceeds the meet-in-the-middle cap of " + std::to_string(cap));
    }
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t n = query.n;
    const BigInt lcm = lcm_range(n);
    BigInt total = 0;
    for (std::uint64_t a = 1; a <= n; ++a) total += lcm / a;
    if (msb(total) + 1 > detail::int_bits<Int>()) {
        throw overflow_error("count_mitm: scaled sums need " + std::to_string(msb(total) + 1) +
                             " bits, more than the selected integer width; use a wider integer type");
    }
    auto done = [&](BigInt c) {
        return CountResult{query, std::move(c), CountMethod::MeetInMiddle,
                           std::chrono::steady_clock::now() - start};
    };

    // x * lcm as an integer bound; everything above total is saturated.
    const BigInt scaled_num = query.x.num() * lcm;
    const bool integral = (scaled_num % query.x.den()) == 0;
    const BigInt scaled = scaled_num / query.x.den();
    if (query.mode == CountMode::Exact && !integral) return done(0);
    if (scaled > total) {
        return done(query.mode == CountMode::Exact ? BigInt(0) : BigInt(1) << n);
    }
    const Int target = detail::narrow<Int>(scaled);

    const std::uint64_t split = (n + 1) / 2;
    std::vector<Int> low, high;
    for (std::uint64_t a = 1; a <= n; ++a) {
        (a <= split ? low : high).push_back(detail::narrow<Int>(BigInt(lcm / a)));
    }
    const auto left = detail::half_sums(low);
    const auto right = detail::half_sums(high);

    std::uint64_t count = 0;
    if (query.mode == CountMode::Exact) {
        // left ascending, right descending
        std::size_t j = right.size();
        for (const auto& l : left) {
            if (l.value > target) break;
            const Int need = target - l.value;
            while (j > 0 && right[j - 1].value > need) --j;
            if (j > 0 && right[j - 1].value == need) count += l.multiplicity * right[j - 1].multiplicity;
        }
    } else {
        std::vector<std::uint64_t> prefix(right.size() + 1, 0);
        for (std::size_t i = 0; i < right.size(); ++i) prefix[i + 1] = prefix[i] + right[i].multiplicity;
        std::size_t j = right.size();
        for (const auto& l : left) {
            if (l.value > target) break;
            const Int room = target - l.value;
            while (j > 0 && right[j - 1].value > room) --j;
            count += l.multiplicity * prefix[j];
        }
    }
    return done(count);
}

/// Meet-in-the-middle counter choosing 64-bit, 128-bit or arbitrary-precision
/// scaled sums from the size of lcm(1..n) * H_n.
inline CountResult count_mitm(const CountQuery& query, std::uint64_t cap = kMeetInMiddleCap) {
    query.validate();
    const BigInt lcm = lcm_range(query.n);
    const unsigned bits = msb(BigInt(lcm * query.n)) + 1;
    if (bits <= 64) return count_mitm_with<std::uint64_t>(query, cap);
    if (bits <= 128) return count_mitm_with<unsigned __int128>(query, cap);
    return count_mitm_with<BigInt>(query, cap);
}

/// Up to `limit` subsets of [n] with reciprocal sum exactly x, in
/// lexicographic order of their sorted element lists.
inline std::vector<std::vector<std::uint64_t>> enumerate_representations(std::uint64_t n, const Rational& x,
                                                                          std::size_t limit) {
    if (n == 0) throw domain_error("enumerate_representations: n must be at least 1");
    if (n > 40) throw refusal_error("enumerate_representations: n is capped at 40");
    if (x.sign() <= 0) throw domain_error("enumerate_representations: x must be positive");
    std::vector<std::vector<std::uint64_t>> found;
    if (limit == 0) return found;

    const BigInt lcm = lcm_range(n);
    const BigInt scaled_num = x.num() * lcm;
    if (scaled_num % x.den() != 0) return found;
    const BigInt target_big = scaled_num / x.den();

    using u128 = unsigned __int128;
    std::vector<u128> weight(n + 2, 0);
    for (std::uint64_t a = 1; a <= n; ++a) weight[a] = static_cast<u128>(BigInt(lcm / a));
    // tail[a] = weight[a] + ... + weight[n]
    std::vector<u128> tail(n + 2, 0);
    for (std::uint64_t a = n; a >= 1; --a) tail[a] = tail[a + 1] + weight[a];
    if (target_big > BigInt(tail[1])) return found;
    const auto target = static_cast<u128>(target_big);

    std::vector<std::uint64_t> current;
    auto dfs = [&](auto&& self, std::uint64_t next, u128 sum) -> void {
        if (found.size() >= limit) return;
        if (sum == target) {
            found.push_back(current);
            return;  // any extension overshoots
        }
        for (std::uint64_t a = next; a <= n && found.size() < limit; ++a) {
            if (sum + tail[a] < target) return;
            if (sum + weight[a] > target) continue;
            current.push_back(a);
            self(self, a + 1, sum + weight[a]);
            current.pop_back();
        }
    };
    dfs(dfs, 1, 0);

    for (const auto& s : found) {
        if (reciprocal_sum(s) != x) throw numeric_error("enumerate_representations: verification failed");
    }
    return found;
}

}  // namespace egyptfrac
