#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "egyptfrac/errors.hpp"
#include "egyptfrac/exactmath.hpp"
#include "egyptfrac/rational.hpp"

namespace egyptfrac {

/// Numerical tolerances shared by the entropy solvers.
struct EntropyTolerances {
    // below this, p log p is taken as 0
    double p_floor = 1e-300;
    int profile_max_iterations = 400;
    // bracket width on c, relative
    double profile_relative_width = 1e-15;
    // slack added to H when it is used as a rigorous upper bound
    double upper_bound_slack = 1e-9;

    double lambda_lo = 1e-12;
    double lambda_hi = 1e2;
    int lambda_max_iterations = 200;
    double lambda_residual = 1e-8;
    // e^{-lambda U} / (lambda U) below this decides the truncation point U
    double quadrature_tail = 1e-12;
    double quadrature_tolerance = 1e-13;
};

inline const EntropyTolerances kDefaultTolerances{};

/// h(p) = -p log2 p - (1-p) log2 (1-p), with h(0) = h(1) = 0.
inline double binary_entropy(double p, const EntropyTolerances& tol = kDefaultTolerances) {
    if (!(p >= 0.0 && p <= 1.0)) throw domain_error("binary_entropy: p must lie in [0, 1]");
    const double q = 1.0 - p;
    double h = 0.0;
    if (p > tol.p_floor) h -= p * std::log2(p);
    if (q > tol.p_floor) h -= q * std::log1p(-p) / std::numbers::ln2;
    return h;
}

/// 1 / (1 + e^z) without overflow for large |z|.
inline double logistic_tail(double z) {
    if (z >= 0) {
        const double e = std::exp(-z);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(z));
}

/// Maximum-entropy product distribution on [n] under sum p_m/m <= x.
struct EntropyProfile {
    std::uint64_t n = 0;
    double x = 0.0;
    /// Lagrange parameter: p_m = 1 / (1 + e^{c n / m}); 0 when saturated.
    double c = 0.0;
    /// p[m - 1] is the inclusion probability of m.
    std::vector<double> p;
    /// sum of h(p_m), in bits
    double H = 0.0;
    bool saturated = false;

    double probability(std::uint64_t m) const { return p.at(m - 1); }
};

/// Root of sum_{m in support} 1/(m (1 + e^{c scale / m})) = x for c >= 0.
/// Returns the bracket [lo, hi] after bisection; lo has sum >= x.
struct MultiplierBracket {
    double lo;
    double hi;
    bool saturated;
};

inline double logistic_mass(std::span<const std::uint64_t> support, double scale, double c) {
    double s = 0.0;
    for (auto m : support) {
        const double md = static_cast<double>(m);
        s += logistic_tail(c * scale / md) / md;
    }
    return s;
}

inline MultiplierBracket solve_multiplier(std::span<const std::uint64_t> support, double scale, double x,
                                          const EntropyTolerances& tol = kDefaultTolerances) {
    if (!(x > 0)) throw domain_error("entropy profile: x must be positive");
    const double full = logistic_mass(support, scale, 0.0);
    if (x >= full) return {0.0, 0.0, true};
    double lo = 0.0;
    double hi = 1.0;
    int guard = 0;
    while (logistic_mass(support, scale, hi) > x) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 2000) throw numeric_error("entropy profile: could not bracket the multiplier");
    }
    for (int it = 0; it < tol.profile_max_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi || hi - lo <= tol.profile_relative_width * hi) {
            return {lo, hi, false};
        }
        if (logistic_mass(support, scale, mid) >= x) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (hi - lo <= 1e-12 * hi) return {lo, hi, false};
    std::ostringstream msg;
    msg << "entropy profile: bisection did not converge, bracket [" << lo << ", " << hi << "]";
    throw numeric_error(msg.str());
}

namespace detail {

inline EntropyProfile fill_profile(std::uint64_t n, double x, double c, bool saturated,
                                   const EntropyTolerances& tol) {
    EntropyProfile prof;
    prof.n = n;
    prof.x = x;
    prof.c = c;
    prof.saturated = saturated;
    prof.p.resize(n);
    const double nd = static_cast<double>(n);
    for (std::uint64_t m = 1; m <= n; ++m) {
        const double pm = saturated ? 0.5 : logistic_tail(c * nd / static_cast<double>(m));
        prof.p[m - 1] = pm;
        prof.H += binary_entropy(pm, tol);
    }
    return prof;
}

inline std::vector<std::uint64_t> iota_support(std::uint64_t n) {
    std::vector<std::uint64_t> s(n);
    for (std::uint64_t m = 1; m <= n; ++m) s[m - 1] = m;
    return s;
}

}  // namespace detail

/// Discrete maximizer for sum p_m / m <= x on [n]. For x >= H_n / 2 the
/// constraint is slack and every p_m is 1/2.
inline EntropyProfile discrete_profile(std::uint64_t n, double x, const EntropyTolerances& tol = kDefaultTolerances) {
    if (n == 0) throw domain_error("discrete_profile: n must be at least 1");
    if (!(x > 0)) throw domain_error("discrete_profile: x must be positive");
    const auto support = detail::iota_support(n);
    const auto br = solve_multiplier(support, static_cast<double>(n), x, tol);
    if (br.saturated) return detail::fill_profile(n, x, 0.0, true, tol);
    return detail::fill_profile(n, x, 0.5 * (br.lo + br.hi), false, tol);
}

/// H(P(x)) in bits, rounded up so that (number of A with s(A) <= x) <= 2^H
/// holds despite floating-point error in the solver.
inline double entropy_upper_bound(std::uint64_t n, const Rational& x, const EntropyTolerances& tol = kDefaultTolerances) {
    if (n == 0) throw domain_error("entropy_upper_bound: n must be at least 1");
    if (x.sign() <= 0) throw domain_error("entropy_upper_bound: x must be positive");
    const double nd = static_cast<double>(n);
    bool slack;
    if (n <= 5000) {
        slack = x * Rational(2) >= harmonic(n);
    } else {
        slack = x.to_double() >= logistic_mass(detail::iota_support(n), nd, 0.0);
    }
    if (slack) return nd;
    const auto support = detail::iota_support(n);
    const auto br = solve_multiplier(support, nd, x.to_double(), tol);
    if (br.saturated) return nd;
    // smaller c means p_m closer to 1/2, hence more entropy
    const auto prof = detail::fill_profile(n, x.to_double(), br.lo, false, tol);
    return std::min(nd, prof.H + tol.upper_bound_slack * (1.0 + nd));
}

/// lambda and c_x for the continuous limit.
struct ContinuousConstants {
    double x = 0.0;
    double lambda = 0.0;
    /// bits per element
    double c_x = 0.0;
    /// |integral(lambda) - x|
    double residual = 0.0;
};

namespace detail {

// Upper end of the substituted range: u = 1/y runs over [1, U] with the tail
// beyond U below the configured bound.
inline double truncation_point(double lambda, const EntropyTolerances& tol) {
    double w = 1.0;
    while (std::exp(-w) / w >= tol.quadrature_tail) w += 0.25;
    return std::max(w / lambda, 2.0);
}

template <class F>
double integrate_log_range(F&& f, double T, const EntropyTolerances& tol) {
    using boost::math::quadrature::gauss_kronrod;
    double total = 0.0;
    // unit-length panels in t = ln u, summed in order
    const int panels = static_cast<int>(std::ceil(T));
    for (int k = 0; k < panels; ++k) {
        const double a = k;
        const double b = std::min(T, a + 1.0);
        if (b <= a) break;
        double err = 0.0;
        const double v = gauss_kronrod<double, 31>::integrate(f, a, b, 12, tol.quadrature_tolerance, &err);
        if (!std::isfinite(v)) throw numeric_error("quadrature produced a non-finite value");
        total += v;
    }
    return total;
}

}  // namespace detail

/// integral_0^1 dy / (y (1 + e^{lambda / y})), evaluated as
/// integral_0^{ln U} dt / (1 + e^{lambda e^t}) after u = 1/y, u = e^t.
inline double reciprocal_mass_integral(double lambda, const EntropyTolerances& tol = kDefaultTolerances) {
    const double T = std::log(detail::truncation_point(lambda, tol));
    return detail::integrate_log_range([lambda](double t) { return logistic_tail(lambda * std::exp(t)); }, T,
                                       tol);
}

/// integral_0^1 h(1 / (1 + e^{lambda / y})) dy in the same coordinates.
inline double entropy_integral(double lambda, const EntropyTolerances& tol = kDefaultTolerances) {
    const double T = std::log(detail::truncation_point(lambda, tol));
    return detail::integrate_log_range(
        [lambda, &tol](double t) { return binary_entropy(logistic_tail(lambda * std::exp(t)), tol) * std::exp(-t); },
        T, tol);
}

/// The unique lambda > 0 with reciprocal_mass_integral(lambda) = x.
inline double continuous_lambda(double x, const EntropyTolerances& tol = kDefaultTolerances) {
    if (!(x > 0)) throw domain_error("continuous_lambda: x must be positive");
    // the integral decreases in lambda; bisect on log(lambda)
    double lo = std::log(tol.lambda_lo);
    double hi = std::log(tol.lambda_hi);
    const double at_lo = reciprocal_mass_integral(tol.lambda_lo, tol);
    const double at_hi = reciprocal_mass_integral(tol.lambda_hi, tol);
    if (x > at_lo || x < at_hi) {
        std::ostringstream msg;
        msg << "continuous_lambda: x = " << x << " outside the bracketed range [" << at_hi << ", " << at_lo << "]";
        throw numeric_error(msg.str());
    }
    double residual = 0.0;
    for (int it = 0; it < tol.lambda_max_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double v = reciprocal_mass_integral(std::exp(mid), tol);
        residual = v - x;
        if (v > x) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double lambda = std::exp(0.5 * (lo + hi));
    residual = reciprocal_mass_integral(lambda, tol) - x;
    if (!(std::abs(residual) <= tol.lambda_residual)) {
        std::ostringstream msg;
        msg << "continuous_lambda: residual " << residual << " at lambda = " << lambda << " exceeds "
            << tol.lambda_residual;
        throw numeric_error(msg.str());
    }
    return lambda;
}

inline ContinuousConstants cx_constant(double x, const EntropyTolerances& tol = kDefaultTolerances) {
    ContinuousConstants out;
    out.x = x;
    out.lambda = continuous_lambda(x, tol);
    out.residual = std::abs(reciprocal_mass_integral(out.lambda, tol) - x);
    out.c_x = entropy_integral(out.lambda, tol);
    return out;
}

}  // namespace egyptfrac
