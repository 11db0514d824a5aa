#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>

#include "egyptfrac/errors.hpp"

namespace egyptfrac {

using BigInt = boost::multiprecision::cpp_int;

/// Exact fraction num/den kept in lowest terms with den >= 1.
/// Zero is always 0/1. Every arithmetic result is normalized immediately.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT(implicit)
    Rational(BigInt n) : num_(std::move(n)), den_(1) {}  // NOLINT(implicit)
    Rational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) { normalize(); }

    static Rational unit(std::uint64_t a) {
        if (a == 0) throw domain_error("unit fraction 1/0 is undefined");
        Rational r;
        r.num_ = 1;
        r.den_ = a;
        return r;
    }

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    int sign() const { return num_.sign(); }
    bool is_integer() const { return den_ == 1; }

    Rational operator-() const {
        Rational r = *this;
        r.num_ = -r.num_;
        return r;
    }

    Rational& operator+=(const Rational& o) {
        if (den_ == o.den_) {
            num_ += o.num_;
        } else {
            num_ = num_ * o.den_ + o.num_ * den_;
            den_ *= o.den_;
        }
        normalize();
        return *this;
    }
    Rational& operator-=(const Rational& o) { return *this += -o; }
    Rational& operator*=(const Rational& o) {
        num_ *= o.num_;
        den_ *= o.den_;
        normalize();
        return *this;
    }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw domain_error("division of a rational by zero");
        num_ *= o.den_;
        den_ *= o.num_;
        normalize();
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const BigInt lhs = a.num_ * b.den_;
        const BigInt rhs = b.num_ * a.den_;
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    /// Nearest double, accurate to a few ulps even when num and den have
    /// thousands of bits.
    double to_double() const {
        if (num_.is_zero()) return 0.0;
        const BigInt a = abs(num_);
        const long na = static_cast<long>(msb(a));
        const long nd = static_cast<long>(msb(den_));
        const long sa = na > 62 ? na - 62 : 0;
        const long sd = nd > 62 ? nd - 62 : 0;
        const double ha = static_cast<double>(static_cast<std::uint64_t>(BigInt(a >> sa)));
        const double hd = static_cast<double>(static_cast<std::uint64_t>(BigInt(den_ >> sd)));
        const double v = std::ldexp(ha / hd, static_cast<int>(sa - sd));
        return num_.sign() < 0 ? -v : v;
    }

    /// "p/q" with q >= 1 always present, e.g. "1/1", "-3/4".
    std::string str() const { return num_.str() + "/" + den_.str(); }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    void normalize() {
        if (den_.is_zero()) throw domain_error("rational with zero denominator");
        if (den_.sign() < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        if (num_.is_zero()) {
            den_ = 1;
            return;
        }
        if (den_ == 1) return;
        BigInt g = gcd(BigInt(abs(num_)), den_);
        if (g != 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    BigInt num_;
    BigInt den_;
};

}  // namespace egyptfrac
