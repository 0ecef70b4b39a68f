#include "etesc/rational.hpp"

#include "etesc/types.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numeric>

namespace etesc {

namespace {

[[noreturn]] void overflow() {
    throw ConfigError("exact frequency arithmetic overflowed; use smaller ratio denominators");
}

std::int64_t mul(std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r)) {
        overflow();
    }
    return r;
}

std::int64_t add(std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    if (__builtin_add_overflow(a, b, &r)) {
        overflow();
    }
    return r;
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) {
        throw ConfigError("rational with zero denominator");
    }
    if (d < 0) {
        n = mul(n, -1);
        d = mul(d, -1);
    }
    const std::int64_t g = std::gcd(n, d);
    num = n / g;
    den = d / g;
}

std::string Rational::to_string() const {
    return den == 1 ? fmt::format("{}", num) : fmt::format("{}/{}", num, den);
}

Rational operator+(const Rational& a, const Rational& b) {
    const std::int64_t g = std::gcd(a.den, b.den);
    const std::int64_t da = a.den / g;
    const std::int64_t db = b.den / g;
    return {add(mul(a.num, db), mul(b.num, da)), mul(a.den, db)};
}

Rational operator-(const Rational& a, const Rational& b) {
    return a + Rational(mul(b.num, -1), b.den);
}

Rational operator*(const Rational& a, const Rational& b) {
    const std::int64_t g1 = std::gcd(a.num, b.den);
    const std::int64_t g2 = std::gcd(b.num, a.den);
    return {mul(a.num / (g1 ? g1 : 1), b.num / (g2 ? g2 : 1)), mul(a.den / (g2 ? g2 : 1), b.den / (g1 ? g1 : 1))};
}

std::int64_t checked_gcd(std::int64_t a, std::int64_t b) {
    return std::gcd(a, b);
}

std::int64_t checked_lcm(std::int64_t a, std::int64_t b) {
    if (a == 0 || b == 0) {
        return 0;
    }
    return mul(a / std::gcd(a, b), b);
}

Rational rationalize(double x, std::int64_t max_den, double rel_tol) {
    if (!std::isfinite(x)) {
        throw ConfigError("cannot rationalize a non-finite value");
    }
    // Convergents h/k of the continued fraction of |x|.
    const double ax = std::fabs(x);
    std::int64_t h_prev = 1;
    std::int64_t h = static_cast<std::int64_t>(std::floor(ax));
    std::int64_t k_prev = 0;
    std::int64_t k = 1;
    double frac = ax - std::floor(ax);
    if (ax > 9.0e15) {
        overflow();
    }
    while (frac > 1e-15 && std::fabs(static_cast<double>(h) / static_cast<double>(k) - ax) > 1e-16 * ax) {
        const double inv = 1.0 / frac;
        const double a_d = std::floor(inv);
        if (a_d > 9.0e15) {
            break;
        }
        const auto a = static_cast<std::int64_t>(a_d);
        std::int64_t k_next = 0;
        std::int64_t h_next = 0;
        if (__builtin_mul_overflow(a, k, &k_next) || __builtin_add_overflow(k_next, k_prev, &k_next) ||
            k_next > max_den) {
            break;
        }
        if (__builtin_mul_overflow(a, h, &h_next) || __builtin_add_overflow(h_next, h_prev, &h_next)) {
            break;
        }
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
        frac = inv - a_d;
    }
    const double approx = static_cast<double>(h) / static_cast<double>(k);
    const double scale = ax > 0.0 ? ax : 1.0;
    if (std::fabs(approx - ax) > rel_tol * scale) {
        throw ConfigError(fmt::format("value {} is not representable as a rational with denominator <= {}", x,
                                      max_den));
    }
    return {x < 0.0 ? -h : h, k};
}

}  // namespace etesc
