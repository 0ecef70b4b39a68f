#pragma once

#include <cstdint>
#include <string>

namespace etesc {

/// Exact rational with int64 parts, kept in lowest terms with a positive
/// denominator. Arithmetic throws ConfigError on overflow.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d = 1);

    [[nodiscard]] double to_double() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Rational& a, const Rational& b) noexcept { return a.num == b.num && a.den == b.den; }
};

[[nodiscard]] Rational operator+(const Rational& a, const Rational& b);
[[nodiscard]] Rational operator-(const Rational& a, const Rational& b);
[[nodiscard]] Rational operator*(const Rational& a, const Rational& b);

[[nodiscard]] std::int64_t checked_gcd(std::int64_t a, std::int64_t b);
[[nodiscard]] std::int64_t checked_lcm(std::int64_t a, std::int64_t b);

/// Best rational approximation with denominator <= max_den (continued fractions).
/// Throws ConfigError if the result differs from x by more than rel_tol relative.
[[nodiscard]] Rational rationalize(double x, std::int64_t max_den = 1'000'000, double rel_tol = 1e-12);

}  // namespace etesc
