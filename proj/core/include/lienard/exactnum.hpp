#pragma once

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include <gmpxx.h>

namespace lienard {

/// Arbitrary-precision rational kept in canonical form (positive
/// denominator, numerator and denominator coprime).
class Rational {
public:
    Rational() = default;
    Rational(long value) : value_(value) {}
    Rational(int value) : value_(value) {}
    Rational(long num, long den);
    explicit Rational(mpq_class value);

    /// Exact conversion of a finite double through its binary expansion.
    static Rational from_double(double value);

    /// Parses "p", "p/q" or "-p/q". Throws std::invalid_argument.
    static Rational parse(std::string_view text);

    const mpq_class& raw() const noexcept { return value_; }
    mpz_class numerator() const { return value_.get_num(); }
    mpz_class denominator() const { return value_.get_den(); }

    int sign() const noexcept { return sgn(value_); }
    bool is_zero() const noexcept { return sign() == 0; }

    /// Nearest-ish double (GMP truncates toward zero, error below one ulp).
    /// Nearest double (ties to even).
    double to_double() const;

    /// Always "p/q", including q = 1.
    std::string to_string() const;

    Rational abs() const;
    Rational inverse() const;
    Rational pow(unsigned exponent) const;

    Rational& operator+=(const Rational& other);
    Rational& operator-=(const Rational& other);
    Rational& operator*=(const Rational& other);
    Rational& operator/=(const Rational& other);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    Rational operator-() const;

    friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.value_, b.value_) == 0; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b)
    {
        const int c = cmp(a.value_, b.value_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

private:
    mpq_class value_{0};
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

/// Rational enclosure [lo, hi] of pi with hi - lo <= 10^-digits.
std::pair<Rational, Rational> pi_bounds(std::size_t digits);

/// Thrown when an operation would leave the p + q/pi field.
class FieldError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Exact number rat + pi_inv / pi with rational parts.
///
/// The set is closed under addition and rational scaling. A product of two
/// elements is only defined when at least one of them has no 1/pi part;
/// anything else would need 1/pi^2 and raises FieldError.
struct PiExt {
    Rational rat;
    Rational pi_inv;

    PiExt() = default;
    PiExt(Rational r) : rat(std::move(r)) {}
    PiExt(Rational r, Rational q) : rat(std::move(r)), pi_inv(std::move(q)) {}

    static PiExt over_pi(Rational q) { return PiExt{Rational{}, std::move(q)}; }

    bool is_zero() const noexcept { return rat.is_zero() && pi_inv.is_zero(); }
    bool is_rational() const noexcept { return pi_inv.is_zero(); }

    PiExt& operator+=(const PiExt& other);
    PiExt& operator-=(const PiExt& other);
    PiExt& operator*=(const Rational& c);

    friend PiExt operator+(PiExt a, const PiExt& b) { return a += b; }
    friend PiExt operator-(PiExt a, const PiExt& b) { return a -= b; }
    friend PiExt operator*(PiExt a, const Rational& c) { return a *= c; }
    friend PiExt operator*(const Rational& c, PiExt a) { return a *= c; }
    PiExt operator-() const { return PiExt{-rat, -pi_inv}; }

    friend bool operator==(const PiExt&, const PiExt&) = default;
};

/// Checked product; throws FieldError if both factors carry a 1/pi part.
PiExt multiply(const PiExt& x, const PiExt& y);

PiExt pi_ext_add(const PiExt& x, const PiExt& y);
PiExt pi_ext_scale(const PiExt& x, const Rational& c);

/// Numeric value using pi to at least `precision_digits` decimal digits
/// (precision_digits >= 15).
double pi_ext_to_real(const PiExt& x, std::size_t precision_digits = 40);

/// Exact sign of rat + pi_inv / pi. Refines a rational enclosure of pi until
/// the sign is certified; always terminates because pi is irrational.
int pi_ext_sign(const PiExt& x);

std::ostream& operator<<(std::ostream& os, const PiExt& x);

} // namespace lienard
