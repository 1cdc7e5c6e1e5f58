#include "lienard/exactnum.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>

namespace lienard {

namespace {

// 300 decimal digits of pi after the leading "3.".
constexpr std::string_view kPiDigits =
    "14159265358979323846264338327950288419716939937510"
    "58209749445923078164062862089986280348253421170679"
    "82148086513282306647093844609550582231725359408128"
    "48111745028410270193852110555964462294895493038196"
    "44288109756659334461284756482337867831652712019091"
    "45648566923460348610454326648213393607260249141273";

mpz_class pow10(std::size_t exponent)
{
    mpz_class out;
    mpz_ui_pow_ui(out.get_mpz_t(), 10, exponent);
    return out;
}

// arctan(1/x) * scale, truncated at every term; absolute error below one
// unit per term.
mpz_class arctan_inv(unsigned long x, const mpz_class& scale, unsigned long& terms)
{
    mpz_class sum = 0;
    mpz_class power = scale / x;
    const unsigned long x2 = x * x;
    for (unsigned long k = 0; power != 0; ++k) {
        mpz_class term = power / (2 * k + 1);
        if (k % 2 == 0) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= x2;
        ++terms;
    }
    return sum;
}

std::pair<Rational, Rational> machin_bounds(std::size_t digits)
{
    const std::size_t guard = 10;
    const mpz_class scale = pow10(digits + guard);
    unsigned long terms = 0;
    const mpz_class approx = 16 * arctan_inv(5, scale, terms) - 4 * arctan_inv(239, scale, terms);
    // Each truncated term contributes < 1 unit, scaled by 16 or 4.
    const mpz_class slack = 16 * static_cast<long>(terms) + 16;
    return {Rational{mpq_class(approx - slack, scale)}, Rational{mpq_class(approx + slack, scale)}};
}

// mpq_get_d truncates; pick whichever neighbour is nearer.
double nearest_double(const mpq_class& value)
{
    const double truncated = value.get_d();
    if (!std::isfinite(truncated)) return truncated;
    const double away = std::nextafter(truncated, sgn(value) < 0 ? -HUGE_VAL : HUGE_VAL);
    if (!std::isfinite(away)) return truncated;
    const mpq_class below_gap = abs(value - mpq_class(truncated));
    const mpq_class above_gap = abs(mpq_class(away) - value);
    if (below_gap < above_gap) return truncated;
    if (above_gap < below_gap) return away;
    int exp = 0;
    const double mantissa = std::frexp(truncated, &exp);
    const auto bits = static_cast<long long>(std::ldexp(mantissa, 53));
    return bits % 2 == 0 ? truncated : away;
}

} // namespace

Rational::Rational(long num, long den)
{
    if (den == 0) {
        throw std::invalid_argument("Rational: zero denominator");
    }
    value_ = mpq_class(num, den);
    value_.canonicalize();
}

Rational::Rational(mpq_class value) : value_(std::move(value))
{
    if (value_.get_den() == 0) {
        throw std::invalid_argument("Rational: zero denominator");
    }
    value_.canonicalize();
}

double Rational::to_double() const { return nearest_double(value_); }

Rational Rational::from_double(double value)
{
    if (!std::isfinite(value)) {
        throw std::invalid_argument("Rational: non-finite value");
    }
    // mpq_set_d is exact.
    return Rational{mpq_class(value)};
}

Rational Rational::parse(std::string_view text)
{
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    const std::string_view body = trim(text);
    if (body.empty()) {
        throw std::invalid_argument("Rational: empty string");
    }

    // Decimal notation ("0.25", "-1.5", "1e-2") is converted exactly.
    if (body.find('/') == std::string_view::npos &&
        body.find_first_of(".eE") != std::string_view::npos) {
        std::string_view rest = body;
        bool negative = false;
        if (rest.front() == '+' || rest.front() == '-') {
            negative = rest.front() == '-';
            rest.remove_prefix(1);
        }
        std::string mantissa;
        long exponent = 0;
        bool seen_point = false;
        std::size_t i = 0;
        for (; i < rest.size() && rest[i] != 'e' && rest[i] != 'E'; ++i) {
            const char c = rest[i];
            if (c == '.' && !seen_point) {
                seen_point = true;
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                mantissa.push_back(c);
                if (seen_point) --exponent;
            } else {
                throw std::invalid_argument("Rational: malformed number '" + std::string(text) + "'");
            }
        }
        if (mantissa.empty()) {
            throw std::invalid_argument("Rational: malformed number '" + std::string(text) + "'");
        }
        if (i < rest.size()) {
            const std::string exp_text(rest.substr(i + 1));
            std::size_t used = 0;
            long e = 0;
            try {
                e = std::stol(exp_text, &used);
            } catch (const std::exception&) {
                used = std::string::npos;
            }
            if (exp_text.empty() || used != exp_text.size()) {
                throw std::invalid_argument("Rational: malformed exponent in '" + std::string(text) + "'");
            }
            exponent += e;
        }
        mpq_class value{mpz_class(mantissa, 10)};
        if (exponent >= 0) {
            value *= pow10(static_cast<std::size_t>(exponent));
        } else {
            value /= pow10(static_cast<std::size_t>(-exponent));
        }
        if (negative) value = -value;
        return Rational{value};
    }

    auto parse_int = [&](std::string_view s) {
        s = trim(s);
        std::string_view digits = s;
        if (!digits.empty() && (digits.front() == '+' || digits.front() == '-')) digits.remove_prefix(1);
        if (digits.empty()) {
            throw std::invalid_argument("Rational: malformed number '" + std::string(text) + "'");
        }
        for (char c : digits) {
            if (!std::isdigit(static_cast<unsigned char>(c))) {
                throw std::invalid_argument("Rational: malformed number '" + std::string(text) + "'");
            }
        }
        std::string owned(s);
        if (owned.front() == '+') owned.erase(0, 1);
        return mpz_class(owned, 10);
    };

    const auto slash = body.find('/');
    if (slash == std::string_view::npos) {
        return Rational{mpq_class(parse_int(body))};
    }
    const mpz_class num = parse_int(body.substr(0, slash));
    const mpz_class den = parse_int(body.substr(slash + 1));
    if (den == 0) {
        throw std::invalid_argument("Rational: zero denominator in '" + std::string(text) + "'");
    }
    return Rational{mpq_class(num, den)};
}

std::string Rational::to_string() const
{
    return value_.get_num().get_str() + "/" + value_.get_den().get_str();
}

Rational Rational::abs() const { return Rational{mpq_class(::abs(value_))}; }

Rational Rational::inverse() const
{
    if (is_zero()) {
        throw std::domain_error("Rational: inverse of zero");
    }
    return Rational{mpq_class(1) / value_};
}

Rational Rational::pow(unsigned exponent) const
{
    mpq_class out = 1;
    mpq_class base = value_;
    while (exponent != 0) {
        if (exponent & 1U) out *= base;
        base *= base;
        exponent >>= 1U;
    }
    return Rational{out};
}

Rational& Rational::operator+=(const Rational& other)
{
    value_ += other.value_;
    return *this;
}

Rational& Rational::operator-=(const Rational& other)
{
    value_ -= other.value_;
    return *this;
}

Rational& Rational::operator*=(const Rational& other)
{
    value_ *= other.value_;
    return *this;
}

Rational& Rational::operator/=(const Rational& other)
{
    if (other.is_zero()) {
        throw std::domain_error("Rational: division by zero");
    }
    value_ /= other.value_;
    return *this;
}

Rational Rational::operator-() const { return Rational{mpq_class(-value_)}; }

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

std::pair<Rational, Rational> pi_bounds(std::size_t digits)
{
    if (digits <= kPiDigits.size()) {
        const mpz_class scale = pow10(digits);
        const mpz_class truncated{"3" + std::string(kPiDigits.substr(0, digits)), 10};
        return {Rational{mpq_class(truncated, scale)}, Rational{mpq_class(truncated + 1, scale)}};
    }
    static std::mutex mutex;
    static std::map<std::size_t, std::pair<Rational, Rational>> cache;
    const std::lock_guard lock(mutex);
    auto it = cache.find(digits);
    if (it == cache.end()) {
        it = cache.emplace(digits, machin_bounds(digits)).first;
    }
    return it->second;
}

PiExt& PiExt::operator+=(const PiExt& other)
{
    rat += other.rat;
    pi_inv += other.pi_inv;
    return *this;
}

PiExt& PiExt::operator-=(const PiExt& other)
{
    rat -= other.rat;
    pi_inv -= other.pi_inv;
    return *this;
}

PiExt& PiExt::operator*=(const Rational& c)
{
    rat *= c;
    pi_inv *= c;
    return *this;
}

PiExt multiply(const PiExt& x, const PiExt& y)
{
    if (x.is_rational()) return y * x.rat;
    if (y.is_rational()) return x * y.rat;
    throw FieldError("PiExt product would produce a 1/pi^2 term");
}

PiExt pi_ext_add(const PiExt& x, const PiExt& y) { return x + y; }

PiExt pi_ext_scale(const PiExt& x, const Rational& c) { return x * c; }

double pi_ext_to_real(const PiExt& x, std::size_t precision_digits)
{
    if (precision_digits < 15) {
        throw std::invalid_argument("pi_ext_to_real: precision_digits must be >= 15");
    }
    if (x.pi_inv.is_zero()) return x.rat.to_double();
    const auto [lo, hi] = pi_bounds(precision_digits + 2);
    const mpq_class mid = (lo.raw() + hi.raw()) / 2;
    const mpq_class value = x.rat.raw() + x.pi_inv.raw() / mid;
    return nearest_double(value);
}

int pi_ext_sign(const PiExt& x)
{
    const int p = x.rat.sign();
    const int q = x.pi_inv.sign();
    if (p == 0) return q;
    if (q == 0 || p == q) return p;

    // sign(p + q/pi) = sign(p*pi + q); the expression is monotone in pi, so
    // checking both ends of the enclosure certifies the sign.
    for (std::size_t digits = 30;; digits *= 2) {
        const auto [lo, hi] = pi_bounds(digits);
        const int at_lo = (x.rat * lo + x.pi_inv).sign();
        const int at_hi = (x.rat * hi + x.pi_inv).sign();
        if (at_lo == at_hi && at_lo != 0) return at_lo;
    }
}

std::ostream& operator<<(std::ostream& os, const PiExt& x)
{
    return os << "(" << x.rat << " + " << x.pi_inv << "/pi)";
}

} // namespace lienard
