#include "lienard/averaging.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

namespace lienard {

void LienardSystem::validate() const
{
    if (n < 1 || m < 1) {
        throw std::invalid_argument("LienardSystem: degrees must satisfy n >= 1 and m >= 1");
    }
    if (f.size() != static_cast<std::size_t>(n) + 1) {
        throw std::invalid_argument("LienardSystem: f has " + std::to_string(f.size()) +
                                    " coefficients, expected n+1 = " + std::to_string(n + 1));
    }
    if (g.size() != static_cast<std::size_t>(m) + 1) {
        throw std::invalid_argument("LienardSystem: g has " + std::to_string(g.size()) +
                                    " coefficients, expected m+1 = " + std::to_string(m + 1));
    }
    if (f.back().is_zero()) {
        throw std::invalid_argument("LienardSystem: leading coefficient a_n is zero");
    }
    if (g.back().is_zero()) {
        throw std::invalid_argument("LienardSystem: leading coefficient b_m is zero");
    }
    if (!std::isfinite(epsilon)) {
        throw std::invalid_argument("LienardSystem: epsilon must be finite");
    }
}

AveragedFunction::AveragedFunction(std::vector<PiExt> coeffs) : coeffs_(std::move(coeffs)) {}

int AveragedFunction::degree() const noexcept
{
    for (int k = static_cast<int>(coeffs_.size()) - 1; k >= 0; --k) {
        if (!coeffs_[static_cast<std::size_t>(k)].is_zero()) return k;
    }
    return -1;
}

PiExt AveragedFunction::evaluate_exact(const Rational& r) const
{
    PiExt acc;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        acc *= r;
        acc += *it;
    }
    return acc;
}

long double AveragedFunction::evaluate(long double r) const
{
    long double acc = 0.0L;
    const auto values = numeric();
    for (auto it = values.rbegin(); it != values.rend(); ++it) {
        acc = acc * r + static_cast<long double>(*it);
    }
    return acc;
}

AveragedFunction AveragedFunction::derivative() const
{
    if (coeffs_.size() <= 1) return AveragedFunction{};
    std::vector<PiExt> out;
    out.reserve(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) {
        out.push_back(coeffs_[k] * Rational(static_cast<long>(k)));
    }
    return AveragedFunction{std::move(out)};
}

std::vector<double> AveragedFunction::numeric() const
{
    std::vector<double> out;
    out.reserve(coeffs_.size());
    for (const auto& c : coeffs_) out.push_back(pi_ext_to_real(c));
    return out;
}

Rational wallis_alpha(unsigned k)
{
    mpz_class central;
    mpz_bin_uiui(central.get_mpz_t(), 2UL * k, k);
    mpz_class denom;
    mpz_ui_pow_ui(denom.get_mpz_t(), 4, k);
    denom *= (k + 1);
    return Rational{mpq_class(central, denom)};
}

AveragedFunction averaged_function(const LienardSystem& sys)
{
    sys.validate();
    const int half_n = sys.n / 2;
    const int half_m = sys.m / 2;
    const std::size_t size = static_cast<std::size_t>(std::max(2 * half_n + 1, 2 * half_m)) + 1;
    std::vector<PiExt> coeffs(size);

    for (int i = 0; i <= half_n; ++i) {
        const auto& a = sys.f[static_cast<std::size_t>(2 * i)];
        coeffs[static_cast<std::size_t>(2 * i + 1)] = a * (wallis_alpha(static_cast<unsigned>(i)) / Rational(2));
    }
    for (int j = 0; j <= half_m; ++j) {
        const auto& b = sys.g[static_cast<std::size_t>(2 * j)];
        if (!b.pi_inv.is_zero()) {
            throw FieldError("averaged_function: b_" + std::to_string(2 * j) +
                             " has a 1/pi part; dividing it by pi leaves the p + q/pi field");
        }
        coeffs[static_cast<std::size_t>(2 * j)] = PiExt::over_pi(b.rat * Rational(2, 2L * j + 1));
    }
    return AveragedFunction{std::move(coeffs)};
}

namespace {

struct GaussRule {
    static constexpr int kOrder = 20;
    std::array<long double, kOrder> nodes{};
    std::array<long double, kOrder> weights{};

    GaussRule()
    {
        const long double pi = std::numbers::pi_v<long double>;
        for (int i = 0; i < kOrder; ++i) {
            long double x = std::cos(pi * (i + 0.75L) / (kOrder + 0.5L));
            long double dp = 0.0L;
            for (int iter = 0; iter < 100; ++iter) {
                long double p0 = 1.0L;
                long double p1 = x;
                for (int k = 2; k <= kOrder; ++k) {
                    const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = kOrder * (x * p1 - p0) / (x * x - 1.0L);
                const long double dx = p1 / dp;
                x -= dx;
                if (std::fabs(dx) < 1e-19L) break;
            }
            nodes[static_cast<std::size_t>(i)] = x;
            weights[static_cast<std::size_t>(i)] = 2.0L / ((1.0L - x * x) * dp * dp);
        }
    }
};

const GaussRule& gauss_rule()
{
    static const GaussRule rule;
    return rule;
}

template <class Fn>
long double composite_gauss(Fn&& fn, long double a, long double b, int panels)
{
    const auto& rule = gauss_rule();
    const long double width = (b - a) / panels;
    long double total = 0.0L;
    for (int p = 0; p < panels; ++p) {
        const long double left = a + width * p;
        const long double mid = left + width / 2;
        long double panel = 0.0L;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            panel += rule.weights[i] * fn(mid + width / 2 * rule.nodes[i]);
        }
        total += panel * width / 2;
    }
    return total;
}

long double horner(const std::vector<long double>& c, long double x)
{
    long double acc = 0.0L;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
}

std::vector<long double> to_long_double(const std::vector<PiExt>& coeffs)
{
    std::vector<long double> out;
    out.reserve(coeffs.size());
    for (const auto& c : coeffs) out.push_back(pi_ext_to_real(c));
    return out;
}

} // namespace

double averaged_quadrature(const LienardSystem& sys, double r)
{
    if (!(r > 0.0)) {
        throw std::invalid_argument("averaged_quadrature: r must be positive");
    }
    const auto f = to_long_double(sys.f);
    const auto g = to_long_double(sys.g);
    const long double radius = r;
    const long double pi = std::numbers::pi_v<long double>;

    auto piece = [&](long double sign) {
        return [&, sign](long double t) {
            const long double c = std::cos(t);
            const long double s = std::sin(t);
            return horner(f, radius * c) * radius * s * s + sign * s * horner(g, radius * c);
        };
    };
    constexpr int kPanels = 16;
    const long double upper = composite_gauss(piece(1.0L), 0.0L, pi, kPanels);
    const long double lower = composite_gauss(piece(-1.0L), pi, 2 * pi, kPanels);
    return static_cast<double>((upper + lower) / (2 * pi));
}

int descartes_bound(const AveragedFunction& p)
{
    if (p.is_zero()) {
        throw std::invalid_argument("descartes_bound: polynomial is identically zero");
    }
    int variations = 0;
    int previous = 0;
    for (const auto& c : p.coeffs()) {
        const int s = pi_ext_sign(c);
        if (s == 0) continue;
        if (previous != 0 && s != previous) ++variations;
        previous = s;
    }
    return variations;
}

double default_root_radius(const AveragedFunction& p)
{
    const int d = p.degree();
    if (d < 0) {
        throw std::invalid_argument("default_root_radius: polynomial is identically zero");
    }
    const auto c = p.numeric();
    const double lead = std::fabs(c[static_cast<std::size_t>(d)]);
    double largest = 0.0;
    for (int k = 0; k < d; ++k) largest = std::max(largest, std::fabs(c[static_cast<std::size_t>(k)]) / lead);
    return 1.0 + 2.0 * (1.0 + largest);
}

namespace {

// Sign evaluation that is fast in floating point and falls back to exact
// PiExt arithmetic when the value is within its own rounding-error bound.
class SignOracle {
public:
    explicit SignOracle(const AveragedFunction& p) : exact_(p)
    {
        for (double c : p.numeric()) values_.push_back(c);
        const long double degree = static_cast<long double>(values_.size()) + 2.0L;
        relative_error_ = 4.0L * degree * std::numeric_limits<long double>::epsilon() +
                          2.0L * std::numeric_limits<double>::epsilon();
    }

    int sign(double r) const
    {
        long double value = 0.0L;
        long double magnitude = 0.0L;
        const long double x = r;
        for (auto it = values_.rbegin(); it != values_.rend(); ++it) {
            value = value * x + *it;
            magnitude = magnitude * std::fabs(x) + std::fabs(*it);
        }
        if (std::fabs(value) > relative_error_ * magnitude) return value > 0 ? 1 : -1;
        return pi_ext_sign(exact_.evaluate_exact(Rational::from_double(r)));
    }

    /// Sign just to the right of zero: the sign of the lowest nonzero coefficient.
    int sign_at_zero_plus() const
    {
        for (const auto& c : exact_.coeffs()) {
            if (!c.is_zero()) return pi_ext_sign(c);
        }
        return 0;
    }

private:
    const AveragedFunction& exact_;
    std::vector<long double> values_;
    long double relative_error_ = 0.0L;
};

struct Bracket {
    double lo;
    double hi;
};

std::vector<Bracket> scan_brackets(const SignOracle& oracle, double r_max, std::size_t points)
{
    const double r_min = r_max * 1e-8;
    const double ratio = std::pow(r_max / r_min, 1.0 / static_cast<double>(points - 1));

    std::vector<double> grid;
    grid.reserve(points);
    for (std::size_t i = 0; i < points; ++i) grid.push_back(r_min * std::pow(ratio, static_cast<double>(i)));
    grid.back() = r_max;

    std::vector<Bracket> out;
    double left = 0.0;
    int left_sign = oracle.sign_at_zero_plus();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid[i];
        const int s = oracle.sign(r);
        if (s == 0) {
            // Exact root on the grid. Same sign on both sides means even multiplicity.
            const int right_sign = i + 1 < grid.size() ? oracle.sign(grid[i + 1]) : -left_sign;
            if (right_sign == left_sign) {
                std::ostringstream msg;
                msg << "positive_roots: root at r=" << r << " is not simple";
                throw RootError(msg.str());
            }
            out.push_back({r, r});
            left = r;
            left_sign = right_sign;
            continue;
        }
        if (s != left_sign) out.push_back({left, r});
        left = r;
        left_sign = s;
    }
    return out;
}

} // namespace

std::vector<RootRecord> positive_roots(const AveragedFunction& p, double r_max, double tol,
                                       const RootOptions& options)
{
    if (!(r_max > 0.0) || !(tol > 0.0)) {
        throw std::invalid_argument("positive_roots: r_max and tol must be positive");
    }
    if (p.is_zero()) {
        throw std::invalid_argument("positive_roots: polynomial is identically zero");
    }
    const int bound = descartes_bound(p);
    if (bound == 0) return {};

    const SignOracle oracle(p);
    std::size_t points = options.grid_points != 0 ? options.grid_points
                                                 : 10 * static_cast<std::size_t>(p.degree() + 1);
    points = std::max<std::size_t>(points, 2);

    std::vector<Bracket> brackets = scan_brackets(oracle, r_max, points);
    for (int refinement = 0;
         refinement < options.max_refinements && static_cast<int>(brackets.size()) < bound; ++refinement) {
        points *= 2;
        brackets = scan_brackets(oracle, r_max, points);
    }
    if (static_cast<int>(brackets.size()) > bound) {
        throw RootError("positive_roots: found " + std::to_string(brackets.size()) +
                        " sign changes but the Descartes bound is " + std::to_string(bound));
    }

    const auto numeric = p.numeric();
    const auto derivative = p.derivative();
    const auto dnumeric = derivative.numeric();

    // Fewer sign changes than the bound leaves room for roots of even
    // multiplicity. Those sit at critical points where |p| is at noise level.
    if (static_cast<int>(brackets.size()) < bound && derivative.degree() >= 1 && !derivative.is_zero()) {
        const SignOracle doracle(derivative);
        for (auto [lo, hi] : scan_brackets(doracle, r_max, points)) {
            if (lo != hi) {
                const int lo_sign = lo == 0.0 ? doracle.sign_at_zero_plus() : doracle.sign(lo);
                while (hi - lo > tol) {
                    const double mid = lo + (hi - lo) / 2;
                    if (mid <= lo || mid >= hi) break;
                    const int s = doracle.sign(mid);
                    if (s == 0) {
                        lo = hi = mid;
                        break;
                    }
                    (s == lo_sign ? lo : hi) = mid;
                }
            }
            const long double c = lo + (hi - lo) / 2;
            long double value = 0.0L;
            long double mag = 0.0L;
            for (auto it = numeric.rbegin(); it != numeric.rend(); ++it) {
                value = value * c + *it;
                mag = mag * c + std::fabs(*it);
            }
            long double curvature = 0.0L;
            for (std::size_t k = 2; k < numeric.size(); ++k) {
                curvature += static_cast<long double>(k * (k - 1)) * std::fabs(numeric[k]) *
                             std::pow(static_cast<long double>(hi), static_cast<long double>(k - 2));
            }
            const long double width = std::max<long double>(hi - lo, tol);
            if (std::fabs(value) <= curvature * width * width + 1e-12L * mag) {
                std::ostringstream msg;
                msg.precision(17);
                msg << "positive_roots: p and p' nearly vanish together near r=" << static_cast<double>(c)
                    << " (possible multiple root)";
                throw RootError(msg.str());
            }
        }
    }

    std::vector<RootRecord> roots;
    roots.reserve(brackets.size());
    for (auto [lo, hi] : brackets) {
        if (lo != hi) {
            const int lo_sign = lo == 0.0 ? oracle.sign_at_zero_plus() : oracle.sign(lo);
            while (hi - lo > tol) {
                const double mid = lo + (hi - lo) / 2;
                if (mid <= lo || mid >= hi) break;
                const int s = oracle.sign(mid);
                if (s == 0) {
                    lo = hi = mid;
                    break;
                }
                (s == lo_sign ? lo : hi) = mid;
            }
        }
        RootRecord rec;
        rec.lo = lo;
        rec.hi = hi;
        rec.value = lo + (hi - lo) / 2;

        // p' keeps one sign on [lo, hi] when |p'(mid)| exceeds the largest
        // possible drift max|p''| * width plus its own evaluation error.
        long double slope = 0.0L;
        long double slope_mag = 0.0L;
        for (auto it = dnumeric.rbegin(); it != dnumeric.rend(); ++it) {
            slope = slope * rec.value + *it;
            slope_mag = slope_mag * rec.value + std::fabs(*it);
        }
        long double curvature = 0.0L;
        for (std::size_t k = 2; k < numeric.size(); ++k) {
            curvature += static_cast<long double>(k * (k - 1)) * std::fabs(numeric[k]) *
                         std::pow(static_cast<long double>(hi), static_cast<long double>(k - 2));
        }
        const long double slack = curvature * (hi - lo) + 1e-12L * slope_mag;
        rec.simple = std::fabs(slope) > slack;
        if (!rec.simple) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "positive_roots: cannot certify a simple root in [" << lo << ", " << hi
                << "] (possible multiple root)";
            throw RootError(msg.str());
        }
        rec.degree_sign = slope > 0 ? 1 : -1;
        roots.push_back(rec);
    }
    std::sort(roots.begin(), roots.end(), [](const RootRecord& a, const RootRecord& b) { return a.value < b.value; });
    return roots;
}

std::vector<RootRecord> positive_roots(const AveragedFunction& p, double tol)
{
    return positive_roots(p, default_root_radius(p), tol);
}

int predicted_cycle_count(int n, int m)
{
    if (n < 1 || m < 1) {
        throw std::invalid_argument("predicted_cycle_count: requires n >= 1 and m >= 1");
    }
    return n / 2 + m / 2 + 1;
}

} // namespace lienard
