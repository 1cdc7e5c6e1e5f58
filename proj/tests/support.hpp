#pragma once

// Shared fixtures and test-only oracles. Nothing here calls into the code
// paths it is used to check.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "lienard/averaging.hpp"
#include "lienard/exactnum.hpp"

namespace lienard::testing {

/// The worked example: n = 4, m = 2 with cycles designed at r = 1, 2, 3, 4.
inline LienardSystem example_system(double epsilon = 0.01)
{
    LienardSystem sys;
    sys.n = 4;
    sys.m = 2;
    sys.f = {PiExt::over_pi(Rational(-476, 225)), PiExt{}, PiExt::over_pi(Rational(-52, 45)), PiExt{},
             PiExt::over_pi(Rational(8, 225))};
    sys.g = {PiExt{Rational(4, 15)}, PiExt{}, PiExt{Rational(1)}};
    sys.epsilon = epsilon;
    return sys;
}

/// Trapezoid rule on a full period; exact for trigonometric polynomials of
/// degree below `points`.
template <class Fn>
double periodic_trapezoid(Fn&& fn, int points = 256)
{
    const double h = 2 * std::numbers::pi / points;
    double sum = 0.0;
    for (int i = 0; i < points; ++i) sum += fn(h * i);
    return sum * h;
}

/// Random rational with numerator in [-limit*den, limit*den].
inline Rational random_rational(std::mt19937_64& rng, long limit, long max_den = 12)
{
    std::uniform_int_distribution<long> den_dist(1, max_den);
    const long den = den_dist(rng);
    std::uniform_int_distribution<long> num_dist(-limit * den, limit * den);
    return Rational(num_dist(rng), den);
}

inline Rational random_nonzero_rational(std::mt19937_64& rng, long limit, long max_den = 12)
{
    for (;;) {
        Rational r = random_rational(rng, limit, max_den);
        if (!r.is_zero()) return r;
    }
}

/// Random system with rational f, g coefficients in [-10, 10].
inline LienardSystem random_system(std::mt19937_64& rng, int max_degree = 8)
{
    std::uniform_int_distribution<int> degree(1, max_degree);
    LienardSystem sys;
    sys.n = degree(rng);
    sys.m = degree(rng);
    for (int i = 0; i <= sys.n; ++i) sys.f.emplace_back(random_rational(rng, 10));
    for (int j = 0; j <= sys.m; ++j) sys.g.emplace_back(random_rational(rng, 10));
    sys.f.back() = PiExt{random_nonzero_rational(rng, 10)};
    sys.g.back() = PiExt{random_nonzero_rational(rng, 10)};
    return sys;
}

} // namespace lienard::testing
