#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "lienard/design.hpp"
#include "support.hpp"

using namespace lienard;

namespace {

DesignProblem example_problem(const Rational& b2 = Rational(1))
{
    DesignProblem p;
    p.n = 4;
    p.m = 2;
    p.targets = {Rational(1), Rational(2), Rational(3), Rational(4)};
    p.fixed = {{CoefficientId{'b', 2}, PiExt{b2}}};
    p.zeroed = {CoefficientId{'a', 1}, CoefficientId{'a', 3}, CoefficientId{'b', 1}};
    return p;
}

std::vector<Rational> random_targets(std::mt19937_64& rng, int count)
{
    // Distinct multiples of 1/20 in [0.5, 10].
    std::uniform_int_distribution<long> dist(10, 200);
    std::set<long> picked;
    while (static_cast<int>(picked.size()) < count) picked.insert(dist(rng));
    std::vector<Rational> out;
    for (long v : picked) out.emplace_back(v, 20);
    return out;
}

} // namespace

TEST_CASE("coefficient ids")
{
    CHECK(CoefficientId::parse("a4") == CoefficientId{'a', 4});
    CHECK(CoefficientId::parse("b10").index == 10);
    CHECK(CoefficientId::parse("b2").to_string() == "b2");
    CHECK_THROWS_AS(CoefficientId::parse("c1"), std::invalid_argument);
    CHECK_THROWS_AS(CoefficientId::parse("a"), std::invalid_argument);
    CHECK_THROWS_AS(CoefficientId::parse("a-1"), std::invalid_argument);
}

TEST_CASE("design reproduces the worked example exactly")
{
    const DesignSolution s = design_cycles(example_problem());
    const LienardSystem& sys = s.system;
    CHECK(sys.f[0] == PiExt::over_pi(Rational(-476, 225)));
    CHECK(sys.f[1].is_zero());
    CHECK(sys.f[2] == PiExt::over_pi(Rational(-52, 45)));
    CHECK(sys.f[3].is_zero());
    CHECK(sys.f[4] == PiExt::over_pi(Rational(8, 225)));
    CHECK(sys.g[0] == PiExt{Rational(4, 15)});
    CHECK(sys.g[1].is_zero());
    CHECK(sys.g[2] == PiExt{Rational(1)});
    CHECK(s.warnings.empty());
    CHECK(sys.epsilon == 0.0);
}

TEST_CASE("design uses the default pin b_{2 floor(m/2)} = 1")
{
    DesignProblem p = example_problem();
    p.fixed.clear();
    p.zeroed.clear();
    CHECK(design_cycles(p).system.f == design_cycles(example_problem()).system.f);
}

TEST_CASE("doubling the pin doubles the solution")
{
    const LienardSystem base = design_cycles(example_problem()).system;
    const LienardSystem twice = design_cycles(example_problem(Rational(2))).system;
    for (std::size_t i = 0; i < base.f.size(); ++i) CHECK(twice.f[i] == base.f[i] * Rational(2));
    for (std::size_t j = 0; j < base.g.size(); ++j) CHECK(twice.g[j] == base.g[j] * Rational(2));
}

TEST_CASE("n=2, m=1 design with a 1/pi pin on a2")
{
    // F0 must be proportional to (r-1)(r-2)(r+3) = r^3 - 7r + 6. With
    // a2 = 1/pi the r^3 coefficient is 1/(8 pi), hence a0 = -7/(4 pi) and
    // b0 = 3/8.
    DesignProblem p;
    p.n = 2;
    p.m = 1;
    p.targets = {Rational(1), Rational(2)};
    p.fixed = {{CoefficientId{'a', 2}, PiExt::over_pi(Rational(1))}};
    const DesignSolution s = design_cycles(p);
    CHECK(s.system.f[0] == PiExt::over_pi(Rational(-7, 4)));
    CHECK(s.system.f[1].is_zero());
    CHECK(s.system.g[0] == PiExt{Rational(3, 8)});
    // b1 is the odd leading coefficient; it defaults to 1.
    CHECK(s.system.g[1] == PiExt{Rational(1)});
    CHECK(s.warnings.size() == 1);
    for (double r : {1.0, 2.0}) CHECK(std::fabs(averaged_quadrature(s.system, r)) <= 1e-9);

    // A rational a-pin would push pi into g.
    p.fixed = {{CoefficientId{'a', 2}, PiExt{Rational(1)}}};
    CHECK_THROWS_AS(design_cycles(p), DesignError);
}

TEST_CASE("design error paths")
{
    DesignProblem p = example_problem();
    p.targets = {Rational(1), Rational(2), Rational(2), Rational(4)};
    CHECK_THROWS_AS(design_cycles(p), DesignError);

    p = example_problem();
    p.targets.pop_back();
    CHECK_THROWS_AS(design_cycles(p), DesignError);

    p = example_problem();
    p.targets[0] = Rational(-1);
    CHECK_THROWS_AS(design_cycles(p), DesignError);

    p = example_problem();
    p.fixed.push_back({CoefficientId{'a', 0}, PiExt::over_pi(Rational(1))});
    CHECK_THROWS_AS(design_cycles(p), DesignError);

    p = example_problem();
    p.fixed = {{CoefficientId{'b', 2}, PiExt::over_pi(Rational(1))}};
    CHECK_THROWS_AS(design_cycles(p), DesignError);

    p = example_problem();
    p.fixed.push_back({CoefficientId{'a', 7}, PiExt{Rational(1)}});
    CHECK_THROWS_AS(design_cycles(p), DesignError);
}

TEST_CASE("odd coefficients can be set without changing F0")
{
    DesignProblem p = example_problem();
    p.zeroed.clear();
    p.fixed.push_back({CoefficientId{'a', 1}, PiExt{Rational(5)}});
    p.fixed.push_back({CoefficientId{'b', 1}, PiExt::over_pi(Rational(-2))});
    const LienardSystem sys = design_cycles(p).system;
    CHECK(sys.f[1] == PiExt{Rational(5)});
    CHECK(sys.g[1] == PiExt::over_pi(Rational(-2)));
    CHECK(averaged_function(sys) == averaged_function(design_cycles(example_problem()).system));
}

TEST_CASE("zeroing an even coefficient removes one unknown")
{
    DesignProblem p;
    p.n = 4;
    p.m = 2;
    p.targets = {Rational(1), Rational(2), Rational(3)};
    p.zeroed = {CoefficientId{'b', 0}};
    const DesignSolution s = design_cycles(p);
    CHECK(s.system.g[0].is_zero());
    CHECK(!s.warnings.empty());
    CHECK(positive_roots(averaged_function(s.system), 1e-12).size() == 3);
}

TEST_CASE("fifth_root_check on the worked example")
{
    const LienardSystem sys = design_cycles(example_problem()).system;
    const ResidualCheck check = fifth_root_check(sys, example_problem().targets);
    CHECK(check.magnitude_product == doctest::Approx(10.0).epsilon(1e-14));
    REQUIRE(check.residual_real_roots.size() == 1);
    CHECK(check.residual_real_roots[0] == doctest::Approx(-10.0).epsilon(1e-12));
    CHECK(check.positive_free);
    CHECK(check.quotient == AveragedFunction{{PiExt::over_pi(Rational(10, 450)), PiExt::over_pi(Rational(1, 450))}});

    CHECK_THROWS_AS(fifth_root_check(sys, {Rational(5)}), DesignError);
}

TEST_CASE("fifth_root_check when every root is assigned")
{
    // n = 1, m = 2: F0 = (a0/2) r + 2 b0/pi + 2 b2 r^2/(3 pi); two targets
    // use up the whole quadratic.
    DesignProblem p;
    p.n = 1;
    p.m = 2;
    p.targets = {Rational(1), Rational(3)};
    const LienardSystem sys = design_cycles(p).system;
    const ResidualCheck check = fifth_root_check(sys, p.targets);
    CHECK(check.quotient.degree() == 0);
    CHECK(check.residual_real_roots.empty());
    CHECK(check.positive_free);
}

TEST_CASE("property: random designs round-trip")
{
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 50; ++trial) {
        std::uniform_int_distribution<int> degree(1, 6);
        DesignProblem p;
        p.n = degree(rng);
        p.m = degree(rng);
        const int k = predicted_cycle_count(p.n, p.m);
        p.targets = random_targets(rng, k);
        const Rational scale = testing::random_nonzero_rational(rng, 5);
        if (trial % 2 == 0) {
            p.fixed = {{CoefficientId{'b', 2 * (p.m / 2)}, PiExt{scale}}};
        } else {
            p.fixed = {{CoefficientId{'a', 2 * (p.n / 2)}, PiExt::over_pi(scale)}};
        }
        const DesignSolution s = design_cycles(p);
        const AveragedFunction f0 = averaged_function(s.system);

        // exact residuals
        for (const auto& t : p.targets) CHECK(f0.evaluate_exact(t).is_zero());

        const auto roots = positive_roots(f0, 1e-13);
        REQUIRE(static_cast<int>(roots.size()) == k);
        for (int i = 0; i < k; ++i) CHECK(std::fabs(roots[i].value - p.targets[i].to_double()) <= 1e-12);

        CHECK(fifth_root_check(s.system, p.targets).positive_free);

        // Scaling covariance.
        DesignProblem scaled = p;
        scaled.fixed[0].second = p.fixed[0].second * Rational(3, 2);
        const LienardSystem s2 = design_cycles(scaled).system;
        for (int i = 0; i <= p.n; i += 2) CHECK(s2.f[i] == s.system.f[i] * Rational(3, 2));
        for (int j = 0; j <= p.m; j += 2) CHECK(s2.g[j] == s.system.g[j] * Rational(3, 2));
    }
}
