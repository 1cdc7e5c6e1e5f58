#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lienard/averaging.hpp"
#include "lienard/exactnum.hpp"

namespace lienard {

/// Names a coefficient: 'a' for f, 'b' for g, plus the power of x.
struct CoefficientId {
    char family = 'b';
    int index = 0;

    /// Parses "a4", "b0", ...
    static CoefficientId parse(std::string_view text);
    std::string to_string() const { return std::string(1, family) + std::to_string(index); }
    bool is_even() const noexcept { return index % 2 == 0; }

    friend bool operator==(const CoefficientId&, const CoefficientId&) = default;
};

/// Inverse problem: pick the even coefficients of f and g so that F0
/// vanishes exactly at the target radii.
///
/// Exactly one even coefficient is pinned to a nonzero value (the
/// normalization). An a-pin must be a pure 1/pi multiple and a b-pin must be
/// rational, otherwise the solution leaves the p + q/pi field. Odd
/// coefficients do not enter F0; they default to zero and may be set through
/// `fixed`.
struct DesignProblem {
    int n = 1;
    int m = 1;
    std::vector<Rational> targets;
    std::vector<std::pair<CoefficientId, PiExt>> fixed;
    std::vector<CoefficientId> zeroed;

    /// Pin used when `fixed` holds no even entry: b_{2*floor(m/2)} = 1.
    CoefficientId default_pin() const { return {'b', 2 * (m / 2)}; }
};

class DesignError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DesignSolution {
    LienardSystem system;
    /// Non-fatal findings, e.g. a vanishing b_0.
    std::vector<std::string> warnings;
};

/// Solves F0(t_i) = 0 exactly (rational Gaussian elimination after the
/// substitution A = pi * a) and verifies the positive roots of the result.
/// The returned system has epsilon = 0; epsilon is chosen at simulation time.
DesignSolution design_cycles(const DesignProblem& problem);

struct ResidualCheck {
    /// |c_0 / c_d| / prod(targets): product of the magnitudes of the roots
    /// left after dividing out the targets.
    double magnitude_product = 0.0;
    /// Exact quotient F0 / prod(r - t_i).
    AveragedFunction quotient;
    /// Real roots of the quotient.
    std::vector<double> residual_real_roots;
    bool positive_free = true;
};

/// Deflates F0 by the targets (exact; throws DesignError if a target is
/// not a root) and inspects what is left.
ResidualCheck fifth_root_check(const LienardSystem& sys, const std::vector<Rational>& targets);

} // namespace lienard
