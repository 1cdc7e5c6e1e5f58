#include "lienard/design.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <sstream>

namespace lienard {

CoefficientId CoefficientId::parse(std::string_view text)
{
    if (text.size() < 2 || (text[0] != 'a' && text[0] != 'b')) {
        throw std::invalid_argument("coefficient id must look like a<k> or b<k>, got '" + std::string(text) + "'");
    }
    int index = 0;
    for (char c : text.substr(1)) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            throw std::invalid_argument("coefficient id must look like a<k> or b<k>, got '" + std::string(text) + "'");
        }
        index = index * 10 + (c - '0');
    }
    return {text[0], index};
}

namespace {

using Matrix = std::vector<std::vector<Rational>>;

// Gaussian elimination with partial pivoting on magnitude; returns nullopt
// for a singular system.
std::optional<std::vector<Rational>> solve_exact(Matrix a, std::vector<Rational> b)
{
    const std::size_t size = b.size();
    for (std::size_t col = 0; col < size; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < size; ++row) {
            if (a[row][col].abs() > a[pivot][col].abs()) pivot = row;
        }
        if (a[pivot][col].is_zero()) return std::nullopt;
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (std::size_t row = col + 1; row < size; ++row) {
            if (a[row][col].is_zero()) continue;
            const Rational factor = a[row][col] / a[col][col];
            for (std::size_t k = col; k < size; ++k) a[row][k] -= factor * a[col][k];
            b[row] -= factor * b[col];
        }
    }
    std::vector<Rational> x(size);
    for (std::size_t i = size; i-- > 0;) {
        Rational acc = b[i];
        for (std::size_t k = i + 1; k < size; ++k) acc -= a[i][k] * x[k];
        x[i] = acc / a[i][i];
    }
    return x;
}

// Coefficient multiplying the unknown in pi * F0(t) = 0.
// a_{2i}:  (alpha_i / 2) t^{2i+1}   with unknown A = pi * a_{2i}
// b_{2j}:  2 t^{2j} / (2j+1)        with unknown b_{2j}
Rational equation_weight(const CoefficientId& id, const Rational& t)
{
    if (id.family == 'a') {
        const unsigned i = static_cast<unsigned>(id.index / 2);
        return wallis_alpha(i) / Rational(2) * t.pow(2 * i + 1);
    }
    return Rational(2, id.index + 1L) * t.pow(static_cast<unsigned>(id.index));
}

bool contains(const std::vector<CoefficientId>& ids, const CoefficientId& id)
{
    return std::find(ids.begin(), ids.end(), id) != ids.end();
}

} // namespace

DesignSolution design_cycles(const DesignProblem& problem)
{
    if (problem.n < 1 || problem.m < 1) {
        throw DesignError("design: degrees must satisfy n >= 1 and m >= 1");
    }
    auto check_id = [&](const CoefficientId& id) {
        const int limit = id.family == 'a' ? problem.n : problem.m;
        if (id.index < 0 || id.index > limit) {
            throw DesignError("design: coefficient " + id.to_string() + " is out of range for n=" +
                              std::to_string(problem.n) + ", m=" + std::to_string(problem.m));
        }
    };

    for (std::size_t i = 0; i < problem.targets.size(); ++i) {
        if (problem.targets[i].sign() <= 0) {
            throw DesignError("design: targets must be positive");
        }
        if (i > 0 && !(problem.targets[i - 1] < problem.targets[i])) {
            throw DesignError("design: targets must be strictly increasing");
        }
    }

    // Normalization pin and the remaining fixed values.
    std::optional<std::pair<CoefficientId, PiExt>> pin;
    std::vector<CoefficientId> zeroed = problem.zeroed;
    for (const auto& id : zeroed) check_id(id);
    std::vector<std::pair<CoefficientId, PiExt>> odd_fixed;
    for (const auto& [id, value] : problem.fixed) {
        check_id(id);
        if (contains(zeroed, id)) {
            throw DesignError("design: " + id.to_string() + " is both pinned and zeroed");
        }
        if (!id.is_even()) {
            odd_fixed.emplace_back(id, value);
        } else if (value.is_zero()) {
            zeroed.push_back(id);
        } else if (pin) {
            throw DesignError("design: exactly one even coefficient may be pinned (" + pin->first.to_string() +
                              " and " + id.to_string() + ")");
        } else {
            pin.emplace(id, value);
        }
    }
    if (!pin) {
        const CoefficientId id = problem.default_pin();
        if (contains(zeroed, id)) {
            throw DesignError("design: no normalization pin given and default " + id.to_string() + " is zeroed");
        }
        pin.emplace(id, PiExt{Rational(1)});
    }
    const auto& [pin_id, pin_value] = *pin;
    if (pin_id.family == 'a' && !pin_value.rat.is_zero()) {
        throw DesignError("design: pin " + pin_id.to_string() +
                          " must be a pure 1/pi multiple (e.g. {\"pi_inv\": \"1\"}); a rational part would "
                          "force g-coefficients outside the p + q/pi field");
    }
    if (pin_id.family == 'b' && !pin_value.pi_inv.is_zero()) {
        throw DesignError("design: pin " + pin_id.to_string() + " must be rational");
    }

    std::vector<CoefficientId> unknowns;
    for (int i = 0; 2 * i <= problem.n; ++i) {
        const CoefficientId id{'a', 2 * i};
        if (id != pin_id && !contains(zeroed, id)) unknowns.push_back(id);
    }
    for (int j = 0; 2 * j <= problem.m; ++j) {
        const CoefficientId id{'b', 2 * j};
        if (id != pin_id && !contains(zeroed, id)) unknowns.push_back(id);
    }
    if (unknowns.size() != problem.targets.size()) {
        throw DesignError("design: " + std::to_string(problem.targets.size()) + " targets for " +
                          std::to_string(unknowns.size()) + " free even coefficients");
    }

    // pi * (pin contribution) is rational by the pin checks above.
    const Rational pin_scaled = pin_id.family == 'a' ? pin_value.pi_inv : pin_value.rat;
    Matrix matrix;
    std::vector<Rational> rhs;
    for (const auto& t : problem.targets) {
        std::vector<Rational> row;
        row.reserve(unknowns.size());
        for (const auto& id : unknowns) row.push_back(equation_weight(id, t));
        matrix.push_back(std::move(row));
        rhs.push_back(-(equation_weight(pin_id, t) * pin_scaled));
    }
    const auto solution = solve_exact(matrix, rhs);
    if (!solution) {
        throw DesignError("design: singular linear system; the targets admit no solution under the given pins");
    }

    DesignSolution out;
    LienardSystem& sys = out.system;
    sys.n = problem.n;
    sys.m = problem.m;
    sys.f.assign(static_cast<std::size_t>(problem.n) + 1, PiExt{});
    sys.g.assign(static_cast<std::size_t>(problem.m) + 1, PiExt{});
    auto slot = [&](const CoefficientId& id) -> PiExt& {
        return id.family == 'a' ? sys.f[static_cast<std::size_t>(id.index)]
                                : sys.g[static_cast<std::size_t>(id.index)];
    };
    slot(pin_id) = pin_value;
    for (std::size_t k = 0; k < unknowns.size(); ++k) {
        const auto& id = unknowns[k];
        slot(id) = id.family == 'a' ? PiExt::over_pi((*solution)[k]) : PiExt{(*solution)[k]};
    }
    for (const auto& [id, value] : odd_fixed) slot(id) = value;

    // An odd leading coefficient never enters F0, but the system needs it
    // nonzero to have the stated degree.
    auto default_leading = [&](char family, int degree, PiExt& leading) {
        const CoefficientId id{family, degree};
        if (degree % 2 == 1 && leading.is_zero() && !contains(zeroed, id)) {
            leading = PiExt{Rational(1)};
            out.warnings.push_back(id.to_string() + " set to 1 so the system has degree " + std::to_string(degree));
        }
    };
    default_leading('a', problem.n, sys.f.back());
    default_leading('b', problem.m, sys.g.back());
    if (sys.f.back().is_zero() || sys.g.back().is_zero()) {
        throw DesignError("design: leading coefficient a_" + std::to_string(problem.n) + " or b_" +
                          std::to_string(problem.m) + " is zero in the solution");
    }

    // Verification: exact zeros at the targets, then a numeric root census.
    const AveragedFunction averaged = averaged_function(sys);
    for (const auto& t : problem.targets) {
        if (!averaged.evaluate_exact(t).is_zero()) {
            throw DesignError("design: verification failed, F0(" + t.to_string() + ") is not exactly zero");
        }
    }
    const auto roots = positive_roots(averaged, 1e-13);
    bool matched = roots.size() == problem.targets.size();
    for (std::size_t i = 0; matched && i < roots.size(); ++i) {
        matched = std::fabs(roots[i].value - problem.targets[i].to_double()) <= 1e-12;
    }
    if (!matched) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "design: verification failed, positive roots of F0 are {";
        for (std::size_t i = 0; i < roots.size(); ++i) msg << (i ? ", " : "") << roots[i].value;
        msg << "}";
        throw DesignError(msg.str());
    }
    const bool even_zeroed = std::any_of(zeroed.begin(), zeroed.end(), [](const auto& id) { return id.is_even(); });
    if (!even_zeroed && static_cast<int>(roots.size()) != predicted_cycle_count(problem.n, problem.m)) {
        throw DesignError("design: root count differs from floor(n/2)+floor(m/2)+1");
    }
    if (sys.g[0].is_zero()) {
        out.warnings.push_back("b0 vanishes; F0(0) = 0 and the nondegenerate setting b0 != 0 does not hold");
    }
    return out;
}

ResidualCheck fifth_root_check(const LienardSystem& sys, const std::vector<Rational>& targets)
{
    const AveragedFunction averaged = averaged_function(sys);
    const int degree = averaged.degree();
    if (degree < static_cast<int>(targets.size())) {
        throw DesignError("fifth_root_check: more targets than the degree of F0");
    }

    // Synthetic division by (r - t) for each target, exact in PiExt.
    std::vector<PiExt> current(averaged.coeffs().begin(), averaged.coeffs().begin() + degree + 1);
    for (const auto& t : targets) {
        std::vector<PiExt> quotient(current.size() - 1);
        PiExt carry;
        for (std::size_t k = current.size(); k-- > 0;) {
            const PiExt value = current[k] + carry * t;
            if (k == 0) {
                if (!value.is_zero()) {
                    throw DesignError("fifth_root_check: " + t.to_string() + " is not a root of F0");
                }
            } else {
                quotient[k - 1] = value;
            }
            carry = value;
        }
        current = std::move(quotient);
    }

    ResidualCheck out;
    out.quotient = AveragedFunction{current};
    const double lead = pi_ext_to_real(averaged[static_cast<std::size_t>(degree)]);
    double product = std::fabs(pi_ext_to_real(averaged[0]) / lead);
    for (const auto& t : targets) product /= t.to_double();
    out.magnitude_product = product;

    if (out.quotient.degree() > 0) {
        for (const auto& root : positive_roots(out.quotient, 1e-13)) {
            out.residual_real_roots.push_back(root.value);
            out.positive_free = false;
        }
        // Negative roots: roots of q(-r).
        std::vector<PiExt> mirrored = current;
        for (std::size_t k = 1; k < mirrored.size(); k += 2) mirrored[k] = -mirrored[k];
        for (const auto& root : positive_roots(AveragedFunction{mirrored}, 1e-13)) {
            out.residual_real_roots.push_back(-root.value);
        }
        std::sort(out.residual_real_roots.begin(), out.residual_real_roots.end());
    }
    return out;
}

} // namespace lienard
