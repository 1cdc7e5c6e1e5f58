#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lienard/averaging.hpp"

namespace lienard {

struct State {
    double x = 0.0;
    double y = 0.0;
    double t = 0.0;
};

struct IntegratorConfig {
    double rtol = 1e-10;
    double atol = 1e-12;
    double max_step = 0.1;
    /// |y| accepted at a section hit.
    double event_tol = 1e-12;
    /// Section crossings followed by trajectory dumps.
    int max_transits = 16;
    /// Step attempts allowed within one half-plane transit.
    long max_steps = 1'000'000;

    void validate() const;
};

enum class Half { Upper, Lower };

enum class BoundaryKind { Crossing, Sliding, Escaping, Tangency };

const char* to_string(BoundaryKind kind) noexcept;

/// Numeric view of a LienardSystem: f and g rendered as doubles once.
class PiecewiseField {
public:
    explicit PiecewiseField(const LienardSystem& sys);

    double f(double x) const noexcept;
    double g(double x) const noexcept;
    double epsilon() const noexcept { return epsilon_; }

private:
    std::vector<double> f_;
    std::vector<double> g_;
    double epsilon_ = 0.0;
};

struct Derivative {
    double dx = 0.0;
    double dy = 0.0;
};

/// Field valid for y > 0:  (y, -x - eps (f(x) y + g(x)))
Derivative field_upper(const State& s, const PiecewiseField& field) noexcept;
/// Field valid for y < 0:  (y, -x - eps (f(x) y - g(x)))
Derivative field_lower(const State& s, const PiecewiseField& field) noexcept;

/// Lie derivatives of h(x, y) = y along both fields at (x, 0).
struct LieDerivatives {
    double upper = 0.0; ///< -x + eps g(x)
    double lower = 0.0; ///< -x - eps g(x)
};

LieDerivatives lie_derivatives(double x, const PiecewiseField& field) noexcept;

/// Crossing iff the product of the Lie derivatives is positive; Tangency if
/// either one is within `threshold` of zero.
BoundaryKind classify_boundary(double x, const PiecewiseField& field, double threshold = 0.0) noexcept;

/// x^2 - eps^2 g(x)^2, positive exactly on the crossing region.
double crossing_certificate(double x, const PiecewiseField& field) noexcept;

class SimulationError : public std::runtime_error {
public:
    enum class Kind { MaxStepsExceeded, SlidingEncountered, NonFiniteState, NoReturn, Precondition };

    SimulationError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

const char* to_string(SimulationError::Kind kind) noexcept;

struct TransitResult {
    State hit;
    long steps = 0;
};

using StateObserver = std::function<void(const State&)>;

/// Integrates inside one half-plane with an adaptive Dormand–Prince 5(4)
/// pair until the orbit returns to y = 0. The hit is located by bisection
/// in time (re-integrating the bracketing step) to |y| <= event_tol and
/// returned with y snapped to 0. Hits that are not crossing points, or lie
/// within eps |g(x)| + event_tol of the origin, raise SlidingEncountered.
TransitResult integrate_transit(const State& start, Half half, const PiecewiseField& field,
                                const IntegratorConfig& cfg, const StateObserver& observer = {});

struct ReturnResult {
    double x = 0.0;       ///< P(x0)
    double period = 0.0;  ///< flow time of the full return
    State negative_hit;   ///< hit on the negative x-axis
    State positive_hit;   ///< hit back on the positive x-axis
    long steps = 0;
};

/// Full first return to {y = 0, x > 0}: lower half-plane, then upper.
ReturnResult poincare_return(double x0, const PiecewiseField& field, const IntegratorConfig& cfg,
                             const StateObserver& observer = {});

double poincare_map(double x0, const PiecewiseField& field, const IntegratorConfig& cfg);

/// Follows alternating transits from a seed for `transits` section
/// crossings (or until an integrator error), recording accepted steps.
std::vector<State> simulate_trajectory(const State& seed, const PiecewiseField& field, const IntegratorConfig& cfg,
                                       int transits);

struct ScanWindow {
    double lo = 0.25;
    double hi = 5.0;
    std::size_t count = 200;
};

struct ScanSample {
    double x0 = 0.0;
    double p = 0.0;
    double d = 0.0;
    double period = 0.0;
    /// Set when the integrator failed at this point; p, d are then NaN.
    std::optional<std::string> error;
};

enum class Stability { Stable, Unstable };

const char* to_string(Stability s) noexcept;

struct CycleRecord {
    double radius = 0.0;
    Stability stability = Stability::Stable;
    double period = 0.0;
    /// Scan samples (x, D) that bracketed the fixed point.
    std::pair<double, double> bracket{0.0, 0.0};
    std::pair<double, double> bracket_d{0.0, 0.0};
    /// P'(radius) by central differences; diagnostic only.
    double multiplier = 0.0;
};

struct ScanResult {
    std::vector<ScanSample> samples;
    std::vector<CycleRecord> cycles;
    /// Every |D| sample was within integration noise (e.g. eps = 0).
    bool degenerate = false;
    std::size_t hits_checked = 0;
    std::size_t certificate_violations = 0;
};

struct ScanOptions {
    /// Worker threads for the scan; 0 picks std::thread::hardware_concurrency().
    unsigned threads = 0;
};

/// Samples D(x) = P(x) - x on an even grid, brackets sign changes and
/// bisects each to a fixed point. Stability comes from the sign pattern of D.
ScanResult find_limit_cycles(const PiecewiseField& field, const IntegratorConfig& cfg, const ScanWindow& scan,
                             const ScanOptions& options = {});

} // namespace lienard
