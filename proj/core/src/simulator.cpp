#include "lienard/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace lienard {

void IntegratorConfig::validate() const
{
    if (!(rtol > 0) || !(atol > 0) || !(max_step > 0) || !(event_tol > 0) || max_transits <= 0 || max_steps <= 0) {
        throw std::invalid_argument("IntegratorConfig: all tolerances and limits must be positive");
    }
}

const char* to_string(BoundaryKind kind) noexcept
{
    switch (kind) {
    case BoundaryKind::Crossing: return "Crossing";
    case BoundaryKind::Sliding: return "Sliding";
    case BoundaryKind::Escaping: return "Escaping";
    case BoundaryKind::Tangency: return "Tangency";
    }
    return "?";
}

const char* to_string(SimulationError::Kind kind) noexcept
{
    switch (kind) {
    case SimulationError::Kind::MaxStepsExceeded: return "MaxStepsExceeded";
    case SimulationError::Kind::SlidingEncountered: return "SlidingEncountered";
    case SimulationError::Kind::NonFiniteState: return "NonFiniteState";
    case SimulationError::Kind::NoReturn: return "NoReturn";
    case SimulationError::Kind::Precondition: return "Precondition";
    }
    return "?";
}

const char* to_string(Stability s) noexcept { return s == Stability::Stable ? "Stable" : "Unstable"; }

PiecewiseField::PiecewiseField(const LienardSystem& sys) : epsilon_(sys.epsilon)
{
    sys.validate();
    for (const auto& c : sys.f) f_.push_back(pi_ext_to_real(c));
    for (const auto& c : sys.g) g_.push_back(pi_ext_to_real(c));
}

namespace {

double horner(const std::vector<double>& c, double x) noexcept
{
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
}

} // namespace

double PiecewiseField::f(double x) const noexcept { return horner(f_, x); }
double PiecewiseField::g(double x) const noexcept { return horner(g_, x); }

Derivative field_upper(const State& s, const PiecewiseField& field) noexcept
{
    return {s.y, -s.x - field.epsilon() * (field.f(s.x) * s.y + field.g(s.x))};
}

Derivative field_lower(const State& s, const PiecewiseField& field) noexcept
{
    return {s.y, -s.x - field.epsilon() * (field.f(s.x) * s.y - field.g(s.x))};
}

LieDerivatives lie_derivatives(double x, const PiecewiseField& field) noexcept
{
    const double eg = field.epsilon() * field.g(x);
    return {-x + eg, -x - eg};
}

BoundaryKind classify_boundary(double x, const PiecewiseField& field, double threshold) noexcept
{
    const auto [xh, yh] = lie_derivatives(x, field);
    if (std::fabs(xh) <= threshold || std::fabs(yh) <= threshold) return BoundaryKind::Tangency;
    if (xh * yh > 0) return BoundaryKind::Crossing;
    return xh < 0 ? BoundaryKind::Sliding : BoundaryKind::Escaping;
}

double crossing_certificate(double x, const PiecewiseField& field) noexcept
{
    const double eg = field.epsilon() * field.g(x);
    return x * x - eg * eg;
}

namespace {

// Dormand–Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct StepOutcome {
    State next;
    double err_x = 0.0;
    double err_y = 0.0;
};

template <class Field>
StepOutcome dp_step(const State& s, double h, Field&& rhs)
{
    auto eval = [&](double x, double y) { return rhs(State{x, y, 0.0}); };
    const Derivative k1 = eval(s.x, s.y);
    const Derivative k2 = eval(s.x + h * a21 * k1.dx, s.y + h * a21 * k1.dy);
    const Derivative k3 = eval(s.x + h * (a31 * k1.dx + a32 * k2.dx), s.y + h * (a31 * k1.dy + a32 * k2.dy));
    const Derivative k4 = eval(s.x + h * (a41 * k1.dx + a42 * k2.dx + a43 * k3.dx),
                               s.y + h * (a41 * k1.dy + a42 * k2.dy + a43 * k3.dy));
    const Derivative k5 = eval(s.x + h * (a51 * k1.dx + a52 * k2.dx + a53 * k3.dx + a54 * k4.dx),
                               s.y + h * (a51 * k1.dy + a52 * k2.dy + a53 * k3.dy + a54 * k4.dy));
    const Derivative k6 = eval(s.x + h * (a61 * k1.dx + a62 * k2.dx + a63 * k3.dx + a64 * k4.dx + a65 * k5.dx),
                               s.y + h * (a61 * k1.dy + a62 * k2.dy + a63 * k3.dy + a64 * k4.dy + a65 * k5.dy));
    StepOutcome out;
    out.next.x = s.x + h * (b1 * k1.dx + b3 * k3.dx + b4 * k4.dx + b5 * k5.dx + b6 * k6.dx);
    out.next.y = s.y + h * (b1 * k1.dy + b3 * k3.dy + b4 * k4.dy + b5 * k5.dy + b6 * k6.dy);
    out.next.t = s.t + h;
    const Derivative k7 = eval(out.next.x, out.next.y);
    out.err_x = h * (e1 * k1.dx + e3 * k3.dx + e4 * k4.dx + e5 * k5.dx + e6 * k6.dx + e7 * k7.dx);
    out.err_y = h * (e1 * k1.dy + e3 * k3.dy + e4 * k4.dy + e5 * k5.dy + e6 * k6.dy + e7 * k7.dy);
    return out;
}

std::string describe(const char* what, const State& s)
{
    std::ostringstream msg;
    msg.precision(17);
    msg << what << " at (x=" << s.x << ", y=" << s.y << ", t=" << s.t << ")";
    return msg.str();
}

} // namespace

TransitResult integrate_transit(const State& start, Half half, const PiecewiseField& field,
                                const IntegratorConfig& cfg, const StateObserver& observer)
{
    cfg.validate();
    const double side = half == Half::Upper ? 1.0 : -1.0;
    auto rhs = [&](const State& s) { return half == Half::Upper ? field_upper(s, field) : field_lower(s, field); };

    State current = start;
    const bool on_section = std::fabs(start.y) <= cfg.event_tol;
    if (on_section) {
        current.y = 0.0;
        if (rhs(current).dy * side <= 0) {
            throw SimulationError(SimulationError::Kind::SlidingEncountered,
                                  describe("field does not enter the half-plane", current));
        }
    } else if (start.y * side < 0) {
        throw SimulationError(SimulationError::Kind::Precondition,
                              describe("start state lies in the other half-plane", start));
    }

    auto error_norm = [&](const State& from, const StepOutcome& step) {
        const double sx = cfg.atol + cfg.rtol * std::max(std::fabs(from.x), std::fabs(step.next.x));
        const double sy = cfg.atol + cfg.rtol * std::max(std::fabs(from.y), std::fabs(step.next.y));
        const double ex = step.err_x / sx;
        const double ey = step.err_y / sy;
        return std::sqrt((ex * ex + ey * ey) / 2);
    };

    double h = std::min(cfg.max_step, 1e-2);
    long steps = 0;
    bool first = true;
    if (observer) observer(current);

    while (true) {
        if (++steps > cfg.max_steps) {
            throw SimulationError(SimulationError::Kind::MaxStepsExceeded, describe("step limit reached", current));
        }
        h = std::min(h, cfg.max_step);
        const StepOutcome step = dp_step(current, h, rhs);
        if (!std::isfinite(step.next.x) || !std::isfinite(step.next.y)) {
            throw SimulationError(SimulationError::Kind::NonFiniteState, describe("non-finite state", current));
        }
        const double err = error_norm(current, step);
        if (!(err <= 1.0)) {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            if (h < 1e-14 * std::max(1.0, std::fabs(current.t))) {
                throw SimulationError(SimulationError::Kind::NonFiniteState, describe("step size underflow", current));
            }
            continue;
        }

        if (step.next.y * side > 0) {
            current = step.next;
            first = false;
            if (observer) observer(current);
            h *= err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            continue;
        }

        if (first && on_section) {
            throw SimulationError(SimulationError::Kind::SlidingEncountered,
                                  describe("orbit left the half-plane within one step", current));
        }

        // Section crossed inside (current.t, current.t + h].
        double lo = 0.0;
        double hi = h;
        State hit = step.next;
        for (int iter = 0; iter < 200 && std::fabs(hit.y) > cfg.event_tol; ++iter) {
            const double mid = lo + (hi - lo) / 2;
            if (mid <= lo || mid >= hi) break;
            const State trial = dp_step(current, mid, rhs).next;
            hit = trial;
            if (trial.y * side > 0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hit.y = 0.0;
        if (observer) observer(hit);

        const double threshold = std::fabs(field.epsilon() * field.g(hit.x)) + cfg.event_tol;
        if (std::fabs(hit.x) <= threshold) {
            throw SimulationError(SimulationError::Kind::SlidingEncountered, describe("near-tangency hit", hit));
        }
        const BoundaryKind kind = classify_boundary(hit.x, field, cfg.event_tol);
        if (kind != BoundaryKind::Crossing) {
            throw SimulationError(SimulationError::Kind::SlidingEncountered,
                                  describe((std::string(to_string(kind)) + " point hit").c_str(), hit));
        }
        return {hit, steps};
    }
}

ReturnResult poincare_return(double x0, const PiecewiseField& field, const IntegratorConfig& cfg,
                             const StateObserver& observer)
{
    if (!(x0 > 0)) {
        throw SimulationError(SimulationError::Kind::Precondition, "poincare_map: x0 must be positive");
    }
    if (classify_boundary(x0, field, cfg.event_tol) != BoundaryKind::Crossing) {
        throw SimulationError(SimulationError::Kind::SlidingEncountered,
                              describe("poincare_map: start is not a crossing point", State{x0, 0.0, 0.0}));
    }
    const TransitResult lower = integrate_transit(State{x0, 0.0, 0.0}, Half::Lower, field, cfg, observer);
    if (!(lower.hit.x < 0)) {
        throw SimulationError(SimulationError::Kind::NoReturn, describe("first hit not on negative axis", lower.hit));
    }
    const TransitResult upper = integrate_transit(lower.hit, Half::Upper, field, cfg, observer);
    if (!(upper.hit.x > 0)) {
        throw SimulationError(SimulationError::Kind::NoReturn, describe("no return to positive axis", upper.hit));
    }
    return {upper.hit.x, upper.hit.t, lower.hit, upper.hit, lower.steps + upper.steps};
}

double poincare_map(double x0, const PiecewiseField& field, const IntegratorConfig& cfg)
{
    return poincare_return(x0, field, cfg).x;
}

std::vector<State> simulate_trajectory(const State& seed, const PiecewiseField& field, const IntegratorConfig& cfg,
                                       int transits)
{
    std::vector<State> out;
    auto record = [&out](const State& s) {
        if (out.empty() || out.back().t != s.t) out.push_back(s);
    };
    State current = seed;
    Half half = current.y > 0 ? Half::Upper : Half::Lower;
    if (std::fabs(current.y) <= cfg.event_tol) half = current.x > 0 ? Half::Lower : Half::Upper;
    for (int k = 0; k < transits; ++k) {
        try {
            current = integrate_transit(current, half, field, cfg, record).hit;
        } catch (const SimulationError&) {
            break;
        }
        half = half == Half::Upper ? Half::Lower : Half::Upper;
    }
    if (out.empty()) out.push_back(seed);
    return out;
}

namespace {

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn)
{
    if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    }
}

double noise_floor(double x, const IntegratorConfig& cfg) { return 100.0 * (cfg.rtol * std::max(1.0, x) + cfg.atol); }

} // namespace

ScanResult find_limit_cycles(const PiecewiseField& field, const IntegratorConfig& cfg, const ScanWindow& scan,
                             const ScanOptions& options)
{
    cfg.validate();
    if (!(scan.lo > 0) || !(scan.hi > scan.lo) || scan.count < 2) {
        throw std::invalid_argument("find_limit_cycles: need 0 < lo < hi and count >= 2");
    }

    ScanResult result;
    std::atomic<std::size_t> hits{0};
    std::atomic<std::size_t> violations{0};
    auto certified_return = [&](double x) {
        const ReturnResult r = poincare_return(x, field, cfg);
        for (double hx : {r.negative_hit.x, r.positive_hit.x}) {
            ++hits;
            if (!(crossing_certificate(hx, field) > 0)) ++violations;
        }
        return r;
    };

    result.samples.resize(scan.count);
    const double step = (scan.hi - scan.lo) / static_cast<double>(scan.count - 1);
    parallel_for(scan.count, options.threads, [&](std::size_t i) {
        ScanSample& sample = result.samples[i];
        sample.x0 = i + 1 == scan.count ? scan.hi : scan.lo + step * static_cast<double>(i);
        try {
            const ReturnResult r = certified_return(sample.x0);
            sample.p = r.x;
            sample.d = r.x - sample.x0;
            sample.period = r.period;
        } catch (const SimulationError& e) {
            sample.p = sample.d = sample.period = std::numeric_limits<double>::quiet_NaN();
            sample.error = std::string(to_string(e.kind())) + ": " + e.what();
        }
    });

    result.degenerate = std::all_of(result.samples.begin(), result.samples.end(), [&](const ScanSample& s) {
        return s.error || std::fabs(s.d) <= noise_floor(s.x0, cfg);
    });

    std::vector<std::size_t> brackets;
    if (!result.degenerate) {
        for (std::size_t i = 0; i + 1 < result.samples.size(); ++i) {
            const auto& a = result.samples[i];
            const auto& b = result.samples[i + 1];
            if (a.error || b.error) continue;
            const bool significant = std::max(std::fabs(a.d), std::fabs(b.d)) > noise_floor(b.x0, cfg);
            if (significant && ((a.d < 0 && b.d >= 0) || (a.d > 0 && b.d <= 0))) brackets.push_back(i);
        }
    }

    std::vector<std::optional<CycleRecord>> found(brackets.size());
    parallel_for(brackets.size(), options.threads, [&](std::size_t k) {
        const auto& a = result.samples[brackets[k]];
        const auto& b = result.samples[brackets[k] + 1];
        CycleRecord rec;
        rec.bracket = {a.x0, b.x0};
        rec.bracket_d = {a.d, b.d};
        rec.stability = a.d > 0 ? Stability::Stable : Stability::Unstable;
        try {
            double lo = a.x0;
            double hi = b.x0;
            const double lo_sign = a.d;
            double x = b.d == 0 ? b.x0 : lo + (hi - lo) / 2;
            if (b.d != 0) {
                for (int iter = 0; iter < 200; ++iter) {
                    x = lo + (hi - lo) / 2;
                    if (hi - lo <= 1e-11 * std::max(1.0, x)) break;
                    const double d = certified_return(x).x - x;
                    if (std::fabs(d) <= 10 * cfg.event_tol) break;
                    if ((d < 0) == (lo_sign < 0)) {
                        lo = x;
                    } else {
                        hi = x;
                    }
                }
            }
            rec.radius = x;
            rec.period = certified_return(x).period;
            const double dx = 1e-4 * x;
            rec.multiplier = (certified_return(x + dx).x - certified_return(x - dx).x) / (2 * dx);
            found[k] = rec;
        } catch (const SimulationError&) {
            // Bracket lost to an integrator failure; the samples keep the annotation.
        }
    });
    for (auto& rec : found) {
        if (rec) result.cycles.push_back(*rec);
    }
    std::sort(result.cycles.begin(), result.cycles.end(),
              [](const CycleRecord& p, const CycleRecord& q) { return p.radius < q.radius; });
    result.hits_checked = hits.load();
    result.certificate_violations = violations.load();
    return result;
}

} // namespace lienard
