#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lienard/exactnum.hpp"

namespace lienard {

/// x' = y,  y' = -x - eps * (f(x) y + sgn(y) g(x))
///
/// f has coefficients a_0..a_n, g has b_0..b_m (index = power of x).
struct LienardSystem {
    int n = 1;
    int m = 1;
    std::vector<PiExt> f;
    std::vector<PiExt> g;
    double epsilon = 0.0;

    /// Throws std::invalid_argument on degree/length mismatch or a vanishing
    /// leading coefficient.
    void validate() const;
};

/// Polynomial in r with PiExt coefficients; coeffs[k] multiplies r^k.
class AveragedFunction {
public:
    AveragedFunction() = default;
    explicit AveragedFunction(std::vector<PiExt> coeffs);

    const std::vector<PiExt>& coeffs() const noexcept { return coeffs_; }
    const PiExt& operator[](std::size_t k) const { return coeffs_.at(k); }

    /// Index of the highest nonzero coefficient, -1 for the zero polynomial.
    int degree() const noexcept;
    bool is_zero() const noexcept { return degree() < 0; }

    PiExt evaluate_exact(const Rational& r) const;
    long double evaluate(long double r) const;
    AveragedFunction derivative() const;

    /// Coefficients rendered as doubles.
    std::vector<double> numeric() const;

    friend bool operator==(const AveragedFunction&, const AveragedFunction&) = default;

private:
    std::vector<PiExt> coeffs_;
};

struct RootRecord {
    double value = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    bool simple = true;
    /// Brouwer degree of F0 at the root, i.e. sign(F0'(value)).
    int degree_sign = 0;
};

class RootError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// alpha_k with  int_0^{2pi} cos^{2k}(t) sin^2(t) dt = pi * alpha_k.
Rational wallis_alpha(unsigned k);

/// Closed-form first-order averaged function
///   F0(r) = sum_i (alpha_i / 2) a_{2i} r^{2i+1} + sum_j 2 b_{2j} r^{2j} / ((2j+1) pi).
/// Throws FieldError if an even g-coefficient carries a 1/pi part.
AveragedFunction averaged_function(const LienardSystem& sys);

/// Direct quadrature of
///   (1/2pi) int_0^{2pi} f(r cos t) r sin^2 t + sgn(sin t) sin t g(r cos t) dt,
/// split at t = pi. Independent of averaged_function.
double averaged_quadrature(const LienardSystem& sys, double r);

/// Sign variations of the nonzero coefficients in increasing-power order.
int descartes_bound(const AveragedFunction& p);

/// 1 + 2 * (1 + max_k |c_k / c_d|).
double default_root_radius(const AveragedFunction& p);

struct RootOptions {
    /// Sign-scan points; 0 selects 10 * (degree + 1).
    std::size_t grid_points = 0;
    /// Number of grid doublings tried while fewer brackets than the
    /// Descartes bound have been found.
    int max_refinements = 8;
};

/// Positive roots of p in (0, r_max], sorted ascending, each enclosed to
/// width <= tol. Throws RootError on a non-simple root or when more roots
/// than the Descartes bound are bracketed.
std::vector<RootRecord> positive_roots(const AveragedFunction& p, double r_max, double tol,
                                       const RootOptions& options = {});

/// Same with r_max = default_root_radius(p).
std::vector<RootRecord> positive_roots(const AveragedFunction& p, double tol);

/// floor(n/2) + floor(m/2) + 1
int predicted_cycle_count(int n, int m);

} // namespace lienard
