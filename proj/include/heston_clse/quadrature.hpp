#pragma once

#include <cmath>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace heston_clse::quadrature {

/// Absolute tolerance per nesting level, spread over the interval in
/// proportion to its length.
inline constexpr double kTolerance = 1e-12;
inline constexpr int kMaxDepth = 30;

namespace detail {

struct Estimate {
    double kronrod;
    double error;
};

// 21-point Kronrod / 10-point Gauss pair on [lo, hi]. Node and weight tables
// come from Boost.Math.
template <class F>
Estimate gk21(F& f, double lo, double hi) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
    using G = boost::math::quadrature::gauss<double, 10>;
    const auto& x = GK::abscissa();
    const auto& wk = GK::weights();
    const auto& wg = G::weights();
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);

    // x[0] = 0 is a Kronrod-only node for an even Gauss order; odd indices
    // are the Gauss nodes.
    const double f0 = f(mid);
    double k = wk[0] * f0;
    double g = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double fs = f(mid - half * x[i]) + f(mid + half * x[i]);
        k += wk[i] * fs;
        if (i % 2 == 1) g += wg[i / 2] * fs;
    }
    return {k * half, std::abs((k - g) * half)};
}

template <class F>
double adapt(F& f, double lo, double hi, const Estimate& whole, double tol, int depth) {
    if (whole.error <= tol || depth >= kMaxDepth) return whole.kronrod;
    const double mid = 0.5 * (lo + hi);
    const Estimate left = gk21(f, lo, mid);
    const Estimate right = gk21(f, mid, hi);
    return adapt(f, lo, mid, left, 0.5 * tol, depth + 1) + adapt(f, mid, hi, right, 0.5 * tol, depth + 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (21/10) on [lo, hi] with absolute tolerance
/// kTolerance. Re-entrant, so nested calls build iterated integrals.
template <class F>
double integrate(F&& f, double lo, double hi) {
    if (!(hi > lo)) return 0.0;
    const auto whole = detail::gk21(f, lo, hi);
    return detail::adapt(f, lo, hi, whole, kTolerance, 0);
}

}  // namespace heston_clse::quadrature
