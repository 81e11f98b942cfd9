#pragma once

#include <cmath>
#include <string>

#include "errors.hpp"
#include "linalg.hpp"

namespace heston_clse {

/// Raw field values of the subcritical Heston model
///   dY = (a - b Y) dt + sigma1 sqrt(Y) dW
///   dX = (alpha - beta Y) dt + sigma2 sqrt(Y) (rho dW + sqrt(1 - rho^2) dB)
/// started at (y0, x0).
struct HestonValues {
    double a = 1.0;
    double b = 1.0;
    double alpha = 0.0;
    double beta = 0.0;
    double sigma1 = 1.0;
    double sigma2 = 1.0;
    double rho = 0.0;
    double y0 = 1.0;
    double x0 = 0.0;
};

/// Drift parameters (a, b, alpha, beta), the part the estimator targets.
struct DriftParams {
    double a = 0.0;
    double b = 0.0;
    double alpha = 0.0;
    double beta = 0.0;

    Vector4 as_vector() const { return {a, b, alpha, beta}; }
};

/// Validated model parameters. Construction rejects anything outside the
/// subcritical regime; every other operation assumes validity.
class HestonParams {
public:
    explicit HestonParams(const HestonValues& v) : v_(v) {
        auto fail = [](const std::string& what) { throw DomainError("HestonParams: " + what); };
        if (!(v.a > 0.0)) fail("a must be positive");
        if (!(v.b > 0.0)) fail("b must be positive (subcritical regime)");
        if (!std::isfinite(v.alpha)) fail("alpha must be finite");
        if (!std::isfinite(v.beta)) fail("beta must be finite");
        if (!(v.sigma1 > 0.0)) fail("sigma1 must be positive");
        if (!(v.sigma2 > 0.0)) fail("sigma2 must be positive");
        if (!(v.rho > -1.0 && v.rho < 1.0)) fail("rho must lie in (-1, 1)");
        if (!(v.y0 > 0.0)) fail("y0 must be positive");
        if (!std::isfinite(v.x0)) fail("x0 must be finite");
        if (!std::isfinite(v.a) || !std::isfinite(v.b) || !std::isfinite(v.sigma1) ||
            !std::isfinite(v.sigma2) || !std::isfinite(v.y0))
            fail("parameters must be finite");
    }

    double a() const { return v_.a; }
    double b() const { return v_.b; }
    double alpha() const { return v_.alpha; }
    double beta() const { return v_.beta; }
    double sigma1() const { return v_.sigma1; }
    double sigma2() const { return v_.sigma2; }
    double rho() const { return v_.rho; }
    double y0() const { return v_.y0; }
    double x0() const { return v_.x0; }

    const HestonValues& values() const { return v_; }
    DriftParams drift() const { return {v_.a, v_.b, v_.alpha, v_.beta}; }

    /// Same volatility structure and start, different drift.
    HestonParams with_drift(const DriftParams& d) const {
        HestonValues v = v_;
        v.a = d.a;
        v.b = d.b;
        v.alpha = d.alpha;
        v.beta = d.beta;
        return HestonParams(v);
    }

private:
    HestonValues v_;
};

/// (c, d, gamma, delta). Estimates may take any real values; only those in
/// R_{++} x (0,1) x R^2 map back to drift parameters.
struct TransformedParams {
    double c = 0.0;
    double d = 0.0;
    double gamma = 0.0;
    double delta = 0.0;

    Vector4 as_vector() const { return {c, d, gamma, delta}; }
    static TransformedParams from_vector(const Vector4& v) { return {v[0], v[1], v[2], v[3]}; }

    bool in_image() const { return c > 0.0 && d > 0.0 && d < 1.0; }
};

namespace detail {

// Below this distance from d = 1 the ratio helpers switch to their power
// series in t = 1 - d.
inline constexpr double kSeriesCutoff = 0.1;
inline constexpr int kSeriesTerms = 24;

// log(d) / (1 - d)
inline double log_ratio(double d) {
    const double t = 1.0 - d;
    if (t < kSeriesCutoff) {
        // -(1 + t/2 + t^2/3 + ...)
        double sum = 0.0, tk = 1.0;
        for (int k = 0; k < kSeriesTerms; ++k, tk *= t) sum += tk / (k + 1);
        return -sum;
    }
    return std::log(d) / t;
}

// (d - 1 - log d) / (1 - d)^2
inline double h_ratio(double d) {
    const double t = 1.0 - d;
    if (t < kSeriesCutoff) {
        double sum = 0.0, tk = 1.0;
        for (int k = 2; k < kSeriesTerms + 2; ++k, tk *= t) sum += tk / k;
        return sum;
    }
    return (d - 1.0 - std::log(d)) / (t * t);
}

// (log d - 1 + 1/d) / (1 - d)^2
inline double k_ratio(double d) {
    const double t = 1.0 - d;
    if (t < kSeriesCutoff) {
        double sum = 0.0, tk = 1.0;
        for (int k = 2; k < kSeriesTerms + 2; ++k, tk *= t) sum += (1.0 - 1.0 / k) * tk;
        return sum;
    }
    return (std::log(d) - 1.0 + 1.0 / d) / (t * t);
}

// (2 log d - d + 1/d) / (1 - d)^3
inline double p_ratio(double d) {
    const double t = 1.0 - d;
    if (t < kSeriesCutoff) {
        double sum = 0.0, tk = 1.0;
        for (int k = 3; k < kSeriesTerms + 3; ++k, tk *= t) sum += (1.0 - 2.0 / k) * tk;
        return sum;
    }
    return (2.0 * std::log(d) - d + 1.0 / d) / (t * t * t);
}

// (e^{-b} - 1 + b) / b^2 = sum_k (-b)^k / (k+2)!; the closed form loses about
// log10(2/b) digits to cancellation, so small b goes through the series.
inline double drift_ratio(double b) {
    if (b < 1.0) {
        double sum = 0.0, term = 0.5;
        for (int k = 0; k < kSeriesTerms; ++k) {
            sum += term;
            term *= -b / (k + 3);
        }
        return sum;
    }
    return (b + std::expm1(-b)) / (b * b);
}

inline void require_image(const TransformedParams& t, const char* who) {
    if (!(t.c > 0.0) || !(t.d > 0.0 && t.d < 1.0))
        throw DomainError(std::string(who) +
                          ": (c, d) outside R_{++} x (0,1); the estimate left the subcritical image");
}

}  // namespace detail

/// g(a, b, alpha, beta) = (c, d, gamma, delta).
inline TransformedParams forward_transform(const DriftParams& p) {
    const double one_minus_d = -std::expm1(-p.b);
    return {
        p.a / p.b * one_minus_d,
        std::exp(-p.b),
        p.alpha - p.a * p.beta * detail::drift_ratio(p.b),
        -p.beta / p.b * one_minus_d,
    };
}

inline TransformedParams forward_transform(const HestonParams& p) { return forward_transform(p.drift()); }

/// g^{-1}(c, d, gamma, delta) = (a, b, alpha, beta). Throws DomainError
/// unless c > 0 and 0 < d < 1.
inline DriftParams inverse_transform(const TransformedParams& t) {
    detail::require_image(t, "inverse_transform");
    const double lr = detail::log_ratio(t.d);
    return {
        -t.c * lr,
        -std::log(t.d),
        t.gamma - t.c * t.delta * detail::h_ratio(t.d),
        t.delta * lr,
    };
}

/// Jacobian of g^{-1} at t: rows (a, b, alpha, beta), columns (c, d, gamma, delta).
inline Matrix4 delta_jacobian(const TransformedParams& t) {
    detail::require_image(t, "delta_jacobian");
    const double c = t.c, d = t.d, delta = t.delta;
    const double lr = detail::log_ratio(d);
    const double h = detail::h_ratio(d);
    const double k = detail::k_ratio(d);
    const double p = detail::p_ratio(d);
    Matrix4 j;
    j << -lr, -c * k, 0.0, 0.0,
         0.0, -1.0 / d, 0.0, 0.0,
         -delta * h, c * delta * p, 1.0, -c * h,
         0.0, delta * k, 0.0, lr;
    return j;
}

}  // namespace heston_clse
