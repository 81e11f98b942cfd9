#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "errors.hpp"
#include "estimate.hpp"
#include "linalg.hpp"
#include "model.hpp"
#include "noise_kernels.hpp"
#include "quadrature.hpp"

namespace heston_clse {

/// E(Y_inf^k), k = 1, 2, 3, of the Gamma(2a/s1^2, 2b/s1^2) stationary law.
struct StationaryMoments {
    double m1 = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;
};

inline StationaryMoments stationary_moments(double a, double b, double sigma1) {
    if (!(a > 0.0) || !(b > 0.0) || !(sigma1 > 0.0))
        throw DomainError("stationary_moments: a, b, sigma1 must be positive");
    const double s2 = sigma1 * sigma1;
    return {a / b, (2.0 * a + s2) * a / (2.0 * b * b), (2.0 * a + s2) * (a + s2) * a / (2.0 * b * b * b)};
}

inline StationaryMoments stationary_moments(const HestonParams& p) {
    return stationary_moments(p.a(), p.b(), p.sigma1());
}

/// Coefficients of the conditional second moments of the innovations:
///   E(eps^2 | F)     = c1 Y + c2
///   E(eta^2 | F)     = c3 Y + c4
///   E(eps eta | F)   = c5 Y + c6
struct NoiseMoments {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0, c5 = 0.0, c6 = 0.0;

    std::array<double, 6> as_array() const { return {c1, c2, c3, c4, c5, c6}; }
    Matrix2 slope_matrix() const {
        Matrix2 m;
        m << c1, c5, c5, c3;
        return m;
    }
    Matrix2 intercept_matrix() const {
        Matrix2 m;
        m << c2, c6, c6, c4;
        return m;
    }
};

/// Closed forms for C1..C6.
inline NoiseMoments noise_moments(const HestonParams& p) {
    const auto k = detail::noise_kernels(p.b());
    const double a = p.a(), beta = p.beta(), s1 = p.sigma1(), s2 = p.sigma2(), rho = p.rho();
    const double bs1sq = beta * beta * s1 * s1;
    const double cross = beta * rho * s1 * s2;
    return {
        s1 * s1 * k.k1,
        a * s1 * s1 * k.k2,
        bs1sq * k.k3a + cross * k.k3b + s2 * s2 * k.k3c,
        a * (bs1sq * k.k4a + cross * k.k4b + s2 * s2 * k.k4c),
        beta * s1 * s1 * k.k5a + rho * s1 * s2 * std::exp(-p.b()),
        a * (beta * s1 * s1 * k.k6a + rho * s1 * s2 * k.k6b),
    };
}

/// Noise moments evaluated by nested adaptive quadrature of the iterated
/// integrals in their original form. `scale` holds, per constant, the sum of
/// absolute values of its additive terms (a natural size for comparisons when
/// the terms cancel).
struct QuadratureNoiseMoments {
    NoiseMoments value;
    std::array<double, 6> scale{};
};

inline QuadratureNoiseMoments noise_moments_quadrature(const HestonParams& p) {
    using quadrature::integrate;
    const double a = p.a(), b = p.b(), beta = p.beta(), s1 = p.sigma1(), s2 = p.sigma2(), rho = p.rho();
    auto ex = [b](double arg) { return std::exp(-b * arg); };

    // int_0^1 e^{-b(2-v)} dv
    const double i1 = integrate([&](double v) { return ex(2.0 - v); }, 0.0, 1.0);
    // int_0^1 int_0^u e^{-b(2-v-u)} dv du
    const double i2 = integrate(
        [&](double u) { return integrate([&](double v) { return ex(2.0 - v - u); }, 0.0, u); }, 0.0, 1.0);

    // int_0^1 int_0^1 int_0^{u^v} g(u, v, w) dw dv du, split at v = u.
    auto min_cube = [&](auto&& g) {
        return integrate(
            [&](double u) {
                auto inner = [&](double v) {
                    return integrate([&](double w) { return g(u, v, w); }, 0.0, std::min(u, v));
                };
                return integrate(inner, 0.0, u) + integrate(inner, u, 1.0);
            },
            0.0, 1.0);
    };
    const double i3a = min_cube([&](double u, double v, double w) { return ex(u + v - w); });
    const double i3b = integrate(
        [&](double u) { return integrate([&](double) { return ex(u); }, 0.0, u); }, 0.0, 1.0);
    const double i3c = integrate([&](double u) { return ex(u); }, 0.0, 1.0);

    const double i4a = min_cube([&](double u, double v, double w) {
        return integrate([&](double z) { return ex(u + v - w - z); }, 0.0, w);
    });
    const double i4b = integrate(
        [&](double u) { return integrate([&](double v) { return ex(u - v); }, 0.0, u); }, 0.0, 1.0);
    const double i4c = integrate(
        [&](double u) {
            return integrate(
                [&](double v) { return integrate([&](double w) { return ex(u - w); }, 0.0, v); }, 0.0, u);
        },
        0.0, 1.0);

    const double i5 = integrate(
        [&](double u) { return integrate([&](double v) { return ex(u - v + 1.0); }, 0.0, u); }, 0.0, 1.0);

    const double i6a = integrate(
        [&](double u) {
            return integrate(
                [&](double v) { return integrate([&](double s) { return ex(u - v - s + 1.0); }, 0.0, v); },
                0.0, u);
        },
        0.0, 1.0);
    const double i6b = integrate(
        [&](double v) { return integrate([&](double s) { return ex(1.0 - s); }, 0.0, v); }, 0.0, 1.0);

    QuadratureNoiseMoments out;
    const double t1 = s1 * s1 * i1;
    const double t2 = s1 * s1 * a * i2;
    const double t3[3] = {beta * beta * s1 * s1 * i3a, -2.0 * beta * s1 * s2 * rho * i3b, s2 * s2 * i3c};
    const double t4[3] = {a * beta * beta * s1 * s1 * i4a, a * s2 * s2 * i4b, -2.0 * a * beta * s1 * s2 * rho * i4c};
    const double t5[2] = {-beta * s1 * s1 * i5, s1 * s2 * rho * std::exp(-b)};
    const double t6[2] = {-a * beta * s1 * s1 * i6a, a * s1 * s2 * rho * i6b};
    out.value = {t1, t2, t3[0] + t3[1] + t3[2], t4[0] + t4[1] + t4[2], t5[0] + t5[1], t6[0] + t6[1]};
    out.scale = {std::abs(t1),
                 std::abs(t2),
                 std::abs(t3[0]) + std::abs(t3[1]) + std::abs(t3[2]),
                 std::abs(t4[0]) + std::abs(t4[1]) + std::abs(t4[2]),
                 std::abs(t5[0]) + std::abs(t5[1]),
                 std::abs(t6[0]) + std::abs(t6[1])};
    return out;
}

/// The two 2x2 moment matrices of the closed-form limit covariance
/// (inverse-moment sandwiches of the stationary law).
inline Matrix2 slope_moment_matrix(double a, double b, double sigma1) {
    const double s2 = sigma1 * sigma1;
    Matrix2 m;
    m << a * (2.0 * a + s2) / (b * s2), -(2.0 * a + s2) / s2,
         -(2.0 * a + s2) / s2, 2.0 * b * (a + s2) / (a * s2);
    return m;
}

inline Matrix2 intercept_moment_matrix(double a, double b, double sigma1) {
    const double s2 = sigma1 * sigma1;
    Matrix2 m;
    m << (2.0 * a + s2) / s2, -2.0 * b / s2,
         -2.0 * b / s2, 2.0 * b * b / (a * s2);
    return m;
}

/// A = [[1, m1], [m1, m2]].
inline Matrix2 design_moment_matrix(const StationaryMoments& m) {
    Matrix2 a;
    a << 1.0, m.m1, m.m1, m.m2;
    return a;
}

struct AsymptoticCovariance {
    StationaryMoments moments;
    NoiseMoments noise;
    Matrix4 d_mat = Matrix4::Zero();     // martingale CLT limit
    Matrix4 e_mat = Matrix4::Zero();     // limit covariance of sqrt(n)(transformed - truth)
    Matrix4 j_mat = Matrix4::Zero();     // Jacobian of g^{-1}
    Matrix4 sandwich = Matrix4::Zero();  // J E J^T
    /// max |(I kron A)^{-1} D (I kron A)^{-1} - E|, relative to max |E|
    double identity_residual = 0.0;
};

/// Fills moments, noise, d_mat and e_mat.
inline AsymptoticCovariance covariance_e(const HestonParams& p) {
    AsymptoticCovariance out;
    out.moments = stationary_moments(p);
    out.noise = noise_moments(p);
    const auto& m = out.moments;
    const Matrix2 slope = out.noise.slope_matrix();
    const Matrix2 intercept = out.noise.intercept_matrix();

    out.e_mat = symmetrize(kron(slope, slope_moment_matrix(p.a(), p.b(), p.sigma1())) +
                           kron(intercept, intercept_moment_matrix(p.a(), p.b(), p.sigma1())));

    Matrix2 cubic;
    cubic << m.m1, m.m2, m.m2, m.m3;
    const Matrix2 design = design_moment_matrix(m);
    out.d_mat = symmetrize(kron(slope, cubic) + kron(intercept, design));

    const Matrix4 inv = kron(Matrix2::Identity(), design.inverse());
    const Matrix4 via_d = inv * out.d_mat * inv;
    out.identity_residual = (via_d - out.e_mat).cwiseAbs().maxCoeff() / out.e_mat.cwiseAbs().maxCoeff();
    return out;
}

/// All fields, including the delta-method covariance J E J^T of the drift
/// estimator.
inline AsymptoticCovariance covariance_original(const HestonParams& p) {
    AsymptoticCovariance out = covariance_e(p);
    out.j_mat = delta_jacobian(forward_transform(p));
    out.sandwich = symmetrize(out.j_mat * out.e_mat * out.j_mat.transpose());
    return out;
}

/// Known volatility structure used for plug-in intervals.
struct VolatilityParams {
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    double rho = 0.0;
};

struct Interval {
    double estimate = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double half_width = 0.0;

    bool contains(double v) const { return lower <= v && v <= upper; }
};

/// Intervals for (a, b, alpha, beta) in that order.
using ParameterIntervals = std::array<Interval, 4>;

inline double normal_quantile_two_sided(double level) {
    if (!(level >= 0.0 && level < 1.0)) throw DomainError("confidence level must lie in [0, 1)");
    if (level == 0.0) return 0.0;
    return boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 * (1.0 + level));
}

/// theta_k +- z sqrt(cov[k][k] / n) around the drift estimate.
inline ParameterIntervals intervals_from_covariance(const DriftParams& est, const Matrix4& cov, std::size_t n,
                                                    double level) {
    const double z = normal_quantile_two_sided(level);
    const Vector4 theta = est.as_vector();
    ParameterIntervals out;
    for (int k = 0; k < 4; ++k) {
        const double hw = z * std::sqrt(std::max(cov(k, k), 0.0) / static_cast<double>(n));
        out[k] = {theta[k], theta[k] - hw, theta[k] + hw, hw};
    }
    return out;
}

/// Plug-in intervals: the covariance is evaluated at the estimated drift with
/// the supplied (known) volatility parameters.
inline ParameterIntervals confidence_intervals(const ClseResult& est, const VolatilityParams& vol, double level) {
    if (!est.original) throw MissingOriginal("confidence_intervals: estimate is outside the image of g");
    const DriftParams& d = *est.original;
    const HestonParams plug_in(HestonValues{d.a, d.b, d.alpha, d.beta, vol.sigma1, vol.sigma2, vol.rho, 1.0, 0.0});
    return intervals_from_covariance(d, covariance_original(plug_in).sandwich, est.n, level);
}

/// Intervals with the covariance evaluated at given (e.g. true) parameters.
inline ParameterIntervals confidence_intervals(const ClseResult& est, const HestonParams& p, double level) {
    if (!est.original) throw MissingOriginal("confidence_intervals: estimate is outside the image of g");
    return intervals_from_covariance(*est.original, covariance_original(p).sandwich, est.n, level);
}

}  // namespace heston_clse
