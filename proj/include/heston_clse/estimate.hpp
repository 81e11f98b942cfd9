#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "model.hpp"
#include "simulate.hpp"

namespace heston_clse {

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Determinant guard: n * sum Y^2 - (sum Y)^2 must exceed this fraction of n * sum Y^2.
inline constexpr double kGramTolerance = 1e-13;

/// Sufficient statistics of the two stacked regressions.
struct RegressionSums {
    double n = 0.0;
    double sum_prev = 0.0;       // sum Y_{i-1}
    double sum_prev_sq = 0.0;    // sum Y_{i-1}^2
    double sum_next = 0.0;       // sum Y_i
    double sum_cross = 0.0;      // sum Y_i Y_{i-1}
    double x_total = 0.0;        // X_n - X_0
    double sum_dx_prev = 0.0;    // sum (X_i - X_{i-1}) Y_{i-1}

    Matrix2 gram() const {
        Matrix2 g;
        g << n, sum_prev, sum_prev, sum_prev_sq;
        return g;
    }
};

inline RegressionSums regression_sums(const ObservationSeries& obs) {
    obs.validate();
    const std::size_t n = obs.n();
    CompensatedSum s1, s2, sy, syy, sdx;
    for (std::size_t i = 1; i <= n; ++i) {
        const double prev = obs.y[i - 1];
        s1.add(prev);
        s2.add(prev * prev);
        sy.add(obs.y[i]);
        syy.add(obs.y[i] * prev);
        sdx.add((obs.x[i] - obs.x[i - 1]) * prev);
    }
    return {static_cast<double>(n), s1.value(), s2.value(), sy.value(), syy.value(),
            obs.x[n] - obs.x[0], sdx.value()};
}

/// Closed-form CLSE of (c, d, gamma, delta): (I_2 kron Gram^{-1}) applied to
/// (sum Y_i, sum Y_i Y_{i-1}, X_n - X_0, sum dX_i Y_{i-1}).
inline TransformedParams clse_transformed(const RegressionSums& s) {
    const double det = s.n * s.sum_prev_sq - s.sum_prev * s.sum_prev;
    if (!(det > kGramTolerance * s.n * s.sum_prev_sq))
        throw SingularGramError("clse: Gram matrix is singular (Y_0 = ... = Y_{n-1})");
    const double inv_det = 1.0 / det;
    auto solve = [&](double r0, double r1) {
        return Vector2{(s.sum_prev_sq * r0 - s.sum_prev * r1) * inv_det,
                       (s.n * r1 - s.sum_prev * r0) * inv_det};
    };
    const Vector2 cd = solve(s.sum_next, s.sum_cross);
    const Vector2 gd = solve(s.x_total, s.sum_dx_prev);
    return {cd[0], cd[1], gd[0], gd[1]};
}

inline TransformedParams clse_transformed(const ObservationSeries& obs) { return clse_transformed(regression_sums(obs)); }

struct ClseResult {
    TransformedParams transformed;
    /// Present iff c > 0 and 0 < d < 1; absent means the estimate is out of
    /// the image of g (reported, not projected).
    std::optional<DriftParams> original;
    std::size_t n = 0;
    Matrix2 gram = Matrix2::Zero();

    bool out_of_image() const { return !original.has_value(); }
};

inline ClseResult clse_original(const ObservationSeries& obs) {
    const RegressionSums sums = regression_sums(obs);
    ClseResult r;
    r.transformed = clse_transformed(sums);
    r.n = obs.n();
    r.gram = sums.gram();
    if (r.transformed.in_image()) r.original = inverse_transform(r.transformed);
    return r;
}

struct Residuals {
    std::vector<double> eps;  // Y_i - c - d Y_{i-1}
    std::vector<double> eta;  // X_i - X_{i-1} - gamma - delta Y_{i-1}
};

inline Residuals residuals(const ObservationSeries& obs, const TransformedParams& t) {
    if (obs.y.size() != obs.x.size() || obs.y.size() < 2)
        throw DomainError("residuals: inconsistent series lengths");
    Residuals r;
    const std::size_t n = obs.n();
    r.eps.resize(n);
    r.eta.resize(n);
    for (std::size_t i = 1; i <= n; ++i) {
        r.eps[i - 1] = obs.y[i] - t.c - t.d * obs.y[i - 1];
        r.eta[i - 1] = obs.x[i] - obs.x[i - 1] - t.gamma - t.delta * obs.y[i - 1];
    }
    return r;
}

/// The conditional least squares objective sum (eps_i^2 + eta_i^2).
inline double clse_objective(const ObservationSeries& obs, const TransformedParams& t) {
    const Residuals r = residuals(obs, t);
    CompensatedSum s;
    for (std::size_t i = 0; i < r.eps.size(); ++i) s.add(r.eps[i] * r.eps[i] + r.eta[i] * r.eta[i]);
    return s.value();
}

}  // namespace heston_clse
