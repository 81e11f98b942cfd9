#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "errors.hpp"
#include "linalg.hpp"

namespace heston_clse::stats {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double normal_quantile(double p) {
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

inline double chi_squared_cdf(double x, double dof) {
    if (x <= 0.0) return 0.0;
    return boost::math::cdf(boost::math::chi_squared_distribution<double>(dof), x);
}

inline double chi_squared_quantile(double p, double dof) {
    return boost::math::quantile(boost::math::chi_squared_distribution<double>(dof), p);
}

/// sup_x |F_n(x) - F(x)| for the empirical CDF of `sample`.
inline double ks_distance(std::span<const double> sample, const std::function<double(double)>& cdf) {
    std::vector<double> s(sample.begin(), sample.end());
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double f = cdf(s[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

/// Asymptotic Kolmogorov p-value with Stephens' small-sample correction.
inline double ks_pvalue(double distance, std::size_t n) {
    if (n == 0) return 1.0;
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * distance;
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

/// Eigenvalue floor used to flag a covariance as numerically singular.
inline constexpr double kEigenFloor = 1e-14;

/// cov^{-1/2} via the symmetric eigendecomposition. Throws
/// NearSingularCovariance if the smallest eigenvalue is below
/// kEigenFloor * trace.
inline Matrix4 inverse_sqrt(const Matrix4& cov) {
    const Matrix4 sym = symmetrize(cov);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(sym);
    const Eigen::Vector4d lambda = eig.eigenvalues();
    if (!(lambda.minCoeff() >= kEigenFloor * sym.trace()))
        throw NearSingularCovariance("covariance is near-singular (min eigenvalue below 1e-14 * trace)");
    const Eigen::Matrix4d v = eig.eigenvectors();
    return v * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
}

inline Matrix4 sqrt_psd(const Matrix4& cov) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(symmetrize(cov));
    const Eigen::Vector4d lambda = eig.eigenvalues().cwiseMax(0.0);
    const Eigen::Matrix4d v = eig.eigenvectors();
    return v * lambda.cwiseSqrt().asDiagonal() * v.transpose();
}

}  // namespace heston_clse::stats
