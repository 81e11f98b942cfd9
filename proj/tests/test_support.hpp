#pragma once

#include <random>

#include <heston_clse/heston_clse.hpp>

namespace heston_clse::test_support {

inline HestonParams reference_params() {
    return HestonParams(HestonValues{2.0, 0.5, 0.1, -1.0, 0.4, 0.3, -0.5, 1.0, 0.0});
}

// Broad random draw over the valid domain; b spans both sides of the
// series switch points.
inline HestonParams random_params(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, u(gen)); };
    HestonValues v;
    v.a = log_uniform(0.05, 5.0);
    v.b = log_uniform(0.01, 5.0);
    v.alpha = -3.0 + 6.0 * u(gen);
    v.beta = -3.0 + 6.0 * u(gen);
    v.sigma1 = log_uniform(0.05, 2.0);
    v.sigma2 = log_uniform(0.05, 2.0);
    v.rho = -0.95 + 1.9 * u(gen);
    v.y0 = log_uniform(0.1, 5.0);
    v.x0 = -1.0 + 2.0 * u(gen);
    return HestonParams(v);
}

// Dense least squares on the stacked regression [1, Y_{i-1}] -> (Y_i, dX_i).
inline TransformedParams qr_least_squares(const ObservationSeries& obs) {
    const Eigen::Index n = static_cast<Eigen::Index>(obs.n());
    Eigen::MatrixXd design(n, 2), rhs(n, 2);
    for (Eigen::Index i = 1; i <= n; ++i) {
        design(i - 1, 0) = 1.0;
        design(i - 1, 1) = obs.y[i - 1];
        rhs(i - 1, 0) = obs.y[i];
        rhs(i - 1, 1) = obs.x[i] - obs.x[i - 1];
    }
    const Eigen::MatrixXd sol = design.colPivHouseholderQr().solve(rhs);
    return {sol(0, 0), sol(1, 0), sol(0, 1), sol(1, 1)};
}

// Simulated series at a random parameter draw, or (odd k) white noise.
inline ObservationSeries random_series(std::mt19937_64& gen, std::size_t n, int k) {
    if (k % 2 == 0) {
        SimulationConfig cfg;
        cfg.substeps = 8;
        cfg.seed = gen();
        return simulate_path(random_params(gen), n, cfg);
    }
    std::uniform_real_distribution<double> u(0.0, 3.0);
    std::normal_distribution<double> z(0.0, 1.0);
    ObservationSeries s;
    s.y.resize(n + 1);
    s.x.resize(n + 1);
    s.x[0] = z(gen);
    for (std::size_t i = 0; i <= n; ++i) {
        s.y[i] = u(gen);
        if (i > 0) s.x[i] = s.x[i - 1] + z(gen);
    }
    return s;
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1.0);
}

}  // namespace heston_clse::test_support
