#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace heston_clse;

namespace {

ObservationSeries series(std::vector<double> y, std::vector<double> x) { return {std::move(y), std::move(x)}; }

// Noise-free data from known (c, d, gamma, delta).
ObservationSeries noiseless(const TransformedParams& t, double y0, std::size_t n) {
    ObservationSeries s;
    s.y = {y0};
    s.x = {0.25};
    for (std::size_t i = 1; i <= n; ++i) {
        s.y.push_back(t.c + t.d * s.y.back());
        s.x.push_back(s.x.back() + t.gamma + t.delta * s.y[i - 1]);
    }
    return s;
}

}  // namespace

TEST(Clse, HandSolvedExample) {
    const auto t = clse_transformed(series({1, 2, 3}, {0, 1, 3}));
    EXPECT_NEAR(t.c, 1.0, 1e-14);
    EXPECT_NEAR(t.d, 1.0, 1e-14);
    EXPECT_NEAR(t.gamma, 0.0, 1e-14);
    EXPECT_NEAR(t.delta, 1.0, 1e-14);
    // d = 1 is on the boundary of the image: original layer absent
    const auto r = clse_original(series({1, 2, 3}, {0, 1, 3}));
    EXPECT_TRUE(r.out_of_image());
    EXPECT_EQ(r.n, 2u);
}

TEST(Clse, ConstantRegressorIsSingular) {
    EXPECT_THROW(clse_transformed(series({5, 5, 5}, {0, 1, 2})), SingularGramError);
    EXPECT_THROW(clse_original(series({5, 5, 5, 7}, {0, 4, -1, 3})), SingularGramError);
}

TEST(Clse, NoiselessRecovery) {
    const TransformedParams truth{0.8, 0.6, 0.1, -0.7};
    const auto t = clse_transformed(noiseless(truth, 3.0, 50));
    EXPECT_NEAR(t.c, truth.c, 1e-12);
    EXPECT_NEAR(t.d, truth.d, 1e-12);
    EXPECT_NEAR(t.gamma, truth.gamma, 1e-12);
    EXPECT_NEAR(t.delta, truth.delta, 1e-12);
    const auto r = residuals(noiseless(truth, 3.0, 50), truth);
    for (std::size_t i = 0; i < r.eps.size(); ++i) {
        EXPECT_NEAR(r.eps[i], 0.0, 1e-14);
        EXPECT_NEAR(r.eta[i], 0.0, 1e-14);
    }
}

TEST(Clse, GramMatrix) {
    const auto r = clse_original(series({1, 2, 4, 3}, {0, 1, 0, 2}));
    EXPECT_EQ(r.gram(0, 0), 3.0);
    EXPECT_EQ(r.gram(0, 1), 7.0);
    EXPECT_EQ(r.gram(1, 0), 7.0);
    EXPECT_EQ(r.gram(1, 1), 21.0);
}

TEST(Clse, OrthogonalityAtFit) {
    std::mt19937_64 gen(31);
    for (int k = 0; k < 20; ++k) {
        const auto obs = test_support::random_series(gen, 400, k);
        const auto t = clse_transformed(obs);
        const auto r = residuals(obs, t);
        double s_eps = 0, s_eps_y = 0, s_eta = 0, s_eta_y = 0, scale = 0;
        for (std::size_t i = 0; i < r.eps.size(); ++i) {
            s_eps += r.eps[i];
            s_eps_y += obs.y[i] * r.eps[i];
            s_eta += r.eta[i];
            s_eta_y += obs.y[i] * r.eta[i];
            scale = std::max({scale, std::abs(obs.y[i + 1]), std::abs(obs.x[i + 1] - obs.x[i])});
        }
        const double tol = 1e-8 * obs.n() * scale * scale;
        EXPECT_LE(std::abs(s_eps), tol);
        EXPECT_LE(std::abs(s_eps_y), tol);
        EXPECT_LE(std::abs(s_eta), tol);
        EXPECT_LE(std::abs(s_eta_y), tol);
    }
}

TEST(Clse, ShiftingCLowersResidualSumByN) {
    std::mt19937_64 gen(2);
    const auto obs = test_support::random_series(gen, 300, 0);
    auto t = clse_transformed(obs);
    const auto before = residuals(obs, t);
    t.c += 1.0;
    const auto after = residuals(obs, t);
    double sb = 0, sa = 0;
    for (double e : before.eps) sb += e;
    for (double e : after.eps) sa += e;
    EXPECT_NEAR(sa - sb, -300.0, 1e-9);
}

TEST(Clse, MinimizesObjective) {
    std::mt19937_64 gen(8);
    std::normal_distribution<double> z(0.0, 1.0);
    const auto obs = test_support::random_series(gen, 500, 0);
    const auto fit = clse_transformed(obs);
    const double best = clse_objective(obs, fit);
    for (int k = 0; k < 100; ++k) {
        const double scale = std::pow(10.0, -1.0 - 4.0 * k / 100.0);
        TransformedParams t = fit;
        t.c += scale * z(gen);
        t.d += scale * z(gen);
        t.gamma += scale * z(gen);
        t.delta += scale * z(gen);
        EXPECT_LE(best, clse_objective(obs, t));
    }
}

TEST(Clse, MatchesDenseQr) {
    std::mt19937_64 gen(77);
    std::uniform_int_distribution<std::size_t> len(5, 1000);
    for (int k = 0; k < 50; ++k) {
        const auto obs = test_support::random_series(gen, len(gen), k);
        const auto a = clse_transformed(obs).as_vector();
        const auto b = test_support::qr_least_squares(obs).as_vector();
        for (int i = 0; i < 4; ++i) EXPECT_LE(std::abs(a[i] - b[i]), 1e-10 * std::max(1.0, std::abs(b[i])));
    }
}

TEST(Clse, InvariantUnderXShift) {
    std::mt19937_64 gen(4);
    auto obs = test_support::random_series(gen, 200, 0);
    const auto before = clse_transformed(obs);
    for (double& x : obs.x) x += 17.25;
    const auto after = clse_transformed(obs);
    EXPECT_NEAR(after.c, before.c, 1e-14);
    EXPECT_NEAR(after.d, before.d, 1e-14);
    EXPECT_NEAR(after.gamma, before.gamma, 1e-10);
    EXPECT_NEAR(after.delta, before.delta, 1e-10);
}

TEST(Clse, OriginalLayerRoundTrip) {
    std::mt19937_64 gen(12);
    int seen = 0;
    for (int k = 0; k < 20; ++k) {
        const auto r = clse_original(test_support::random_series(gen, 2000, 0));
        if (!r.original) continue;
        ++seen;
        const auto fwd = forward_transform(*r.original);
        EXPECT_NEAR(fwd.c, r.transformed.c, 1e-10 * std::max(1.0, std::abs(r.transformed.c)));
        EXPECT_NEAR(fwd.d, r.transformed.d, 1e-10);
        EXPECT_NEAR(fwd.gamma, r.transformed.gamma, 1e-10 * std::max(1.0, std::abs(r.transformed.gamma)));
        EXPECT_NEAR(fwd.delta, r.transformed.delta, 1e-10 * std::max(1.0, std::abs(r.transformed.delta)));
    }
    EXPECT_GT(seen, 10);
}

TEST(Clse, OutOfImageIsValueNotError) {
    // y grows geometrically: d-hat = 1.02
    std::vector<double> y{1.0}, x{0.0};
    for (int i = 0; i < 20; ++i) {
        y.push_back(1.02 * y.back());
        x.push_back(x.back() + 0.1);
    }
    const auto r = clse_original(series(y, x));
    EXPECT_NEAR(r.transformed.d, 1.02, 1e-10);
    EXPECT_FALSE(r.original.has_value());
    EXPECT_TRUE(r.out_of_image());
}

TEST(Clse, ConsistentOnLongReferencePath) {
    const auto p = test_support::reference_params();
    SimulationConfig cfg;
    cfg.seed = 2024;
    const auto r = clse_original(simulate_path(p, 100000, cfg));
    ASSERT_TRUE(r.original.has_value());
    EXPECT_LT(std::abs(r.original->a - p.a()) / p.a(), 0.10);
    EXPECT_LT(std::abs(r.original->b - p.b()) / p.b(), 0.10);
}

TEST(CompensatedSum, RecoversSmallTerms) {
    CompensatedSum s;
    s.add(1.0);
    for (int i = 0; i < 1000000; ++i) s.add(1e-16);
    EXPECT_NEAR(s.value() - 1.0, 1e-10, 1e-14);
}
