// Simulate one path, estimate, and print plug-in 95% intervals next to the truth.

#include <cstdio>

#include <heston_clse/heston_clse.hpp>

using namespace heston_clse;

int main() {
    const HestonParams truth(HestonValues{.a = 2.0, .b = 0.5, .alpha = 0.1, .beta = -1.0,
                                          .sigma1 = 0.4, .sigma2 = 0.3, .rho = -0.5, .y0 = 1.0, .x0 = 0.0});
    SimulationConfig sim;
    sim.seed = 42;
    const ObservationSeries obs = simulate_path(truth, 20000, sim);

    const ClseResult est = clse_original(obs);
    std::printf("c=%.6f d=%.6f gamma=%.6f delta=%.6f\n", est.transformed.c, est.transformed.d,
                est.transformed.gamma, est.transformed.delta);
    if (!est.original) {
        std::printf("estimate left the subcritical image; no (a,b,alpha,beta)\n");
        return 0;
    }
    const auto ci = confidence_intervals(est, VolatilityParams{0.4, 0.3, -0.5}, 0.95);
    const char* names[] = {"a", "b", "alpha", "beta"};
    const Vector4 theta = truth.drift().as_vector();
    for (int k = 0; k < 4; ++k)
        std::printf("%-5s true=%8.4f est=%8.4f  [%8.4f, %8.4f]\n", names[k], theta[k], ci[k].estimate, ci[k].lower,
                    ci[k].upper);
    return 0;
}
