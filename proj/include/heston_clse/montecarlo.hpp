#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "asymptotics.hpp"
#include "errors.hpp"
#include "estimate.hpp"
#include "linalg.hpp"
#include "model.hpp"
#include "rng.hpp"
#include "simulate.hpp"
#include "stats.hpp"

namespace heston_clse {

struct ExperimentConfig {
    HestonParams params{HestonValues{}};
    std::vector<std::size_t> n_grid;
    std::size_t replicates = 1;
    std::uint64_t seed = 0;
    double level = 0.95;
    SimulationConfig sim;

    void validate() const {
        if (replicates < 1) throw ConfigError("ExperimentConfig: replicates must be >= 1");
        if (n_grid.empty()) throw ConfigError("ExperimentConfig: n_grid must not be empty");
        for (std::size_t i = 0; i < n_grid.size(); ++i) {
            if (n_grid[i] < 2) throw ConfigError("ExperimentConfig: every n must be >= 2");
            if (i > 0 && n_grid[i] <= n_grid[i - 1])
                throw ConfigError("ExperimentConfig: n_grid must be strictly increasing");
        }
        if (!(level > 0.0 && level < 1.0)) throw ConfigError("ExperimentConfig: level must lie in (0, 1)");
        if (sim.substeps < 1) throw ConfigError("SimulationConfig: substeps must be >= 1");
    }
};

/// Generator seed of replicate `replicate` at sample size `n`.
inline std::uint64_t replicate_seed(std::uint64_t seed, std::size_t n, std::size_t replicate) {
    return derive_seed(seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(replicate)});
}

enum class ReplicateStatus { Ok, OutOfImage, Failed };

inline const char* to_string(ReplicateStatus s) {
    switch (s) {
        case ReplicateStatus::Ok: return "ok";
        case ReplicateStatus::OutOfImage: return "out_of_image";
        case ReplicateStatus::Failed: return "failed";
    }
    return "failed";
}

struct ReplicateRecord {
    std::size_t n = 0;
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
    ReplicateStatus status = ReplicateStatus::Failed;
    std::string error;
    TransformedParams transformed;
    std::optional<DriftParams> original;
    std::array<bool, 4> covered{};  // plug-in interval contains the truth
};

struct NormalityStats {
    std::array<double, 4> mean{};
    std::array<double, 4> variance{};
    std::array<double, 4> ks_distance{};
    std::array<double, 4> ks_pvalue{};
    double mahalanobis_ks_distance = 0.0;
    double mahalanobis_ks_pvalue = 1.0;
    /// Per-replicate whitened errors, in replicate order (for Q-Q output).
    std::vector<Vector4> whitened;
};

struct LayerStats {
    Vector4 truth = Vector4::Zero();
    Vector4 bias = Vector4::Zero();
    Vector4 rmse = Vector4::Zero();
    Matrix4 empirical_cov = Matrix4::Zero();    // of sqrt(n)(estimate - truth)
    Matrix4 theoretical_cov = Matrix4::Zero();  // E or J E J^T at the truth
    std::optional<NormalityStats> normality;    // absent when whitening is impossible
};

struct SampleSizeReport {
    std::size_t n = 0;
    std::size_t replicates = 0;
    std::size_t used = 0;
    std::size_t out_of_image = 0;
    std::size_t failed = 0;
    LayerStats transformed;
    LayerStats original;
    std::array<double, 4> coverage{};  // fraction of used replicates whose interval covers the truth
};

struct ExperimentReport {
    double level = 0.95;
    std::uint64_t seed = 0;
    std::vector<SampleSizeReport> per_n;
    std::vector<ReplicateRecord> raw;
};

/// cov^{-1/2} e for every error vector.
inline std::vector<Vector4> whiten_errors(std::span<const Vector4> errors, const Matrix4& cov) {
    const Matrix4 w = stats::inverse_sqrt(cov);
    std::vector<Vector4> out;
    out.reserve(errors.size());
    for (const auto& e : errors) out.emplace_back(w * e);
    return out;
}

namespace detail {

inline ReplicateRecord run_replicate(const ExperimentConfig& cfg, const VolatilityParams& vol,
                                     const Vector4& truth, std::size_t n, std::size_t replicate) {
    ReplicateRecord rec;
    rec.n = n;
    rec.replicate = replicate;
    rec.seed = replicate_seed(cfg.seed, n, replicate);
    try {
        SimulationConfig sim = cfg.sim;
        sim.seed = rec.seed;
        const ObservationSeries obs = simulate_path(cfg.params, n, sim);
        const ClseResult est = clse_original(obs);
        rec.transformed = est.transformed;
        rec.original = est.original;
        if (!est.original) {
            rec.status = ReplicateStatus::OutOfImage;
            return rec;
        }
        const ParameterIntervals ci = confidence_intervals(est, vol, cfg.level);
        for (int k = 0; k < 4; ++k) rec.covered[k] = ci[k].contains(truth[k]);
        rec.status = ReplicateStatus::Ok;
    } catch (const std::exception& e) {
        rec.status = ReplicateStatus::Failed;
        rec.error = e.what();
    }
    return rec;
}

inline LayerStats layer_stats(const std::vector<Vector4>& estimates, const Vector4& truth, const Matrix4& theory,
                              std::size_t n) {
    LayerStats out;
    out.truth = truth;
    out.theoretical_cov = theory;
    const std::size_t m = estimates.size();
    if (m == 0) return out;
    const double sn = std::sqrt(static_cast<double>(n));

    std::vector<Vector4> scaled;
    scaled.reserve(m);
    for (const auto& e : estimates) scaled.emplace_back(sn * (e - truth));

    // Compensated sums in replicate order keep the result independent of
    // execution order.
    std::array<CompensatedSum, 4> sum_err, sum_sq;
    std::array<std::array<CompensatedSum, 4>, 4> sum_outer;
    for (std::size_t r = 0; r < m; ++r) {
        const Vector4 err = estimates[r] - truth;
        for (int i = 0; i < 4; ++i) {
            sum_err[i].add(err[i]);
            sum_sq[i].add(err[i] * err[i]);
            for (int j = 0; j < 4; ++j) sum_outer[i][j].add(scaled[r][i] * scaled[r][j]);
        }
    }
    for (int i = 0; i < 4; ++i) {
        out.bias[i] = sum_err[i].value() / m;
        out.rmse[i] = std::sqrt(sum_sq[i].value() / m);
        for (int j = 0; j < 4; ++j) out.empirical_cov(i, j) = sum_outer[i][j].value() / m;
    }

    std::vector<Vector4> white;
    try {
        white = whiten_errors(scaled, theory);
    } catch (const NearSingularCovariance&) {
        return out;
    }
    NormalityStats ns;
    std::vector<double> comp(m), maha(m);
    for (int k = 0; k < 4; ++k) {
        CompensatedSum s, s2;
        for (std::size_t r = 0; r < m; ++r) {
            comp[r] = white[r][k];
            s.add(comp[r]);
        }
        const double mean = s.value() / m;
        for (std::size_t r = 0; r < m; ++r) s2.add((comp[r] - mean) * (comp[r] - mean));
        ns.mean[k] = mean;
        ns.variance[k] = m > 1 ? s2.value() / (m - 1) : 0.0;
        ns.ks_distance[k] = stats::ks_distance(comp, stats::normal_cdf);
        ns.ks_pvalue[k] = stats::ks_pvalue(ns.ks_distance[k], m);
    }
    for (std::size_t r = 0; r < m; ++r) maha[r] = white[r].squaredNorm();
    ns.mahalanobis_ks_distance = stats::ks_distance(maha, [](double x) { return stats::chi_squared_cdf(x, 4.0); });
    ns.mahalanobis_ks_pvalue = stats::ks_pvalue(ns.mahalanobis_ks_distance, m);
    ns.whitened = std::move(white);
    out.normality = std::move(ns);
    return out;
}

}  // namespace detail

/// Worker count: explicit value if > 0, else HESTON_CLSE_THREADS, else the
/// hardware concurrency.
inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("HESTON_CLSE_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs `replicates` independent simulate + estimate pipelines per sample
/// size. Work items run on `threads` workers in any order; results are stored
/// by index and aggregated sequentially, so the report depends only on cfg.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg, unsigned threads = 0) {
    cfg.validate();
    const HestonParams& p = cfg.params;
    const VolatilityParams vol{p.sigma1(), p.sigma2(), p.rho()};
    const Vector4 truth_orig = p.drift().as_vector();
    const Vector4 truth_tr = forward_transform(p).as_vector();
    const AsymptoticCovariance theory = covariance_original(p);

    const std::size_t per_n = cfg.replicates;
    const std::size_t total = per_n * cfg.n_grid.size();
    std::vector<ReplicateRecord> records(total);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t idx; (idx = next.fetch_add(1)) < total;) {
            const std::size_t n = cfg.n_grid[idx / per_n];
            records[idx] = detail::run_replicate(cfg, vol, truth_orig, n, idx % per_n);
        }
    };
    const unsigned nthreads = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), total));
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(nthreads);
        for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    }

    ExperimentReport report;
    report.level = cfg.level;
    report.seed = cfg.seed;
    for (std::size_t g = 0; g < cfg.n_grid.size(); ++g) {
        SampleSizeReport s;
        s.n = cfg.n_grid[g];
        s.replicates = per_n;
        std::vector<Vector4> est_tr, est_orig;
        std::array<std::size_t, 4> hits{};
        for (std::size_t r = 0; r < per_n; ++r) {
            const ReplicateRecord& rec = records[g * per_n + r];
            if (rec.status == ReplicateStatus::Failed) {
                ++s.failed;
                continue;
            }
            if (rec.status == ReplicateStatus::OutOfImage) {
                ++s.out_of_image;
                continue;
            }
            est_tr.push_back(rec.transformed.as_vector());
            est_orig.push_back(rec.original->as_vector());
            for (int k = 0; k < 4; ++k) hits[k] += rec.covered[k] ? 1 : 0;
        }
        s.used = est_tr.size();
        s.transformed = detail::layer_stats(est_tr, truth_tr, theory.e_mat, s.n);
        s.original = detail::layer_stats(est_orig, truth_orig, theory.sandwich, s.n);
        for (int k = 0; k < 4; ++k) s.coverage[k] = s.used ? static_cast<double>(hits[k]) / s.used : 0.0;
        report.per_n.push_back(std::move(s));
    }
    report.raw = std::move(records);
    return report;
}

}  // namespace heston_clse
