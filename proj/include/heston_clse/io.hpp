#pragma once

#include <array>
#include <fstream>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "asymptotics.hpp"
#include "estimate.hpp"
#include "montecarlo.hpp"
#include "simulate.hpp"
#include "stats.hpp"

namespace heston_clse::io {

using json = nlohmann::ordered_json;

inline constexpr std::array<const char*, 4> kTransformedNames{"c", "d", "gamma", "delta"};
inline constexpr std::array<const char*, 4> kOriginalNames{"a", "b", "alpha", "beta"};

inline json matrix_json(const Matrix4& m) {
    json rows = json::array();
    for (int i = 0; i < 4; ++i) {
        json row = json::array();
        for (int j = 0; j < 4; ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json vector_json(const Vector4& v) { return json::array({v[0], v[1], v[2], v[3]}); }

inline json to_json(const HestonParams& p) {
    return {{"a", p.a()},           {"b", p.b()},           {"alpha", p.alpha()},
            {"beta", p.beta()},     {"sigma1", p.sigma1()}, {"sigma2", p.sigma2()},
            {"rho", p.rho()},       {"y0", p.y0()},         {"x0", p.x0()}};
}

inline json to_json(const ClseResult& r) {
    json j;
    j["c"] = r.transformed.c;
    j["d"] = r.transformed.d;
    j["gamma"] = r.transformed.gamma;
    j["delta"] = r.transformed.delta;
    if (r.original) {
        j["a"] = r.original->a;
        j["b"] = r.original->b;
        j["alpha"] = r.original->alpha;
        j["beta"] = r.original->beta;
    } else {
        j["a"] = nullptr;
        j["b"] = nullptr;
        j["alpha"] = nullptr;
        j["beta"] = nullptr;
    }
    j["out_of_image"] = r.out_of_image();
    j["n"] = r.n;
    return j;
}

inline json to_json(const ParameterIntervals& ci, double level) {
    json j;
    j["level"] = level;
    for (int k = 0; k < 4; ++k)
        j[kOriginalNames[k]] = {{"estimate", ci[k].estimate},
                                {"lower", ci[k].lower},
                                {"upper", ci[k].upper},
                                {"half_width", ci[k].half_width}};
    return j;
}

inline json to_json(const NoiseMoments& c) {
    return {{"C1", c.c1}, {"C2", c.c2}, {"C3", c.c3}, {"C4", c.c4}, {"C5", c.c5}, {"C6", c.c6}};
}

inline json to_json(const AsymptoticCovariance& cov) {
    json j;
    j["d"] = matrix_json(cov.d_mat);
    j["e"] = matrix_json(cov.e_mat);
    j["j"] = matrix_json(cov.j_mat);
    j["sandwich"] = matrix_json(cov.sandwich);
    j["stationary_moments"] = {{"m1", cov.moments.m1}, {"m2", cov.moments.m2}, {"m3", cov.moments.m3}};
    j["noise_moments"] = to_json(cov.noise);
    return j;
}

/// Closed form vs quadrature for each constant; residual is relative to the
/// size of the constant's additive terms.
inline json quadrature_diagnostics(const HestonParams& p) {
    const auto closed = noise_moments(p).as_array();
    const auto quad = noise_moments_quadrature(p);
    const auto qv = quad.value.as_array();
    json j;
    double worst = 0.0;
    for (int k = 0; k < 6; ++k) {
        const double res = quad.scale[k] > 0.0 ? std::abs(closed[k] - qv[k]) / quad.scale[k] : 0.0;
        worst = std::max(worst, res);
        j["C" + std::to_string(k + 1)] = {{"closed_form", closed[k]}, {"quadrature", qv[k]}, {"relative_residual", res}};
    }
    j["max_relative_residual"] = worst;
    return j;
}

inline json to_json(const NormalityStats& ns) {
    auto arr = [](const std::array<double, 4>& a) { return json::array({a[0], a[1], a[2], a[3]}); };
    return {{"whitened_mean", arr(ns.mean)},
            {"whitened_variance", arr(ns.variance)},
            {"ks_distance", arr(ns.ks_distance)},
            {"ks_pvalue", arr(ns.ks_pvalue)},
            {"mahalanobis_chi2_4_ks_distance", ns.mahalanobis_ks_distance},
            {"mahalanobis_chi2_4_ks_pvalue", ns.mahalanobis_ks_pvalue}};
}

inline json to_json(const LayerStats& ls) {
    json j;
    j["truth"] = vector_json(ls.truth);
    j["bias"] = vector_json(ls.bias);
    j["rmse"] = vector_json(ls.rmse);
    j["empirical_cov_sqrt_n"] = matrix_json(ls.empirical_cov);
    j["theoretical_cov"] = matrix_json(ls.theoretical_cov);
    j["normality"] = ls.normality ? to_json(*ls.normality) : json(nullptr);
    return j;
}

inline json to_json(const ExperimentReport& rep) {
    json j;
    j["seed"] = rep.seed;
    j["level"] = rep.level;
    j["parameter_order"] = {{"transformed", kTransformedNames}, {"original", kOriginalNames}};
    json per_n = json::array();
    for (const auto& s : rep.per_n) {
        json e;
        e["n"] = s.n;
        e["replicates"] = s.replicates;
        e["used"] = s.used;
        e["out_of_image"] = s.out_of_image;
        e["failed"] = s.failed;
        e["transformed"] = to_json(s.transformed);
        e["original"] = to_json(s.original);
        e["coverage"] = json::array({s.coverage[0], s.coverage[1], s.coverage[2], s.coverage[3]});
        per_n.push_back(std::move(e));
    }
    j["per_n"] = std::move(per_n);
    return j;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---- CSV outputs of the Monte Carlo run ----

inline void write_raw_csv(std::ostream& os, const ExperimentReport& rep) {
    os << "n,replicate,c,d,gamma,delta,a,b,alpha,beta,out_of_image\n";
    for (const auto& r : rep.raw) {
        if (r.status == ReplicateStatus::Failed) continue;
        os << r.n << ',' << r.replicate << ',' << format_double(r.transformed.c) << ','
           << format_double(r.transformed.d) << ',' << format_double(r.transformed.gamma) << ','
           << format_double(r.transformed.delta);
        if (r.original)
            os << ',' << format_double(r.original->a) << ',' << format_double(r.original->b) << ','
               << format_double(r.original->alpha) << ',' << format_double(r.original->beta) << ",0\n";
        else
            os << ",,,,,1\n";
    }
}

inline void write_rmse_csv(std::ostream& os, const ExperimentReport& rep) {
    os << "n,layer,parameter,bias,rmse\n";
    for (const auto& s : rep.per_n) {
        for (int k = 0; k < 4; ++k)
            os << s.n << ",transformed," << kTransformedNames[k] << ',' << format_double(s.transformed.bias[k]) << ','
               << format_double(s.transformed.rmse[k]) << '\n';
        for (int k = 0; k < 4; ++k)
            os << s.n << ",original," << kOriginalNames[k] << ',' << format_double(s.original.bias[k]) << ','
               << format_double(s.original.rmse[k]) << '\n';
    }
}

/// Q-Q data of the whitened original-layer errors: sorted empirical values
/// against standard normal quantiles at (i + 0.5) / m.
inline void write_qq_csv(std::ostream& os, const ExperimentReport& rep) {
    os << "n,layer,component,rank,theoretical,empirical\n";
    auto emit = [&](std::size_t n, const char* layer, const LayerStats& ls, const auto& names) {
        if (!ls.normality) return;
        const auto& w = ls.normality->whitened;
        const std::size_t m = w.size();
        for (int k = 0; k < 4; ++k) {
            std::vector<double> col(m);
            for (std::size_t r = 0; r < m; ++r) col[r] = w[r][k];
            std::sort(col.begin(), col.end());
            for (std::size_t r = 0; r < m; ++r)
                os << n << ',' << layer << ',' << names[k] << ',' << r << ','
                   << format_double(stats::normal_quantile((r + 0.5) / m)) << ',' << format_double(col[r]) << '\n';
        }
    };
    for (const auto& s : rep.per_n) {
        emit(s.n, "transformed", s.transformed, kTransformedNames);
        emit(s.n, "original", s.original, kOriginalNames);
    }
}

inline void write_coverage_csv(std::ostream& os, const ExperimentReport& rep) {
    os << "n,parameter,nominal,coverage,used\n";
    for (const auto& s : rep.per_n)
        for (int k = 0; k < 4; ++k)
            os << s.n << ',' << kOriginalNames[k] << ',' << format_double(rep.level) << ','
               << format_double(s.coverage[k]) << ',' << s.used << '\n';
}

}  // namespace heston_clse::io
