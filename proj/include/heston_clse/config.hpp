#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "asymptotics.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "montecarlo.hpp"
#include "simulate.hpp"

// Run configuration for the command-line tool. The accepted document is
// described by schema/config.schema.json; validation here mirrors it and
// rejects unknown keys at every level.

namespace heston_clse::config {

using json = nlohmann::json;

struct SimulateSection {
    std::size_t n = 0;  // 0 when absent; required by the simulate command only
    SimulationConfig sim;
};

struct EstimateSection {
    std::filesystem::path series;
    double level = 0.95;
    std::optional<VolatilityParams> volatility;
};

struct MonteCarloSection {
    std::vector<std::size_t> n_grid;
    std::size_t replicates = 0;
    std::uint64_t seed = 0;
    double level = 0.95;
    bool dump_raw = false;
};

struct RunConfig {
    std::optional<HestonValues> model;
    std::optional<SimulateSection> simulation;
    std::optional<EstimateSection> estimate;
    std::optional<MonteCarloSection> montecarlo;
};

namespace detail {

inline void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : obj.items())
        if (!ok.count(item.key())) throw ConfigError(where + ": unknown key '" + item.key() + "'");
}

inline double number(const json& obj, const std::string& where, const char* key, std::optional<double> fallback = {}) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(where + ": missing required key '" + key + "'");
    }
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
    return v.get<double>();
}

inline std::uint64_t unsigned_int(const json& obj, const std::string& where, const char* key,
                                  std::optional<std::uint64_t> fallback = {}) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(where + ": missing required key '" + key + "'");
    }
    const json& v = obj.at(key);
    if (!v.is_number_unsigned()) throw ConfigError(where + "." + key + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
}

inline double level(const json& obj, const std::string& where) {
    const double v = number(obj, where, "level", 0.95);
    if (!(v > 0.0 && v < 1.0)) throw ConfigError(where + ".level: must lie in (0, 1)");
    return v;
}

}  // namespace detail

inline HestonValues parse_model(const json& j) {
    const std::string w = "model";
    detail::only_keys(j, w, {"a", "b", "alpha", "beta", "sigma1", "sigma2", "rho", "y0", "x0"});
    HestonValues v;
    v.a = detail::number(j, w, "a");
    v.b = detail::number(j, w, "b");
    v.alpha = detail::number(j, w, "alpha");
    v.beta = detail::number(j, w, "beta");
    v.sigma1 = detail::number(j, w, "sigma1");
    v.sigma2 = detail::number(j, w, "sigma2");
    v.rho = detail::number(j, w, "rho");
    v.y0 = detail::number(j, w, "y0", 1.0);
    v.x0 = detail::number(j, w, "x0", 0.0);
    try {
        HestonParams{v};
    } catch (const DomainError& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
    return v;
}

inline SimulationConfig parse_sim_fields(const json& j, const std::string& w) {
    SimulationConfig sim;
    sim.substeps = static_cast<int>(detail::unsigned_int(j, w, "substeps", 64));
    if (sim.substeps < 1) throw ConfigError(w + ".substeps: must be >= 1");
    sim.seed = detail::unsigned_int(j, w, "seed", 0);
    if (j.contains("scheme")) {
        if (!j.at("scheme").is_string()) throw ConfigError(w + ".scheme: expected a string");
        sim.scheme = scheme_from_string(j.at("scheme").get<std::string>());
    }
    return sim;
}

inline SimulateSection parse_simulation(const json& j) {
    const std::string w = "simulation";
    detail::only_keys(j, w, {"n", "substeps", "seed", "scheme"});
    SimulateSection s;
    s.n = detail::unsigned_int(j, w, "n", 0);
    if (j.contains("n") && s.n < 2) throw ConfigError(w + ".n: must be >= 2");
    s.sim = parse_sim_fields(j, w);
    return s;
}

inline EstimateSection parse_estimate(const json& j, const std::filesystem::path& base_dir) {
    const std::string w = "estimate";
    detail::only_keys(j, w, {"series", "level", "volatility"});
    EstimateSection s;
    if (!j.contains("series") || !j.at("series").is_string())
        throw ConfigError(w + ": 'series' (string path) is required");
    std::filesystem::path p = j.at("series").get<std::string>();
    s.series = p.is_relative() ? base_dir / p : p;
    s.level = detail::level(j, w);
    if (j.contains("volatility")) {
        const json& v = j.at("volatility");
        const std::string wv = w + ".volatility";
        detail::only_keys(v, wv, {"sigma1", "sigma2", "rho"});
        VolatilityParams vol{detail::number(v, wv, "sigma1"), detail::number(v, wv, "sigma2"),
                             detail::number(v, wv, "rho")};
        if (!(vol.sigma1 > 0.0) || !(vol.sigma2 > 0.0) || !(vol.rho > -1.0 && vol.rho < 1.0))
            throw ConfigError(wv + ": need sigma1 > 0, sigma2 > 0, |rho| < 1");
        s.volatility = vol;
    }
    return s;
}

inline MonteCarloSection parse_montecarlo(const json& j) {
    const std::string w = "montecarlo";
    detail::only_keys(j, w, {"n_grid", "replicates", "seed", "level", "dump_raw"});
    MonteCarloSection s;
    if (!j.contains("n_grid") || !j.at("n_grid").is_array() || j.at("n_grid").empty())
        throw ConfigError(w + ".n_grid: expected a non-empty array of integers");
    for (const auto& v : j.at("n_grid")) {
        if (!v.is_number_unsigned()) throw ConfigError(w + ".n_grid: entries must be non-negative integers");
        s.n_grid.push_back(v.get<std::size_t>());
    }
    s.replicates = detail::unsigned_int(j, w, "replicates");
    s.seed = detail::unsigned_int(j, w, "seed", 0);
    s.level = detail::level(j, w);
    if (j.contains("dump_raw")) {
        if (!j.at("dump_raw").is_boolean()) throw ConfigError(w + ".dump_raw: expected a boolean");
        s.dump_raw = j.at("dump_raw").get<bool>();
    }
    return s;
}

inline RunConfig parse(const json& doc, const std::filesystem::path& base_dir = ".") {
    detail::only_keys(doc, "config", {"model", "simulation", "estimate", "montecarlo"});
    RunConfig cfg;
    if (doc.contains("model")) cfg.model = parse_model(doc.at("model"));
    if (doc.contains("simulation")) cfg.simulation = parse_simulation(doc.at("simulation"));
    if (doc.contains("estimate")) cfg.estimate = parse_estimate(doc.at("estimate"), base_dir);
    if (doc.contains("montecarlo")) cfg.montecarlo = parse_montecarlo(doc.at("montecarlo"));
    return cfg;
}

inline RunConfig load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse(doc, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

}  // namespace heston_clse::config
