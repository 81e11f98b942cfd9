// heston_clse: simulate, estimate, asymptotics and montecarlo subcommands.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <heston_clse/config.hpp>
#include <heston_clse/heston_clse.hpp>
#include <heston_clse/io.hpp>

namespace fs = std::filesystem;
using namespace heston_clse;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Options {
    std::string config_path;
    std::string output_dir = ".";
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    int verbosity = 0;
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    os << text;
    if (!os) throw std::runtime_error("write failed for '" + path.string() + "'");
}

template <class Writer>
void write_with(const fs::path& path, Writer&& writer) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    writer(os);
    if (!os) throw std::runtime_error("write failed for '" + path.string() + "'");
}

HestonParams require_model(const config::RunConfig& cfg) {
    if (!cfg.model) throw ConfigError("config: section 'model' is required for this command");
    return HestonParams(*cfg.model);
}

int cmd_simulate(const config::RunConfig& cfg, const Options& opt) {
    const HestonParams p = require_model(cfg);
    if (!cfg.simulation || cfg.simulation->n == 0)
        throw ConfigError("config: 'simulation.n' is required for simulate");
    SimulationConfig sim = cfg.simulation->sim;
    if (opt.seed) sim.seed = *opt.seed;
    const std::size_t n = cfg.simulation->n;

    const ObservationSeries series = simulate_path(p, n, sim);
    const fs::path out = opt.output_dir;
    write_with(out / "series.csv", [&](std::ostream& os) { write_series_csv(os, series); });

    io::json meta;
    meta["model"] = io::to_json(p);
    meta["n"] = n;
    meta["seed"] = sim.seed;
    meta["substeps"] = sim.substeps;
    meta["scheme"] = to_string(sim.scheme);
    write_text(out / "meta.json", io::dump(meta));
    if (opt.verbosity > 0) std::cerr << "wrote " << (out / "series.csv").string() << " (" << n + 1 << " rows)\n";
    return 0;
}

int cmd_estimate(const config::RunConfig& cfg, const Options& opt) {
    if (!cfg.estimate) throw ConfigError("config: section 'estimate' is required for estimate");
    const auto& sec = *cfg.estimate;
    const ObservationSeries series = read_series_csv(sec.series.string());
    const ClseResult est = clse_original(series);

    io::json j = io::to_json(est);
    if (sec.volatility && est.original)
        j["confidence_intervals"] = io::to_json(confidence_intervals(est, *sec.volatility, sec.level), sec.level);
    write_text(fs::path(opt.output_dir) / "estimate.json", io::dump(j));
    if (opt.verbosity > 0 && est.out_of_image())
        std::cerr << "estimate is outside the image of g; drift parameters not reported\n";
    return 0;
}

int cmd_asymptotics(const config::RunConfig& cfg, const Options& opt) {
    const HestonParams p = require_model(cfg);
    const AsymptoticCovariance cov = covariance_original(p);
    io::json j = io::to_json(cov);
    j["diagnostics"] = {{"sandwich_identity_residual", cov.identity_residual},
                        {"quadrature", io::quadrature_diagnostics(p)}};
    write_text(fs::path(opt.output_dir) / "asymptotics.json", io::dump(j));
    return 0;
}

int cmd_montecarlo(const config::RunConfig& cfg, const Options& opt) {
    const HestonParams p = require_model(cfg);
    if (!cfg.montecarlo) throw ConfigError("config: section 'montecarlo' is required for montecarlo");
    const auto& mc = *cfg.montecarlo;
    ExperimentConfig ec;
    ec.params = p;
    ec.n_grid = mc.n_grid;
    ec.replicates = mc.replicates;
    ec.seed = opt.seed.value_or(mc.seed);
    ec.level = mc.level;
    if (cfg.simulation) ec.sim = cfg.simulation->sim;
    ec.validate();

    const ExperimentReport rep = run_experiment(ec, opt.threads);
    const fs::path out = opt.output_dir;
    write_text(out / "report.json", io::dump(io::to_json(rep)));
    write_with(out / "rmse_vs_n.csv", [&](std::ostream& os) { io::write_rmse_csv(os, rep); });
    write_with(out / "qq_whitened.csv", [&](std::ostream& os) { io::write_qq_csv(os, rep); });
    write_with(out / "coverage.csv", [&](std::ostream& os) { io::write_coverage_csv(os, rep); });
    if (mc.dump_raw) write_with(out / "raw.csv", [&](std::ostream& os) { io::write_raw_csv(os, rep); });
    if (opt.verbosity > 0)
        for (const auto& s : rep.per_n)
            std::cerr << "n=" << s.n << " used=" << s.used << " out_of_image=" << s.out_of_image
                      << " failed=" << s.failed << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conditional least squares estimation for the subcritical Heston model"};
    app.require_subcommand(1);
    Options opt;
    std::uint64_t seed_value = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--output", opt.output_dir, "output directory (created if missing)");
        sub->add_option("--seed", seed_value, "override the configured seed");
        sub->add_option("--threads", opt.threads, "worker threads, 0 = auto");
        sub->add_flag("-v,--verbose", opt.verbosity, "more diagnostics on stderr");
    };
    auto* sim = app.add_subcommand("simulate", "simulate a path and write series.csv + meta.json");
    auto* est = app.add_subcommand("estimate", "estimate drift parameters from a series CSV");
    auto* asy = app.add_subcommand("asymptotics", "evaluate the limit covariance matrices");
    auto* mc = app.add_subcommand("montecarlo", "replicated simulate/estimate experiment");
    for (auto* s : {sim, est, asy, mc}) add_common(s);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }
    for (auto* s : {sim, est, asy, mc})
        if (s->count("--seed")) opt.seed = seed_value;
    // --threads 0 falls back to HESTON_CLSE_THREADS, then hardware (resolve_threads)

    config::RunConfig cfg;
    try {
        cfg = config::load(opt.config_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        fs::create_directories(opt.output_dir);
        if (*sim) return cmd_simulate(cfg, opt);
        if (*est) return cmd_estimate(cfg, opt);
        if (*asy) return cmd_asymptotics(cfg, opt);
        if (*mc) return cmd_montecarlo(cfg, opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitRuntime;
}
