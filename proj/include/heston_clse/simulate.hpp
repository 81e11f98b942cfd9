#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "model.hpp"
#include "rng.hpp"

namespace heston_clse {

enum class Scheme { ExactCIR, EulerFullTruncation };

inline const char* to_string(Scheme s) {
    return s == Scheme::ExactCIR ? "exact_cir" : "euler_full_truncation";
}

inline Scheme scheme_from_string(const std::string& s) {
    if (s == "exact_cir") return Scheme::ExactCIR;
    if (s == "euler_full_truncation") return Scheme::EulerFullTruncation;
    throw ConfigError("unknown scheme '" + s + "' (expected exact_cir or euler_full_truncation)");
}

struct SimulationConfig {
    int substeps = 64;  // grid points per unit interval
    std::uint64_t seed = 0;
    Scheme scheme = Scheme::ExactCIR;
};

/// Observations (Y_i, X_i) at integer times i = 0..n.
struct ObservationSeries {
    std::vector<double> y;
    std::vector<double> x;

    std::size_t n() const { return y.empty() ? 0 : y.size() - 1; }

    void validate() const {
        if (y.size() != x.size()) throw DomainError("ObservationSeries: y and x lengths differ");
        if (y.size() < 3) throw DomainError("ObservationSeries: need n >= 2 increments");
        for (double v : y)
            if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("ObservationSeries: y must be finite and >= 0");
        for (double v : x)
            if (!std::isfinite(v)) throw DomainError("ObservationSeries: x must be finite");
    }

    friend bool operator==(const ObservationSeries&, const ObservationSeries&) = default;
};

/// Advances (Y, X) over unit time intervals on a sub-grid of `substeps` points.
///
/// ExactCIR draws Y from the noncentral chi-square transition law at every
/// sub-grid point. X is then advanced conditionally on the Y path:
/// the W-driven part of the X noise equals (dY - a h + b int Y du) / sigma1,
/// and the B-driven part is Gaussian with variance (1 - rho^2) sigma2^2 int Y du.
/// int Y du uses the trapezoid rule on the sub-grid.
///
/// EulerFullTruncation keeps an auxiliary state that may go negative and uses
/// its positive part in drift and diffusion; the reported Y is that positive part.
class HestonStepper {
public:
    HestonStepper(const HestonParams& p, const SimulationConfig& cfg, std::uint64_t stream_seed)
        : p_(p), scheme_(cfg.scheme), substeps_(cfg.substeps), rng_(stream_seed) {
        if (cfg.substeps < 1) throw ConfigError("SimulationConfig: substeps must be >= 1");
        h_ = 1.0 / substeps_;
        sqrt_h_ = std::sqrt(h_);
        const double s1sq = p.sigma1() * p.sigma1();
        decay_ = std::exp(-p.b() * h_);
        scale_ = s1sq * (-std::expm1(-p.b() * h_)) / (4.0 * p.b());
        dof_ = 4.0 * p.a() / s1sq;
        if (dof_ > 1.0) chi_rest_ = std::gamma_distribution<double>(0.5 * (dof_ - 1.0), 2.0);
        rho_bar_ = std::sqrt(1.0 - p.rho() * p.rho());
        corr_coef_ = p.sigma2() * p.rho() / p.sigma1();
    }

    /// Advance one unit of time; `aux` is the scheme state for Y (equal to y
    /// for ExactCIR).
    void advance_unit(double& y, double& aux, double& x) {
        if (scheme_ == Scheme::ExactCIR) {
            for (int k = 0; k < substeps_; ++k) exact_substep(y, x);
            aux = y;
        } else {
            for (int k = 0; k < substeps_; ++k) euler_substep(aux, x);
            y = std::max(aux, 0.0);
        }
    }

private:
    double noncentral_chi2(double lambda) {
        if (dof_ > 1.0) {
            const double z = normal_(rng_) + std::sqrt(lambda);
            return z * z + chi_rest_(rng_);
        }
        std::poisson_distribution<long long> pois(0.5 * lambda);
        const long long k = lambda > 0.0 ? pois(rng_) : 0;
        std::gamma_distribution<double> chi(0.5 * dof_ + static_cast<double>(k), 2.0);
        return chi(rng_);
    }

    void exact_substep(double& y, double& x) {
        const double lambda = y * decay_ / scale_;
        const double y_next = scale_ * noncentral_chi2(lambda);
        const double integral = 0.5 * h_ * (y + y_next);
        const double w_part = y_next - y - p_.a() * h_ + p_.b() * integral;
        x += p_.alpha() * h_ - p_.beta() * integral + corr_coef_ * w_part +
             p_.sigma2() * rho_bar_ * std::sqrt(integral) * normal_(rng_);
        y = y_next;
    }

    void euler_substep(double& aux, double& x) {
        const double ypos = std::max(aux, 0.0);
        const double vol = std::sqrt(ypos) * sqrt_h_;
        const double z1 = normal_(rng_);
        const double z2 = normal_(rng_);
        aux += (p_.a() - p_.b() * ypos) * h_ + p_.sigma1() * vol * z1;
        x += (p_.alpha() - p_.beta() * ypos) * h_ + p_.sigma2() * vol * (p_.rho() * z1 + rho_bar_ * z2);
    }

    HestonParams p_;
    Scheme scheme_;
    int substeps_;
    Xoshiro256 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::gamma_distribution<double> chi_rest_{1.0, 2.0};
    double h_ = 0.0, sqrt_h_ = 0.0;
    double decay_ = 0.0, scale_ = 0.0, dof_ = 0.0;
    double rho_bar_ = 0.0, corr_coef_ = 0.0;
};

/// Path observed at times 0..n. Deterministic in (p, n, cfg); the generator is
/// seeded with cfg.seed directly, so callers wanting one stream per path pass
/// a derived seed (see derive_seed).
inline ObservationSeries simulate_path(const HestonParams& p, std::size_t n, const SimulationConfig& cfg) {
    if (cfg.substeps < 1) throw ConfigError("SimulationConfig: substeps must be >= 1");
    if (n < 2) throw DomainError("simulate_path: n must be >= 2");
    HestonStepper stepper(p, cfg, cfg.seed);
    ObservationSeries out;
    out.y.resize(n + 1);
    out.x.resize(n + 1);
    double y = p.y0(), aux = p.y0(), x = p.x0();
    out.y[0] = y;
    out.x[0] = x;
    for (std::size_t i = 1; i <= n; ++i) {
        stepper.advance_unit(y, aux, x);
        out.y[i] = y;
        out.x[i] = x;
    }
    return out;
}

/// i.i.d. draws from the stationary law Gamma(shape 2a/sigma1^2, rate 2b/sigma1^2).
inline std::vector<double> stationary_sample(const HestonParams& p, std::size_t count, std::uint64_t seed) {
    const double s1sq = p.sigma1() * p.sigma1();
    std::gamma_distribution<double> gamma(2.0 * p.a() / s1sq, s1sq / (2.0 * p.b()));
    Xoshiro256 rng(seed);
    std::vector<double> out(count);
    for (auto& v : out) v = gamma(rng);
    return out;
}

// ---- CSV (header `i,y,x`, 17 significant digits) ----

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_series_csv(std::ostream& os, const ObservationSeries& s) {
    os << "i,y,x\n";
    for (std::size_t i = 0; i < s.y.size(); ++i)
        os << i << ',' << format_double(s.y[i]) << ',' << format_double(s.x[i]) << '\n';
}

inline ObservationSeries read_series_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw DomainError("series CSV: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "i,y,x") throw DomainError("series CSV: expected header 'i,y,x', got '" + line + "'");
    ObservationSeries s;
    std::size_t row = 0;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string fi, fy, fx;
        if (!std::getline(ls, fi, ',') || !std::getline(ls, fy, ',') || !std::getline(ls, fx))
            throw DomainError("series CSV: malformed row " + std::to_string(row + 1));
        try {
            if (std::stoull(fi) != row)
                throw DomainError("series CSV: index column must count 0,1,2,... (row " + std::to_string(row + 1) + ")");
            s.y.push_back(std::stod(fy));
            s.x.push_back(std::stod(fx));
        } catch (const std::logic_error& e) {
            if (dynamic_cast<const DomainError*>(&e)) throw;
            throw DomainError("series CSV: unparsable number in row " + std::to_string(row + 1));
        }
        ++row;
    }
    s.validate();
    return s;
}

inline void write_series_csv(const std::string& path, const ObservationSeries& s) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_series_csv(os, s);
    if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

inline ObservationSeries read_series_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open series file '" + path + "'");
    return read_series_csv(is);
}

}  // namespace heston_clse
