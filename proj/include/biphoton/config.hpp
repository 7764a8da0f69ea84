#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "biphoton/grid.hpp"
#include "biphoton/random.hpp"
#include "biphoton/spectral.hpp"

namespace biphoton {

// Grid preset reproducing the published simulation's background level: with
// 20 independent phase pixels the σ=10 ensemble background of the default
// n=10⁴, seed-123456789 run lands on 26.93 Hz. The bin width is the one
// calibrated scalar; see tools/calibrate_background.cpp for the solver.
inline constexpr int kCalibratedNPos = 20;
inline constexpr double kCalibratedOmegaMax = 0.095259141306172412;

inline FrequencyGrid calibrated_grid() { return make_grid(kCalibratedNPos, kCalibratedOmegaMax); }

// Fine grid for convergence studies and identity checks.
inline FrequencyGrid fine_grid() { return make_grid(512, 0.12); }

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SpectrumConfig {
    double B_hz{708.71};
    double mu{0.0275};       // rad/fs
    double sigma_p{0.022};   // rad/fs
    double lambda0_nm{1064.0};
};

struct GridConfig {
    int n_pos{kCalibratedNPos};
    double omega_max{kCalibratedOmegaMax};
};

struct EnsembleSection {
    long long n_realizations{10000};
    std::vector<double> sigma_list{0.0, 0.5, 1.0, 2.0, 10.0};
    std::uint64_t master_seed{kDefaultMasterSeed};
};

struct TauConfig {
    double min{-250.0}, max{250.0}, step{1.0};
};

struct NoiseConfig {
    bool poisson{false};
    double acquisition_time_s{1.0};
    double dark_rate_hz{0.0};
};

struct OutputConfig {
    std::string directory{"out"};
    std::vector<std::string> formats{"csv", "json"};
};

struct RunConfig {
    SpectrumConfig spectrum;
    GridConfig grid;
    EnsembleSection ensemble;
    TauConfig tau;
    NoiseConfig noise;
    OutputConfig output;
};

inline SpectralAmplitude make_spectrum(const RunConfig& cfg) {
    return double_gaussian(cfg.spectrum.B_hz, cfg.spectrum.mu, cfg.spectrum.sigma_p,
                           make_grid(cfg.grid.n_pos, cfg.grid.omega_max));
}

inline void validate(const RunConfig& cfg) {
    if (!(cfg.spectrum.B_hz > 0.0)) throw ConfigError("spectrum.B_hz must be positive");
    if (cfg.spectrum.mu < 0.0) throw ConfigError("spectrum.mu_rad_per_fs must be >= 0");
    if (!(cfg.spectrum.sigma_p > 0.0)) throw ConfigError("spectrum.sigma_p_rad_per_fs must be positive");
    if (!(cfg.spectrum.lambda0_nm > 0.0)) throw ConfigError("spectrum.lambda0_nm must be positive");
    if (cfg.grid.n_pos < 2) throw ConfigError("grid.n_pos must be >= 2");
    if (!(cfg.grid.omega_max > 0.0)) throw ConfigError("grid.omega_max_rad_per_fs must be positive");
    if (cfg.ensemble.n_realizations < 1) throw ConfigError("ensemble.n_realizations must be >= 1");
    if (cfg.ensemble.sigma_list.empty()) throw ConfigError("ensemble.sigma_list must not be empty");
    for (const auto s : cfg.ensemble.sigma_list) {
        if (s < 0.0) throw ConfigError("ensemble.sigma_list entries must be >= 0");
    }
    if (!(cfg.tau.step > 0.0)) throw ConfigError("tau.step_fs must be positive");
    if (!(cfg.tau.max > cfg.tau.min)) throw ConfigError("tau.max_fs must exceed tau.min_fs");
    if ((cfg.tau.max - cfg.tau.min) / cfg.tau.step > 20'000'000.0) {
        throw ConfigError("tau grid too large");
    }
    if (cfg.noise.poisson && !(cfg.noise.acquisition_time_s > 0.0)) {
        throw ConfigError("noise.acquisition_time_s must be positive when poisson is enabled");
    }
    if (cfg.noise.dark_rate_hz < 0.0) throw ConfigError("noise.dark_rate_hz must be >= 0");
    if (cfg.output.directory.empty()) throw ConfigError("output.directory must not be empty");
    for (const auto& f : cfg.output.formats) {
        if (f != "csv" && f != "json") throw ConfigError("output.formats entries must be csv or json");
    }
}

namespace detail {

// strict object reader: every key must be consumed, unknown keys are errors
class StrictObject {
public:
    StrictObject(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j.is_object()) throw ConfigError(path_ + ": expected a JSON object");
    }

    template <typename T>
    void read(const char* key, T& target) {
        const auto it = j_.find(key);
        if (it == j_.end()) return;  // keep default
        try {
            target = it->get<T>();
        } catch (const nlohmann::json::exception&) {
            throw ConfigError(path_ + "." + key + ": wrong type");
        }
        consumed_.push_back(key);
    }

    bool has(const char* key) const { return j_.find(key) != j_.end(); }
    void mark(const char* key) { consumed_.push_back(key); }
    const nlohmann::json& raw(const char* key) const { return j_.at(key); }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            bool known = false;
            for (const auto& c : consumed_) {
                if (c == key) { known = true; break; }
            }
            if (!known) throw ConfigError(path_ + ": unknown key '" + key + "'");
        }
    }

private:
    const nlohmann::json& j_;
    std::string path_;
    std::vector<std::string> consumed_;
};

}  // namespace detail

inline RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig cfg;
    detail::StrictObject root(j, "config");

    if (root.has("spectrum")) {
        detail::StrictObject s(root.raw("spectrum"), "spectrum");
        s.read("B_hz", cfg.spectrum.B_hz);
        s.read("mu_rad_per_fs", cfg.spectrum.mu);
        s.read("sigma_p_rad_per_fs", cfg.spectrum.sigma_p);
        s.read("lambda0_nm", cfg.spectrum.lambda0_nm);
        s.finish();
        root.mark("spectrum");
    }
    if (root.has("grid")) {
        detail::StrictObject s(root.raw("grid"), "grid");
        s.read("n_pos", cfg.grid.n_pos);
        s.read("omega_max_rad_per_fs", cfg.grid.omega_max);
        s.finish();
        root.mark("grid");
    }
    if (root.has("ensemble")) {
        detail::StrictObject s(root.raw("ensemble"), "ensemble");
        s.read("n_realizations", cfg.ensemble.n_realizations);
        if (s.has("sigma") && s.has("sigma_list")) {
            throw ConfigError("ensemble: give either sigma or sigma_list, not both");
        }
        if (s.has("sigma")) {
            double one = 0.0;
            s.read("sigma", one);
            cfg.ensemble.sigma_list = {one};
        }
        s.read("sigma_list", cfg.ensemble.sigma_list);
        s.read("master_seed", cfg.ensemble.master_seed);
        s.finish();
        root.mark("ensemble");
    }
    if (root.has("tau")) {
        detail::StrictObject s(root.raw("tau"), "tau");
        s.read("min_fs", cfg.tau.min);
        s.read("max_fs", cfg.tau.max);
        s.read("step_fs", cfg.tau.step);
        s.finish();
        root.mark("tau");
    }
    if (root.has("noise")) {
        detail::StrictObject s(root.raw("noise"), "noise");
        s.read("poisson", cfg.noise.poisson);
        s.read("acquisition_time_s", cfg.noise.acquisition_time_s);
        s.read("dark_rate_hz", cfg.noise.dark_rate_hz);
        s.finish();
        root.mark("noise");
    }
    if (root.has("output")) {
        detail::StrictObject s(root.raw("output"), "output");
        s.read("directory", cfg.output.directory);
        s.read("formats", cfg.output.formats);
        s.finish();
        root.mark("output");
    }
    root.finish();
    validate(cfg);
    return cfg;
}

// Fully-resolved form (all defaults expanded); written next to every run's
// outputs so the run can be reproduced from the file alone.
inline nlohmann::json config_to_json(const RunConfig& cfg) {
    return nlohmann::json{
        {"spectrum",
         {{"B_hz", cfg.spectrum.B_hz},
          {"mu_rad_per_fs", cfg.spectrum.mu},
          {"sigma_p_rad_per_fs", cfg.spectrum.sigma_p},
          {"lambda0_nm", cfg.spectrum.lambda0_nm}}},
        {"grid", {{"n_pos", cfg.grid.n_pos}, {"omega_max_rad_per_fs", cfg.grid.omega_max}}},
        {"ensemble",
         {{"n_realizations", cfg.ensemble.n_realizations},
          {"sigma_list", cfg.ensemble.sigma_list},
          {"master_seed", cfg.ensemble.master_seed}}},
        {"tau", {{"min_fs", cfg.tau.min}, {"max_fs", cfg.tau.max}, {"step_fs", cfg.tau.step}}},
        {"noise",
         {{"poisson", cfg.noise.poisson},
          {"acquisition_time_s", cfg.noise.acquisition_time_s},
          {"dark_rate_hz", cfg.noise.dark_rate_hz}}},
        {"output", {{"directory", cfg.output.directory}, {"formats", cfg.output.formats}}}};
}

}  // namespace biphoton
