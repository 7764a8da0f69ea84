// Command-line front end: deterministic simulation runs and plot-ready
// CSV/JSON artifacts. Subcommands: simulate | verify | sweep | fit.
//
// Exit codes: 0 success, 1 config error, 2 runtime/numerical failure,
// 3 verification failure.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "biphoton/biphoton.hpp"

namespace fs = std::filesystem;
using biphoton::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitVerification = 3;

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::vector<double> sigmas;
    int workers = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--config", opt.config_path, "JSON run configuration file")
        ->envname("BIPHOTON_CONFIG");
    cmd->add_option("--out", opt.out_dir, "output directory")->envname("BIPHOTON_OUT");
    cmd->add_option("--seed", opt.seed, "master seed override")->envname("BIPHOTON_SEED");
    cmd->add_option("--sigma", opt.sigmas, "sigma list override (rad)")->delimiter(',');
    cmd->add_option("--workers", opt.workers, "worker thread count (0 = auto)")
        ->envname("BIPHOTON_WORKERS");
}

biphoton::RunConfig load_config(const CommonOptions& opt) {
    biphoton::RunConfig cfg;
    if (!opt.config_path.empty()) {
        std::ifstream in(opt.config_path);
        if (!in) throw biphoton::ConfigError("cannot open config file: " + opt.config_path);
        json j;
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            throw biphoton::ConfigError(opt.config_path + ": " + e.what());
        }
        cfg = biphoton::config_from_json(j);
    }
    if (opt.seed) cfg.ensemble.master_seed = *opt.seed;
    if (!opt.sigmas.empty()) cfg.ensemble.sigma_list = opt.sigmas;
    if (!opt.out_dir.empty()) cfg.output.directory = opt.out_dir;
    biphoton::validate(cfg);
    return cfg;
}

fs::path prepare_output_dir(const biphoton::RunConfig& cfg) {
    const fs::path dir(cfg.output.directory);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory " + dir.string() + ": " +
                                 ec.message());
    }
    biphoton::write_json_file(dir / "resolved_config.json", biphoton::config_to_json(cfg));
    return dir;
}

std::string sigma_tag(double sigma) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", sigma);
    return buf;
}

bool wants(const biphoton::RunConfig& cfg, const std::string& fmt) {
    for (const auto& f : cfg.output.formats) {
        if (f == fmt) return true;
    }
    return false;
}

// ---------------------------------- simulate --------------------------------

int cmd_simulate(const CommonOptions& opt, bool dump_masks) {
    const auto cfg = load_config(opt);
    const auto dir = prepare_output_dir(cfg);
    const auto sa = biphoton::make_spectrum(cfg);
    const auto tau = biphoton::make_tau_grid(cfg.tau.min, cfg.tau.max, cfg.tau.step);

    for (const double sigma : cfg.ensemble.sigma_list) {
        biphoton::EnsembleConfig ec;
        ec.sigma = sigma;
        ec.n_realizations = cfg.ensemble.n_realizations;
        ec.master_seed = cfg.ensemble.master_seed;
        ec.workers = opt.workers;
        auto [trace, stats] = biphoton::run_ensemble(sa, ec, tau);
        if (cfg.noise.poisson) {
            trace = biphoton::poissonize(trace, cfg.noise.acquisition_time_s,
                                         cfg.noise.dark_rate_hz,
                                         biphoton::derive_seed(cfg.ensemble.master_seed, 0x9019));
        }
        const std::string stem = "trace_sigma_" + sigma_tag(sigma);
        if (wants(cfg, "csv")) biphoton::write_trace_csv(dir / (stem + ".csv"), trace);
        if (wants(cfg, "json")) {
            json sidecar{{"meta", biphoton::trace_meta_json(trace.meta)},
                         {"stats", biphoton::run_stats_json(stats)}};
            biphoton::write_json_file(dir / (stem + ".json"), sidecar);
        }
        std::size_t near_zero = 0;
        for (std::size_t i = 1; i < tau.size(); ++i) {
            if (std::abs(tau[i]) < std::abs(tau[near_zero])) near_zero = i;
        }
        std::cout << "sigma=" << sigma_tag(sigma) << "  S(tau=" << tau[near_zero]
                  << ")=" << trace.value[near_zero] << " Hz  background=" << stats.window_mean
                  << " Hz\n";
    }

    if (dump_masks) {
        const auto grid = sa.grid;
        biphoton::write_mask_csv(dir / "mask_ma_tau100.csv", biphoton::ma_mask(100.0, grid));
        biphoton::write_mask_csv(dir / "mask_mb_tau100.csv", biphoton::mb_mask(100.0, grid));
        biphoton::write_mask_csv(
            dir / "mask_dephaser.csv",
            biphoton::random_dephaser(cfg.ensemble.sigma_list.back(),
                                      biphoton::derive_seed(cfg.ensemble.master_seed, 0), grid));
    }
    return kExitOk;
}

// ---------------------------------- verify ----------------------------------

int cmd_verify(const CommonOptions& opt, double frobenius_tol, long long n_override) {
    auto cfg = load_config(opt);
    // small-grid oracle settings unless the config explicitly asks for more
    if (opt.config_path.empty()) {
        cfg.grid.n_pos = 16;
        cfg.grid.omega_max = 0.12;
        cfg.ensemble.n_realizations = 5000;
        if (opt.sigmas.empty()) cfg.ensemble.sigma_list = {0.0, 0.5, 0.833, 2.0};
    }
    if (n_override > 0) cfg.ensemble.n_realizations = n_override;
    const auto dir = prepare_output_dir(cfg);
    const auto sa = biphoton::make_spectrum(cfg);

    json checks = json::array();
    bool all_passed = true;
    auto record = [&](const std::string& name, bool pass, double value, double tol) {
        checks.push_back(json{{"name", name}, {"passed", pass}, {"value", value}, {"tolerance", tol}});
        all_passed = all_passed && pass;
        std::cout << (pass ? "[PASS] " : "[FAIL] ") << name << "  value=" << value
                  << "  tol=" << tol << '\n';
    };

    const auto rho_q = biphoton::pure_state(sa);
    const auto rho_c = biphoton::classical_state(sa);
    const double ref = biphoton::matrix_distance(rho_q, rho_c);

    auto state_checks = [&](const std::string& label, const biphoton::DensityMatrix& dm) {
        record(label + ".hermitian", biphoton::is_hermitian(dm, 1e-12), 0.0, 1e-12);
        record(label + ".trace_one", std::abs(biphoton::trace_real(dm) - 1.0) <= 1e-10,
               biphoton::trace_real(dm), 1e-10);
        record(label + ".psd", biphoton::min_eigenvalue(dm) >= -1e-9,
               biphoton::min_eigenvalue(dm), -1e-9);
    };
    state_checks("rho_q", rho_q);
    state_checks("rho_c", rho_c);
    record("rho_q.purity_one", std::abs(biphoton::purity(rho_q) - 1.0) <= 1e-10,
           biphoton::purity(rho_q), 1e-10);

    for (const double sigma : cfg.ensemble.sigma_list) {
        const auto ens = biphoton::ensemble_average(sa, sigma, cfg.ensemble.n_realizations,
                                                    cfg.ensemble.master_seed);
        const auto pred = biphoton::predicted_mixture(sigma, sa);
        const double dist = biphoton::matrix_distance(ens, pred);
        const std::string tag = "sigma_" + sigma_tag(sigma);
        state_checks("ensemble." + tag, ens);
        const double tol = (sigma == 0.0) ? 1e-14 : frobenius_tol * ref;
        record("mixture_distance." + tag, dist <= tol, dist, tol);

        // dephasing must leave the populations alone, every n and σ
        const double diag_dev = (ens.mat.diagonal() - rho_q.mat.diagonal()).cwiseAbs().maxCoeff();
        record("diag_preserved." + tag, diag_dev == 0.0, diag_dev, 0.0);

        if (wants(cfg, "csv")) {
            biphoton::write_matrix_csv(dir / ("rho_ensemble_" + tag + ".csv"), ens);
            biphoton::write_matrix_csv(dir / ("rho_predicted_" + tag + ".csv"), pred);
        }
    }

    const double half = biphoton::fraction_entangled(std::sqrt(std::log(2.0)));
    record("fraction_half_at_sqrt_ln2", std::abs(half - 0.5) <= 1e-15, half, 1e-15);

    json report{{"checks", checks}, {"all_passed", all_passed}};
    biphoton::write_json_file(dir / "verify_report.json", report);
    return all_passed ? kExitOk : kExitVerification;
}

// ----------------------------------- sweep ----------------------------------

int cmd_sweep(const CommonOptions& opt) {
    auto cfg = load_config(opt);
    if (opt.sigmas.empty() && cfg.ensemble.sigma_list.size() == 5) {
        // default trace list is too coarse for curves; use the 0..3 rad sweep
        cfg.ensemble.sigma_list.clear();
        for (int i = 0; i <= 30; ++i) cfg.ensemble.sigma_list.push_back(0.1 * i);
    }
    const auto dir = prepare_output_dir(cfg);
    const auto sa = biphoton::make_spectrum(cfg);
    const auto& sigmas = cfg.ensemble.sigma_list;

    const auto fraction = biphoton::fraction_curve(sigmas);
    const auto background = biphoton::background_vs_sigma(sa, sigmas, cfg.ensemble.n_realizations,
                                                          cfg.ensemble.master_seed, opt.workers);
    const auto peaks = biphoton::peak_decay_curve(sa, sigmas, cfg.ensemble.n_realizations,
                                                  cfg.ensemble.master_seed, opt.workers);

    if (wants(cfg, "csv")) {
        biphoton::write_curve_csv(dir / "fraction_entangled.csv", fraction);
        biphoton::write_curve_csv(dir / "background.csv", background);
        biphoton::write_curve_csv(dir / "peak_ratio.csv", peaks);
    }
    if (wants(cfg, "json")) {
        auto curve_json = [](const biphoton::SweepCurve& c) {
            return json{{"sigma_rad", c.sigma}, {"value", c.value}, {"stderr", c.stderr_}};
        };
        biphoton::write_json_file(dir / "sweep.json",
                                  json{{"fraction_entangled", curve_json(fraction)},
                                       {"background_hz", curve_json(background)},
                                       {"peak_ratio", curve_json(peaks)}});
    }
    std::cout << "sweep over " << sigmas.size() << " sigma values written to " << dir.string()
              << '\n';
    return kExitOk;
}

// ------------------------------------ fit -----------------------------------

int cmd_fit(const CommonOptions& opt, const std::string& trace_path) {
    const auto cfg = load_config(opt);
    const auto trace = biphoton::read_trace_csv(trace_path);
    const auto fit = biphoton::fit_sigma0(trace);
    const auto [w_rad, w_nm] = biphoton::spectral_width(fit, cfg.spectrum.lambda0_nm);

    const auto dir = prepare_output_dir(cfg);
    biphoton::write_json_file(dir / "fit.json",
                              biphoton::fit_result_json(fit, cfg.spectrum.lambda0_nm));

    std::cout << "B = " << fit.B_hz << " Hz\n"
              << "mu = " << fit.mu << " rad/fs\n"
              << "sigma_p = " << fit.sigma_p << " rad/fs\n"
              << "residual rms = " << fit.residual_rms << " Hz\n"
              << "spectral width = " << w_rad << " rad/fs = " << w_nm << " nm\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-entangled photon pair decoherence simulator"};
    app.require_subcommand(1);

    CommonOptions sim_opt, ver_opt, swp_opt, fit_opt;
    bool dump_masks = false;
    double frobenius_tol = 0.05;
    long long verify_n = 0;
    std::string trace_path;

    auto* sim = app.add_subcommand("simulate", "ensemble-averaged S(tau) traces per sigma");
    add_common(sim, sim_opt);
    sim->add_flag("--dump-masks", dump_masks, "also write the measurement/dephaser masks");

    auto* ver = app.add_subcommand("verify", "density-matrix oracle checks (Frobenius distances)");
    add_common(ver, ver_opt);
    ver->add_option("--frobenius-tol", frobenius_tol,
                    "mixture distance tolerance as a fraction of ||rho_q - rho_c||");
    ver->add_option("--n-realizations", verify_n, "override ensemble size");

    auto* swp = app.add_subcommand("sweep", "fraction, background and peak-ratio curves vs sigma");
    add_common(swp, swp_opt);

    auto* fit = app.add_subcommand("fit", "fit the sigma=0 model to a trace CSV");
    add_common(fit, fit_opt);
    fit->add_option("trace", trace_path, "trace CSV file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim_opt, dump_masks);
        if (ver->parsed()) return cmd_verify(ver_opt, frobenius_tol, verify_n);
        if (swp->parsed()) return cmd_sweep(swp_opt);
        if (fit->parsed()) return cmd_fit(fit_opt, trace_path);
    } catch (const biphoton::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitConfig;
}
