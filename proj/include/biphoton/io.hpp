#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "biphoton/analysis.hpp"
#include "biphoton/correlation.hpp"
#include "biphoton/density_matrix.hpp"
#include "biphoton/montecarlo.hpp"
#include "biphoton/shaper.hpp"

namespace biphoton {

using json = nlohmann::json;

// full round-trip precision, locale-independent
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

// ------------------------------- traces -------------------------------------

inline void write_trace_csv(const std::filesystem::path& path, const CorrelationTrace& tr) {
    std::ostringstream os;
    os << "tau_fs,value_hz,stderr_hz\n";
    for (std::size_t i = 0; i < tr.tau.size(); ++i) {
        os << format_double(tr.tau[i]) << ',' << format_double(tr.value[i]) << ','
           << format_double(tr.stderr_[i]) << '\n';
    }
    write_text_file(path, os.str());
}

inline CorrelationTrace read_trace_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty trace file: " + path.string());
    if (line != "tau_fs,value_hz,stderr_hz") {
        throw std::runtime_error(path.string() + ":1: expected header tau_fs,value_hz,stderr_hz");
    }
    CorrelationTrace tr;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        double tau = 0.0, value = 0.0, err = 0.0;
        char extra = 0;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf%c", &tau, &value, &err, &extra) != 3) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": malformed row '" + line + "'");
        }
        tr.tau.push_back(tau);
        tr.value.push_back(value);
        tr.stderr_.push_back(err);
    }
    validate(tr);
    return tr;
}

inline json trace_meta_json(const TraceMeta& meta) {
    return json{{"sigma_rad", meta.sigma},
                {"n_realizations", meta.n_realizations},
                {"seed", meta.seed},
                {"kind", to_string(meta.kind)},
                {"poissonized", meta.poissonized},
                {"clipped_points", meta.clipped_points}};
}

inline json run_stats_json(const RunStats& stats) {
    json j{{"n_effective", stats.n_effective}, {"wall_time_s", stats.wall_time_s}};
    if (stats.has_window) {
        j["background_window_mean_hz"] = stats.window_mean;
        j["background_window_stderr_hz"] = stats.window_stderr;
    }
    return j;
}

// --------------------------- masks, matrices, curves ------------------------

inline void write_mask_csv(const std::filesystem::path& path, const TransferFunction& tf) {
    std::ostringstream os;
    os << "omega_rad_per_fs,re,im\n";
    for (std::size_t i = 0; i < tf.grid.size(); ++i) {
        os << format_double(tf.grid.values[i]) << ',' << format_double(tf.mask[i].real()) << ','
           << format_double(tf.mask[i].imag()) << '\n';
    }
    write_text_file(path, os.str());
}

inline void write_matrix_csv(const std::filesystem::path& path, const DensityMatrix& dm) {
    std::ostringstream os;
    os << "row,col,re,im\n";
    for (Eigen::Index i = 0; i < dm.mat.rows(); ++i) {
        for (Eigen::Index j = 0; j < dm.mat.cols(); ++j) {
            os << i << ',' << j << ',' << format_double(dm.mat(i, j).real()) << ','
               << format_double(dm.mat(i, j).imag()) << '\n';
        }
    }
    write_text_file(path, os.str());
}

inline void write_curve_csv(const std::filesystem::path& path, const SweepCurve& curve) {
    std::ostringstream os;
    os << "sigma_rad,value,stderr\n";
    for (std::size_t i = 0; i < curve.sigma.size(); ++i) {
        os << format_double(curve.sigma[i]) << ',' << format_double(curve.value[i]) << ','
           << format_double(curve.stderr_[i]) << '\n';
    }
    write_text_file(path, os.str());
}

inline json fit_result_json(const FitResult& fit, double lambda0_nm = 1064.0) {
    const auto [w_rad, w_nm] = spectral_width(fit, lambda0_nm);
    json cov = json::array();
    for (const auto& row : fit.covariance) {
        cov.push_back(json::array({row[0], row[1], row[2]}));
    }
    return json{{"B_hz", fit.B_hz},
                {"mu_rad_per_fs", fit.mu},
                {"sigma_p_rad_per_fs", fit.sigma_p},
                {"residual_rms_hz", fit.residual_rms},
                {"iterations", fit.iterations},
                {"covariance", cov},
                {"spectral_width_rad_per_fs", w_rad},
                {"spectral_width_nm", w_nm},
                {"lambda0_nm", lambda0_nm}};
}

}  // namespace biphoton
