#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "biphoton/correlation.hpp"
#include "biphoton/density_matrix.hpp"
#include "biphoton/montecarlo.hpp"
#include "biphoton/spectral.hpp"

namespace biphoton {

struct FitResult {
    double B_hz{0.0};
    double mu{0.0};       // rad/fs
    double sigma_p{0.0};  // rad/fs
    double residual_rms{0.0};
    std::array<std::array<double, 3>, 3> covariance{};
    int iterations{0};
};

class FitError : public std::runtime_error {
public:
    FitError(const std::string& msg, double residual_rms)
        : std::runtime_error(msg + " (residual rms " + std::to_string(residual_rms) + " Hz)"),
          residual_rms_(residual_rms) {}
    double residual_rms() const { return residual_rms_; }

private:
    double residual_rms_;
};

namespace detail {

inline double fit_model(double B, double mu, double s, double tau) {
    return B * std::cos(mu * tau) * std::exp(-0.5 * s * s * tau * tau);
}

struct FitData {
    std::vector<double> tau, y;
};

inline double cost(const FitData& d, double B, double mu, double s) {
    double c = 0.0;
    for (std::size_t i = 0; i < d.tau.size(); ++i) {
        const double r = fit_model(B, mu, s, d.tau[i]) - d.y[i];
        c += r * r;
    }
    return c;
}

}  // namespace detail

// Nonlinear least squares of the fit model B·cos(μτ)·e^{-σ′²τ²/2}.
//
// Deterministic initialization (documented, avoids the oscillatory model's
// local minima): B ← max of the trace; μ ← π/(2τ₀) from the first
// oscillation node at τ₀ > 0 (sign change, else first drop below 10⁻³·B);
// σ′ ← 1/τ_e from the first point where the suffix max of |S| falls below
// B·e^{-1/2}. Levenberg-Marquardt with analytic Jacobian afterwards;
// failure to converge inside the iteration budget raises FitError.
inline FitResult fit_sigma0(const CorrelationTrace& trace) {
    validate(trace);
    const double tau_min = trace.tau.front();
    const double tau_max = trace.tau.back();
    std::size_t in_range = 0;
    for (const auto t : trace.tau) {
        if (std::abs(t) <= 150.0 + 1e-9) ++in_range;
    }
    if (tau_min > -150.0 || tau_max < 150.0 || in_range < 100) {
        throw std::invalid_argument("fit_sigma0: trace must cover |tau| <= 150 fs with >= 100 points");
    }

    detail::FitData d{trace.tau, trace.value};
    const std::size_t m = d.tau.size();

    // --- initialization ---
    double B0 = 0.0;
    for (const auto v : d.y) B0 = std::max(B0, v);
    if (!(B0 > 0.0)) throw FitError("fit_sigma0: no positive peak", 0.0);

    double tau_node = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        if (d.tau[i] <= 0.0) continue;
        if (d.y[i] > 0.0 && d.y[i + 1] < 0.0) {
            // linear interpolation of the sign change
            tau_node = d.tau[i] + (d.tau[i + 1] - d.tau[i]) * d.y[i] / (d.y[i] - d.y[i + 1]);
            break;
        }
        if (std::abs(d.y[i]) < 1e-3 * B0) {
            tau_node = d.tau[i];  // trace touches zero without crossing
            break;
        }
    }
    if (!(tau_node > 0.0)) throw FitError("fit_sigma0: no oscillation node found", 0.0);
    const double mu0 = std::numbers::pi / (2.0 * tau_node);

    double s0 = 0.0;
    {
        // suffix max of |S| over τ > 0
        std::vector<std::size_t> pos_idx;
        for (std::size_t i = 0; i < m; ++i) {
            if (d.tau[i] > 0.0) pos_idx.push_back(i);
        }
        std::vector<double> suffix(pos_idx.size());
        double run = 0.0;
        for (std::size_t r = pos_idx.size(); r-- > 0;) {
            run = std::max(run, std::abs(d.y[pos_idx[r]]));
            suffix[r] = run;
        }
        const double level = B0 * std::exp(-0.5);
        double tau_e = d.tau[pos_idx.back()];
        for (std::size_t r = 0; r < pos_idx.size(); ++r) {
            if (suffix[r] <= level) {
                tau_e = d.tau[pos_idx[r]];
                break;
            }
        }
        s0 = 1.0 / tau_e;
    }

    // --- Levenberg-Marquardt ---
    double B = B0, mu = mu0, s = s0;
    double lambda = 1e-3;
    double c = detail::cost(d, B, mu, s);
    int iter = 0;
    bool converged = false;
    Eigen::Matrix3d jtj_final = Eigen::Matrix3d::Zero();

    for (; iter < 200; ++iter) {
        Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
        Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
        for (std::size_t i = 0; i < m; ++i) {
            const double t = d.tau[i];
            const double env = std::exp(-0.5 * s * s * t * t);
            const double co = std::cos(mu * t);
            const double si = std::sin(mu * t);
            const double r = B * co * env - d.y[i];
            const Eigen::Vector3d j(co * env,             // ∂/∂B
                                    -B * t * si * env,    // ∂/∂μ
                                    -B * s * t * t * co * env);  // ∂/∂σ′
            jtj += j * j.transpose();
            jtr += j * r;
        }
        jtj_final = jtj;

        bool stepped = false;
        for (int attempt = 0; attempt < 60; ++attempt) {
            Eigen::Matrix3d a = jtj;
            for (int k = 0; k < 3; ++k) a(k, k) += lambda * std::max(jtj(k, k), 1e-30);
            const Eigen::Vector3d delta = a.ldlt().solve(-jtr);
            const double Bn = B + delta(0), mun = mu + delta(1), sn = s + delta(2);
            const double cn = detail::cost(d, Bn, mun, sn);
            if (std::isfinite(cn) && cn <= c) {
                const double rel_step =
                    std::max({std::abs(delta(0)) / std::max(std::abs(B), 1e-30),
                              std::abs(delta(1)) / std::max(std::abs(mu), 1e-30),
                              std::abs(delta(2)) / std::max(std::abs(s), 1e-30)});
                const double rel_drop = (c - cn) / std::max(c, 1e-300);
                B = Bn; mu = mun; s = sn; c = cn;
                lambda = std::max(lambda * 0.3, 1e-14);
                stepped = true;
                if (rel_step < 1e-12 || rel_drop < 1e-14) converged = true;
                break;
            }
            lambda *= 4.0;
        }
        if (converged) break;
        if (!stepped) {
            // cannot improve at any damping: stationary point
            converged = true;
            break;
        }
    }

    const double rms = std::sqrt(c / static_cast<double>(m));
    if (!converged) throw FitError("fit_sigma0: no convergence within iteration budget", rms);

    // model invariances: cos is even in μ, the envelope even in σ′
    mu = std::abs(mu);
    s = std::abs(s);
    if (!(B > 0.0)) throw FitError("fit_sigma0: converged to non-positive amplitude", rms);
    if (!(s > 0.0)) throw FitError("fit_sigma0: converged to zero envelope width", rms);

    FitResult out;
    out.B_hz = B;
    out.mu = mu;
    out.sigma_p = s;
    out.residual_rms = rms;
    out.iterations = iter + 1;
    const double s2 = c / static_cast<double>(m > 3 ? m - 3 : 1);
    const Eigen::Matrix3d cov = s2 * jtj_final.inverse();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) out.covariance[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = cov(i, j);
    }
    return out;
}

// √(σ′² + μ²) and its wavelength equivalent at the carrier.
inline std::pair<double, double> spectral_width(const FitResult& fit, double lambda0_nm = 1064.0) {
    const double w = std::hypot(fit.sigma_p, fit.mu);
    return {w, width_to_wavelength(w, lambda0_nm)};
}

struct BackgroundWindow {
    double neg_lo{-200.0}, neg_hi{-180.0};
    double pos_lo{180.0}, pos_hi{200.0};
};

struct BackgroundEstimate {
    double mean{0.0};
    double stderr_{0.0};  // sample std over the window samples / √m
    BackgroundWindow window;
};

inline BackgroundEstimate estimate_background(const CorrelationTrace& trace,
                                              const BackgroundWindow& window = {}) {
    validate(trace);
    if (trace.tau.front() > window.neg_lo + 1e-9 || trace.tau.back() < window.pos_hi - 1e-9) {
        throw std::invalid_argument("estimate_background: trace does not cover the window");
    }
    double sum = 0.0, sumsq = 0.0;
    std::size_t m = 0, m_neg = 0, m_pos = 0;
    for (std::size_t i = 0; i < trace.tau.size(); ++i) {
        const double t = trace.tau[i];
        const bool in_neg = t >= window.neg_lo - 1e-9 && t <= window.neg_hi + 1e-9;
        const bool in_pos = t >= window.pos_lo - 1e-9 && t <= window.pos_hi + 1e-9;
        if (!in_neg && !in_pos) continue;
        sum += trace.value[i];
        sumsq += trace.value[i] * trace.value[i];
        ++m;
        if (in_neg) ++m_neg;
        if (in_pos) ++m_pos;
    }
    if (m_neg == 0 || m_pos == 0) {
        throw std::invalid_argument("estimate_background: no samples inside both window intervals");
    }
    BackgroundEstimate est;
    est.window = window;
    est.mean = sum / static_cast<double>(m);
    if (m > 1) {
        const double var =
            std::max(0.0, (sumsq - sum * sum / static_cast<double>(m)) / static_cast<double>(m - 1));
        est.stderr_ = std::sqrt(var / static_cast<double>(m));
    }
    return est;
}

struct SweepCurve {
    std::vector<double> sigma, value, stderr_;
};

inline SweepCurve fraction_curve(const std::vector<double>& sigmas) {
    SweepCurve c;
    for (const auto s : sigmas) {
        c.sigma.push_back(s);
        c.value.push_back(fraction_entangled(s));
        c.stderr_.push_back(0.0);
    }
    return c;
}

// τ grid holding just the two background windows; the engine's stepwise
// rotation cache makes this piecewise-uniform grid cheap.
inline std::vector<double> background_window_tau_grid() {
    std::vector<double> tau;
    for (int t = -200; t <= -180; ++t) tau.push_back(t);
    for (int t = 180; t <= 200; ++t) tau.push_back(t);
    return tau;
}

// Background level vs σ from the per-realization window statistics (exact
// standard errors; the 42 window samples of the mean trace are correlated
// within a realization, so the naive per-sample spread would understate them).
inline SweepCurve background_vs_sigma(const SpectralAmplitude& sa,
                                      const std::vector<double>& sigmas, long long n,
                                      std::uint64_t master_seed, int workers = 0) {
    const auto tau = background_window_tau_grid();
    SweepCurve c;
    for (const auto s : sigmas) {
        EnsembleConfig cfg;
        cfg.sigma = s;
        cfg.n_realizations = n;
        cfg.master_seed = master_seed;
        cfg.workers = workers;
        const auto [trace, stats] = run_ensemble(sa, cfg, tau);
        c.sigma.push_back(s);
        c.value.push_back(stats.window_mean);
        c.stderr_.push_back(stats.window_stderr);
    }
    return c;
}

// Background-subtracted peak at τ=0 normalized to the σ=0 peak.
inline SweepCurve peak_decay_curve(const SpectralAmplitude& sa,
                                   const std::vector<double>& sigmas, long long n,
                                   std::uint64_t master_seed, int workers = 0) {
    const auto tau = make_tau_grid(-200.0, 200.0, 1.0);
    std::size_t zero_idx = 0;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (std::abs(tau[i]) < 1e-12) zero_idx = i;
    }

    EnsembleConfig cfg0;
    cfg0.sigma = 0.0;
    cfg0.n_realizations = 1;
    cfg0.master_seed = master_seed;
    cfg0.workers = workers;
    const auto [trace0, stats0] = run_ensemble(sa, cfg0, tau);
    const double peak0 = trace0.value[zero_idx] - stats0.window_mean;

    SweepCurve c;
    for (const auto s : sigmas) {
        EnsembleConfig cfg;
        cfg.sigma = s;
        cfg.n_realizations = (s == 0.0) ? 1 : n;
        cfg.master_seed = master_seed;
        cfg.workers = workers;
        const auto [trace, stats] = run_ensemble(sa, cfg, tau);
        const double peak = trace.value[zero_idx] - stats.window_mean;
        c.sigma.push_back(s);
        c.value.push_back(peak / peak0);
        c.stderr_.push_back(
            std::hypot(trace.stderr_[zero_idx], stats.window_stderr) / peak0);
    }
    return c;
}

}  // namespace biphoton
