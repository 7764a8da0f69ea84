#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "biphoton/grid.hpp"

namespace biphoton {

inline constexpr double kSpeedOfLightNmPerFs = 299.792458;

// Joint spectral amplitude Λ(Ω) sampled on a FrequencyGrid. Λ carries units of
// sqrt(Hz)/(rad/fs) so that |Σ Λ ΔΩ|² is a count rate in Hz.
struct SpectralAmplitude {
    FrequencyGrid grid;
    std::vector<std::complex<double>> amp;  // one per bin
    std::string label;
    bool symmetric{false};  // promises Λ(Ω) = Λ(-Ω)
};

inline double max_abs(const SpectralAmplitude& sa) {
    double m = 0.0;
    for (const auto& a : sa.amp) m = std::max(m, std::abs(a));
    return m;
}

inline void validate(const SpectralAmplitude& sa) {
    if (sa.amp.size() != sa.grid.size()) {
        throw std::invalid_argument("SpectralAmplitude: amp size does not match grid");
    }
    for (const auto& a : sa.amp) {
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
            throw std::invalid_argument("SpectralAmplitude: non-finite amplitude");
        }
    }
    if (sa.symmetric) {
        const double tol = 1e-12 * max_abs(sa);
        for (std::size_t i = 0; i < sa.amp.size(); ++i) {
            if (std::abs(sa.amp[i] - sa.amp[sa.grid.mirror_index(i)]) > tol) {
                throw std::invalid_argument("SpectralAmplitude: symmetric flag violated");
            }
        }
    }
}

// Double-Gaussian biphoton amplitude
//   Λ(Ω) = c · [ exp(-(Ω-μ)²/2σ′²) + exp(-(Ω+μ)²/2σ′²) ],
// the standard two-humped approximation of the effectively up-converted SPDC
// spectrum. c is fixed on the given grid so that the noiseless signal peak
// S(τ=0) = |Σ_k Λ(Ω_k) ΔΩ|² equals B exactly; simulated traces then share the
// Hz axis of the fitted count rates. In the continuum limit
// |FT[Λ](τ)|² ∝ cos²(μτ)·exp(-σ′²τ²).
inline SpectralAmplitude double_gaussian(double B_hz, double mu, double sigma_p,
                                         const FrequencyGrid& grid) {
    if (!(B_hz > 0.0)) throw std::invalid_argument("double_gaussian: B must be positive");
    if (!(sigma_p > 0.0)) throw std::invalid_argument("double_gaussian: sigma_p must be positive");
    if (mu < 0.0) throw std::invalid_argument("double_gaussian: mu must be >= 0");

    SpectralAmplitude sa;
    sa.grid = grid;
    sa.amp.resize(grid.size());
    sa.label = "double_gaussian";
    sa.symmetric = true;

    const int n = grid.n_pos;
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
        const double w = grid.positive_value(k);
        const double dm = (w - mu) / sigma_p;
        const double dp = (w + mu) / sigma_p;
        const double v = std::exp(-0.5 * dm * dm) + std::exp(-0.5 * dp * dp);
        sa.amp[grid.positive_index(k)] = v;
        total += v;
    }
    // mirror bins copied exactly so the symmetry check holds bin-exact
    for (int k = 0; k < n; ++k) {
        sa.amp[grid.mirror_index(grid.positive_index(k))] = sa.amp[grid.positive_index(k)];
    }
    const double c = std::sqrt(B_hz) / (2.0 * total * grid.bin_width);
    for (auto& a : sa.amp) a *= c;
    return sa;
}

struct TemporalAmplitude {
    std::vector<double> tau;                 // fs
    std::vector<std::complex<double>> amp;
};

// Time-basis amplitude by Riemann sum with the e^{+iΩτ} convention:
//   Λ̂(τ) = Σ_k Λ(Ω_k) e^{+iΩ_k τ} ΔΩ.
// On the conjugate grid from conjugate_tau_grid() the discrete Parseval
// identity Σ_τ |Λ̂|² Δτ = 2π Σ_k |Λ|² ΔΩ holds to rounding.
inline TemporalAmplitude fourier_to_time(const SpectralAmplitude& sa,
                                         const std::vector<double>& tau_grid) {
    validate(sa);
    TemporalAmplitude out;
    out.tau = tau_grid;
    out.amp.resize(tau_grid.size());
    for (std::size_t t = 0; t < tau_grid.size(); ++t) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t i = 0; i < sa.grid.size(); ++i) {
            const double ph = sa.grid.values[i] * tau_grid[t];
            acc += sa.amp[i] * std::complex<double>(std::cos(ph), std::sin(ph));
        }
        out.amp[t] = acc * sa.grid.bin_width;
    }
    return out;
}

// τ grid conjugate to the frequency grid: 2·n_pos samples, Δτ = π/omega_max,
// spanning one full alias period. Exact Parseval partner of fourier_to_time.
inline std::vector<double> conjugate_tau_grid(const FrequencyGrid& g) {
    const double dtau = std::numbers::pi / g.omega_max;
    std::vector<double> tau(2 * static_cast<std::size_t>(g.n_pos));
    for (int m = -g.n_pos; m < g.n_pos; ++m) {
        tau[static_cast<std::size_t>(m + g.n_pos)] = m * dtau;
    }
    return tau;
}

// Spectral width in wavelength at carrier λ₀:  Δλ = λ₀²·Δω / (2πc).
inline double width_to_wavelength(double width_rad_per_fs, double lambda0_nm) {
    if (width_rad_per_fs < 0.0) {
        throw std::invalid_argument("width_to_wavelength: width must be >= 0");
    }
    if (!(lambda0_nm > 0.0)) {
        throw std::invalid_argument("width_to_wavelength: lambda0 must be positive");
    }
    return lambda0_nm * lambda0_nm * width_rad_per_fs /
           (2.0 * std::numbers::pi * kSpeedOfLightNmPerFs);
}

}  // namespace biphoton
