#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "biphoton/grid.hpp"
#include "biphoton/shaper.hpp"
#include "biphoton/spectral.hpp"

namespace biphoton {

enum class TraceKind { Direct, Split, MeasuredSim };

inline std::string to_string(TraceKind k) {
    switch (k) {
        case TraceKind::Direct: return "direct";
        case TraceKind::Split: return "split";
        case TraceKind::MeasuredSim: return "measured-sim";
    }
    return "unknown";
}

struct TraceMeta {
    double sigma{0.0};
    long long n_realizations{1};
    std::uint64_t seed{0};
    TraceKind kind{TraceKind::Direct};
    bool poissonized{false};
    long long clipped_points{0};  // rates clipped to zero during Poisson synthesis
};

// Sampled signal S(τ) with per-point uncertainty (0 when noiseless).
struct CorrelationTrace {
    std::vector<double> tau;     // fs, strictly increasing
    std::vector<double> value;   // Hz
    std::vector<double> stderr_; // Hz
    TraceMeta meta;
};

inline void validate(const CorrelationTrace& tr) {
    if (tr.value.size() != tr.tau.size() || tr.stderr_.size() != tr.tau.size()) {
        throw std::invalid_argument("CorrelationTrace: column size mismatch");
    }
    for (std::size_t i = 0; i < tr.tau.size(); ++i) {
        if (i > 0 && !(tr.tau[i] > tr.tau[i - 1])) {
            throw std::invalid_argument("CorrelationTrace: tau not strictly increasing");
        }
        if (!std::isfinite(tr.value[i]) || tr.stderr_[i] < 0.0) {
            throw std::invalid_argument("CorrelationTrace: bad value/stderr");
        }
    }
}

// ------------------------------ signal forms --------------------------------
//
// The detector responds to the coherent sum of all pair amplitudes:
//   S[M] = | Σ_k Λ(Ω_k) · M(Ω_k)M(-Ω_k) · ΔΩ |²  over the full grid,
// with all τ dependence carried by the masks. The subtracted signal uses the
// half-line sum raw value and the literal factor 4 in front of it, which for
// symmetric Λ makes S_a - 4·S_b_raw equal the direct form bin-exactly.

// G²(τ) = |Σ_k Λ(Ω_k) e^{iΩ_k τ} ΔΩ|², the direct full-line form.
inline double g2_direct(const SpectralAmplitude& sa, double tau) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = 0; i < sa.grid.size(); ++i) {
        const double ph = sa.grid.values[i] * tau;
        acc += sa.amp[i] * std::complex<double>(std::cos(ph), std::sin(ph));
    }
    acc *= sa.grid.bin_width;
    return std::norm(acc);
}

// Rate measured with a total mask applied: full-line sum over pair terms.
inline double signal_one_realization(const SpectralAmplitude& sa,
                                     const TransferFunction& m_total) {
    if (!sa.grid.same_as(m_total.grid)) {
        throw std::invalid_argument("signal_one_realization: grid mismatch");
    }
    const auto prof = pair_profile(m_total);
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = 0; i < sa.grid.size(); ++i) {
        const std::size_t k = sa.grid.positive_partner(i) - static_cast<std::size_t>(sa.grid.n_pos);
        acc += sa.amp[i] * prof[k];
    }
    acc *= sa.grid.bin_width;
    return std::norm(acc);
}

// Raw half-line variant |Σ_{Ω>0} Λ·M(Ω)M(-Ω)·ΔΩ|², the quantity that enters
// the subtraction with its factor 4.
inline double signal_positive_half(const SpectralAmplitude& sa,
                                   const TransferFunction& m_total) {
    if (!sa.grid.same_as(m_total.grid)) {
        throw std::invalid_argument("signal_positive_half: grid mismatch");
    }
    const auto prof = pair_profile(m_total);
    std::complex<double> acc{0.0, 0.0};
    for (int k = 0; k < sa.grid.n_pos; ++k) {
        acc += sa.amp[sa.grid.positive_index(k)] * prof[static_cast<std::size_t>(k)];
    }
    acc *= sa.grid.bin_width;
    return std::norm(acc);
}

// Experimentally decomposed form S_a - 4·S_b_raw, with the delay mask and the
// sine mask each multiplied by an optional dephaser. For symmetric Λ and
// identity dephaser this reproduces g2_direct at every τ.
inline double g2_split(const SpectralAmplitude& sa, double tau,
                       const TransferFunction* m_random = nullptr) {
    if (!sa.symmetric) {
        throw std::invalid_argument("g2_split: requires a symmetric spectral amplitude");
    }
    validate(sa);
    TransferFunction ma = ma_mask(tau, sa.grid);
    TransferFunction mb = mb_mask(tau, sa.grid);
    if (m_random != nullptr) {
        ma = compose(*m_random, ma);
        mb = compose(*m_random, mb);
    }
    const double s_a = signal_one_realization(sa, ma);
    const double s_b_raw = signal_positive_half(sa, mb);
    return s_a - 4.0 * s_b_raw;
}

// Empirical fit model S(τ, σ=0) = B·cos(μτ)·e^{-σ′²τ²/2}, evaluated verbatim.
// Used as the fitting model only; the simulated traces follow the squared
// forms above (see the analysis module notes).
inline double analytic_sigma0(double B_hz, double mu, double sigma_p, double tau) {
    return B_hz * std::cos(mu * tau) * std::exp(-0.5 * sigma_p * sigma_p * tau * tau);
}

// ------------------------------ trace builders ------------------------------

inline CorrelationTrace g2_direct_trace(const SpectralAmplitude& sa,
                                        const std::vector<double>& tau_grid) {
    validate(sa);
    CorrelationTrace tr;
    tr.tau = tau_grid;
    tr.value.resize(tau_grid.size());
    tr.stderr_.assign(tau_grid.size(), 0.0);
    for (std::size_t t = 0; t < tau_grid.size(); ++t) {
        tr.value[t] = g2_direct(sa, tau_grid[t]);
    }
    tr.meta.kind = TraceKind::Direct;
    validate(tr);
    return tr;
}

inline CorrelationTrace analytic_sigma0_trace(double B_hz, double mu, double sigma_p,
                                              const std::vector<double>& tau_grid) {
    CorrelationTrace tr;
    tr.tau = tau_grid;
    tr.value.resize(tau_grid.size());
    tr.stderr_.assign(tau_grid.size(), 0.0);
    for (std::size_t t = 0; t < tau_grid.size(); ++t) {
        tr.value[t] = analytic_sigma0(B_hz, mu, sigma_p, tau_grid[t]);
    }
    tr.meta.kind = TraceKind::Split;
    return tr;
}

// Uniform τ grid [min, max] with the given step.
inline std::vector<double> make_tau_grid(double tau_min, double tau_max, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("make_tau_grid: step must be positive");
    if (!(tau_max > tau_min)) throw std::invalid_argument("make_tau_grid: max must exceed min");
    const double span = (tau_max - tau_min) / step;
    const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
    if (count > 20'000'000) throw std::invalid_argument("make_tau_grid: grid too large");
    std::vector<double> tau(count);
    for (std::size_t i = 0; i < count; ++i) tau[i] = tau_min + static_cast<double>(i) * step;
    return tau;
}

inline std::vector<double> default_tau_grid() { return make_tau_grid(-250.0, 250.0, 1.0); }

}  // namespace biphoton
