#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "biphoton/grid.hpp"
#include "biphoton/random.hpp"

namespace biphoton {

// Passive spectral mask M(Ω) on a grid (SLM action): |M| <= 1 everywhere.
struct TransferFunction {
    FrequencyGrid grid;
    std::vector<std::complex<double>> mask;  // one per bin
};

inline void validate(const TransferFunction& tf) {
    if (tf.mask.size() != tf.grid.size()) {
        throw std::invalid_argument("TransferFunction: mask size does not match grid");
    }
    for (const auto& m : tf.mask) {
        if (!std::isfinite(m.real()) || !std::isfinite(m.imag())) {
            throw std::invalid_argument("TransferFunction: non-finite mask value");
        }
        if (std::abs(m) > 1.0 + 1e-12) {
            throw std::invalid_argument("TransferFunction: |mask| exceeds 1 (passive SLM)");
        }
    }
}

inline TransferFunction identity_mask(const FrequencyGrid& grid) {
    TransferFunction tf;
    tf.grid = grid;
    tf.mask.assign(grid.size(), {1.0, 0.0});
    return tf;
}

// Delay-scan mask: e^{-iΩτ/2} on Ω<0, e^{+iΩτ/2} on Ω>0. Pure phase; the pair
// product M_a(Ω)M_a(-Ω) = e^{i|Ω|τ} realizes the τ scan of the first signal.
inline TransferFunction ma_mask(double tau, const FrequencyGrid& grid) {
    TransferFunction tf;
    tf.grid = grid;
    tf.mask.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double w = grid.values[i];
        const double ph = (w < 0.0 ? -w : w) * tau * 0.5;  // |Ω|τ/2
        tf.mask[i] = {std::cos(ph), std::sin(ph)};
    }
    return tf;
}

// Sine mask: 1 on Ω<0, sin(Ωτ) on Ω>0. Pair product sin(|Ω|τ); this is the
// amplitude mask behind the subtracted signal.
inline TransferFunction mb_mask(double tau, const FrequencyGrid& grid) {
    TransferFunction tf;
    tf.grid = grid;
    tf.mask.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double w = grid.values[i];
        tf.mask[i] = (w < 0.0) ? std::complex<double>{1.0, 0.0}
                               : std::complex<double>{std::sin(w * tau), 0.0};
    }
    return tf;
}

// One random phase φ(Ω_k) ~ N(0, σ²) per positive-frequency bin (one SLM pixel
// per bin). Bit-reproducible from (seed, grid, sigma).
struct PhaseRealization {
    double sigma{0.0};
    std::uint64_t seed{0};
    std::vector<double> phases;  // rad, one per Ω>0 bin
};

inline PhaseRealization make_phase_realization(double sigma, std::uint64_t seed,
                                               const FrequencyGrid& grid) {
    if (sigma < 0.0) {
        throw std::invalid_argument("make_phase_realization: sigma must be >= 0");
    }
    PhaseRealization pr;
    pr.sigma = sigma;
    pr.seed = seed;
    pr.phases.resize(static_cast<std::size_t>(grid.n_pos));
    GaussianStream gs(seed);
    for (auto& p : pr.phases) p = sigma * gs.next();
    return pr;
}

// Dephasing mask: unit transmission with zero phase on Ω<0, e^{iφ(Ω)} on Ω>0.
// The pair product is e^{iφ(|Ω|)}, so the ensemble correlator between distinct
// |Ω| bins decays as e^{-σ²} while equal-|Ω| terms stay exactly 1.
inline TransferFunction random_dephaser(double sigma, std::uint64_t seed,
                                        const FrequencyGrid& grid) {
    const PhaseRealization pr = make_phase_realization(sigma, seed, grid);
    TransferFunction tf;
    tf.grid = grid;
    tf.mask.resize(grid.size());
    for (int k = 0; k < grid.n_pos; ++k) {
        const double ph = pr.phases[static_cast<std::size_t>(k)];
        tf.mask[grid.positive_index(k)] = {std::cos(ph), std::sin(ph)};
        tf.mask[grid.mirror_index(grid.positive_index(k))] = {1.0, 0.0};
    }
    return tf;
}

// Pointwise product of two masks on the same grid.
inline TransferFunction compose(const TransferFunction& m1, const TransferFunction& m2) {
    if (!m1.grid.same_as(m2.grid)) {
        throw std::invalid_argument("compose: grid mismatch");
    }
    TransferFunction tf;
    tf.grid = m1.grid;
    tf.mask.resize(m1.mask.size());
    for (std::size_t i = 0; i < m1.mask.size(); ++i) {
        tf.mask[i] = m1.mask[i] * m2.mask[i];
    }
    return tf;
}

// Pair-phase profile M(Ω)M(-Ω), one value per Ω>0 bin. This product is the
// only way a mask acts on the anticorrelated pair amplitude, so it depends on
// |Ω| by construction.
inline std::vector<std::complex<double>> pair_profile(const TransferFunction& tf) {
    std::vector<std::complex<double>> prof(static_cast<std::size_t>(tf.grid.n_pos));
    for (int k = 0; k < tf.grid.n_pos; ++k) {
        const std::size_t ip = tf.grid.positive_index(k);
        prof[static_cast<std::size_t>(k)] = tf.mask[ip] * tf.mask[tf.grid.mirror_index(ip)];
    }
    return prof;
}

}  // namespace biphoton
