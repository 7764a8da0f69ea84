#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>

#include "biphoton/correlation.hpp"
#include "biphoton/grid.hpp"
#include "biphoton/shaper.hpp"
#include "biphoton/spectral.hpp"

namespace biphoton {

// Small-grid brute-force state. The pair state lives in the perfectly
// anticorrelated subspace {|Ω_k⟩_i |-Ω_k⟩_s, Ω_k > 0}, so an n_pos × n_pos
// matrix indexed by the positive bins captures everything.
struct DensityMatrix {
    FrequencyGrid grid;
    Eigen::MatrixXcd mat;
};

inline bool is_hermitian(const DensityMatrix& dm, double tol = 1e-12) {
    return (dm.mat - dm.mat.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline double trace_real(const DensityMatrix& dm) { return dm.mat.trace().real(); }

inline double min_eigenvalue(const DensityMatrix& dm) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dm.mat, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

inline double purity(const DensityMatrix& dm) {
    return (dm.mat * dm.mat).trace().real();
}

// Positive-bin amplitude vector of Λ, normalized to unit norm.
inline Eigen::VectorXcd normalized_pair_vector(const SpectralAmplitude& sa) {
    validate(sa);
    const int n = sa.grid.n_pos;
    Eigen::VectorXcd c(n);
    for (int k = 0; k < n; ++k) c(k) = sa.amp[sa.grid.positive_index(k)];
    const double nrm = c.norm();
    if (nrm == 0.0) throw std::invalid_argument("pair vector: all-zero spectral amplitude");
    return c / nrm;
}

// ρ^(q) = |Ψ⟩⟨Ψ| restricted to the pair subspace.
inline DensityMatrix pure_state(const SpectralAmplitude& sa) {
    DensityMatrix dm;
    dm.grid = sa.grid;
    const Eigen::VectorXcd c = normalized_pair_vector(sa);
    dm.mat = c * c.adjoint();
    return dm;
}

// ρ^(c): same populations p_k ∝ |Λ(Ω_k)|², no inter-frequency coherence.
inline DensityMatrix classical_state(const SpectralAmplitude& sa) {
    DensityMatrix dm;
    dm.grid = sa.grid;
    const Eigen::VectorXcd c = normalized_pair_vector(sa);
    dm.mat = c.cwiseAbs2().cast<std::complex<double>>().asDiagonal();
    return dm;
}

// Conjugation by the diagonal pair-profile operator D_kk = M(Ω_k)M(-Ω_k).
// Pure dephasers (|D|≡1) leave the trace alone; amplitude masks shrink it and
// the state is renormalized.
inline DensityMatrix apply_mask(const DensityMatrix& dm, const TransferFunction& m) {
    if (!dm.grid.same_as(m.grid)) throw std::invalid_argument("apply_mask: grid mismatch");
    const auto prof = pair_profile(m);
    const int n = dm.grid.n_pos;

    bool unit_modulus = true;
    for (const auto& p : prof) {
        if (std::abs(std::abs(p) - 1.0) > 1e-12) { unit_modulus = false; break; }
    }

    DensityMatrix out;
    out.grid = dm.grid;
    out.mat.resize(n, n);
    for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
            if (unit_modulus && k == l) {
                // pure dephasing is a diagonal conjugation: populations are
                // untouched, bit-exactly
                out.mat(k, l) = dm.mat(k, l);
            } else {
                out.mat(k, l) = prof[static_cast<std::size_t>(k)] * dm.mat(k, l) *
                                std::conj(prof[static_cast<std::size_t>(l)]);
            }
        }
    }
    if (!unit_modulus) {
        const double tr = out.mat.trace().real();
        if (tr <= 0.0) {
            throw std::invalid_argument("apply_mask: mask annihilates the state");
        }
        out.mat /= tr;
    }
    return out;
}

// State-vector variant: c_k -> D_kk c_k, renormalized for amplitude masks.
inline Eigen::VectorXcd apply_mask(const Eigen::VectorXcd& c, const TransferFunction& m) {
    const auto prof = pair_profile(m);
    if (c.size() != static_cast<Eigen::Index>(prof.size())) {
        throw std::invalid_argument("apply_mask: vector/grid size mismatch");
    }
    Eigen::VectorXcd out(c.size());
    for (Eigen::Index k = 0; k < c.size(); ++k) {
        out(k) = c(k) * prof[static_cast<std::size_t>(k)];
    }
    const double nrm = out.norm();
    if (nrm == 0.0) throw std::invalid_argument("apply_mask: mask annihilates the state");
    if (std::abs(nrm - 1.0) > 1e-12) out /= nrm;
    return out;
}

// Equal-weight mixture of dephased pure states, realization j seeded with
// derive_seed(master_seed, j).
inline DensityMatrix ensemble_average(const SpectralAmplitude& sa, double sigma,
                                      long long n, std::uint64_t master_seed) {
    if (n < 1) throw std::invalid_argument("ensemble_average: n must be >= 1");
    if (sigma < 0.0) throw std::invalid_argument("ensemble_average: sigma must be >= 0");

    const DensityMatrix rho_q = pure_state(sa);
    if (sigma == 0.0) return rho_q;  // every realization is the pure state

    // every realization multiplies entry (k,l) by e^{i(phi_k - phi_l)}, so the
    // average factors into rho_q and the mean phase matrix; the diagonal phase
    // factor is identically one, which keeps the populations bit-exact for
    // every n and sigma
    const int npos = sa.grid.n_pos;
    Eigen::MatrixXcd phase_mean = Eigen::MatrixXcd::Zero(npos, npos);
    Eigen::VectorXcd d(npos);
    for (long long j = 0; j < n; ++j) {
        const PhaseRealization pr =
            make_phase_realization(sigma, derive_seed(master_seed, static_cast<std::uint64_t>(j)), sa.grid);
        for (int k = 0; k < npos; ++k) {
            const double ph = pr.phases[static_cast<std::size_t>(k)];
            d(k) = std::complex<double>(std::cos(ph), std::sin(ph));
        }
        for (int k = 0; k < npos; ++k) {
            for (int l = 0; l < npos; ++l) {
                if (k != l) phase_mean(k, l) += d(k) * std::conj(d(l));
            }
        }
    }
    DensityMatrix out;
    out.grid = sa.grid;
    out.mat = rho_q.mat;
    for (int k = 0; k < npos; ++k) {
        for (int l = 0; l < npos; ++l) {
            if (k != l) out.mat(k, l) *= phase_mean(k, l) / static_cast<double>(n);
        }
    }
    return out;
}

// Fraction of the pure entangled component in the dephased mixture: e^{-σ²}.
inline double fraction_entangled(double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("fraction_entangled: sigma must be >= 0");
    return std::exp(-sigma * sigma);
}

// ρ = e^{-σ²} ρ^(q) + (1 - e^{-σ²}) ρ^(c), the N→∞ prediction.
inline DensityMatrix predicted_mixture(double sigma, const SpectralAmplitude& sa) {
    const double f = fraction_entangled(sigma);
    DensityMatrix out = pure_state(sa);
    const DensityMatrix rho_c = classical_state(sa);
    out.mat = f * out.mat + (1.0 - f) * rho_c.mat;
    return out;
}

inline double matrix_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.mat.rows() != b.mat.rows() || a.mat.cols() != b.mat.cols()) {
        throw std::invalid_argument("matrix_distance: shape mismatch");
    }
    return (a.mat - b.mat).norm();  // Frobenius
}

// Oracle for the measured signal: S(τ) = Tr[ρ E(τ)] with the measurement
// operator implied by the delay/sine masks,
//   E(τ) = 4 ΔΩ² N_c (u u† - v v†),  u_k = e^{-iΩ_k τ},  v_k = sin(Ω_k τ),
// where N_c = Σ_k |Λ(Ω_k)|² over positive bins restores the Hz scale that the
// trace-1 normalization of ρ divides out.
inline double expected_signal(const DensityMatrix& dm, const SpectralAmplitude& sa,
                              double tau) {
    if (!dm.grid.same_as(sa.grid)) throw std::invalid_argument("expected_signal: grid mismatch");
    const int n = dm.grid.n_pos;
    double nc = 0.0;
    for (int k = 0; k < n; ++k) nc += std::norm(sa.amp[sa.grid.positive_index(k)]);

    Eigen::VectorXcd u(n), v(n);
    for (int k = 0; k < n; ++k) {
        const double w = dm.grid.positive_value(k);
        u(k) = std::complex<double>(std::cos(w * tau), -std::sin(w * tau));
        v(k) = std::complex<double>(std::sin(w * tau), 0.0);
    }
    const double qa = (u.adjoint() * dm.mat * u).real()(0, 0);
    const double qb = (v.adjoint() * dm.mat * v).real()(0, 0);
    const double d = dm.grid.bin_width;
    return 4.0 * d * d * nc * (qa - qb);
}

}  // namespace biphoton
