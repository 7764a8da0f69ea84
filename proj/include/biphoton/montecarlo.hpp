#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "biphoton/correlation.hpp"
#include "biphoton/random.hpp"
#include "biphoton/shaper.hpp"
#include "biphoton/spectral.hpp"

namespace biphoton {

struct EnsembleConfig {
    long long n_realizations{10000};
    double sigma{0.0};                 // dephasing std deviation, rad
    std::uint64_t master_seed{kDefaultMasterSeed};
    double acquisition_time_s{1.0};    // Poisson synthesis
    double dark_rate_hz{0.0};
    int workers{0};                    // 0 = hardware concurrency
};

struct RunStats {
    long long n_effective{0};
    double wall_time_s{0.0};
    // statistics of the per-realization mean over the background window
    // |τ| in [180, 200] fs, when the τ grid covers it
    bool has_window{false};
    double window_mean{0.0};
    double window_stderr{0.0};
    // per-point deviation from the window mean, S_j(τ_i) - w_j, averaged over
    // realizations with its own standard error. Unlike the naive spread of the
    // mean trace these errors account for the correlation between a window
    // sample and the window mean, so flatness can be tested point by point.
    std::vector<std::size_t> window_indices;
    std::vector<double> window_dev_mean;
    std::vector<double> window_dev_stderr;
};

namespace detail {

// Per-realization scan state: z_k = Λ(Ω_k) e^{iφ_k} over positive bins, and
// S(τ) = 4ΔΩ²(|Σ_k z_k e^{iΩ_k τ}|² - |Σ_k z_k sin(Ω_k τ)|²).
// τ steps reuse a cached rotation e^{iΩ_k Δτ} per distinct step size, so both
// uniform grids and piecewise-uniform grids (e.g. the two background windows)
// run on the recurrence instead of per-sample sincos.
struct ScanPlan {
    std::vector<double> omega;                    // positive detunings
    std::vector<std::complex<double>> lam;        // Λ at positive bins
    std::vector<double> tau;
    double prefactor{0.0};                        // 4ΔΩ²
    std::vector<std::size_t> window_idx;          // |τ| in [180,200]

    ScanPlan(const SpectralAmplitude& sa, const std::vector<double>& tau_grid) {
        const auto& g = sa.grid;
        const int n = g.n_pos;
        omega.resize(static_cast<std::size_t>(n));
        lam.resize(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
            omega[static_cast<std::size_t>(k)] = g.positive_value(k);
            lam[static_cast<std::size_t>(k)] = sa.amp[g.positive_index(k)];
        }
        tau = tau_grid;
        prefactor = 4.0 * g.bin_width * g.bin_width;
        for (std::size_t t = 0; t < tau.size(); ++t) {
            const double a = std::abs(tau[t]);
            if (a >= 180.0 - 1e-9 && a <= 200.0 + 1e-9) window_idx.push_back(t);
        }
    }
};

class RealizationScanner {
public:
    explicit RealizationScanner(const ScanPlan& plan) : plan_(plan) {
        const std::size_t n = plan.omega.size();
        z_.resize(n);
        r_.resize(n);
        // rotation cache: one entry per distinct τ step in the grid
        double prev = 0.0;
        bool have_prev = false;
        for (std::size_t t = 1; t < plan.tau.size(); ++t) {
            const double d = plan.tau[t] - plan.tau[t - 1];
            if (!have_prev || d != prev) {
                if (find_rotation(d) == rot_cache_.size()) {
                    std::vector<std::complex<double>> rot(n);
                    for (std::size_t k = 0; k < n; ++k) {
                        const double ph = plan.omega[k] * d;
                        rot[k] = {std::cos(ph), std::sin(ph)};
                    }
                    rot_steps_.push_back(d);
                    rot_cache_.push_back(std::move(rot));
                }
                prev = d;
                have_prev = true;
            }
        }
    }

    // fills out[t] with S(τ_t) for the realization seeded with `seed`
    void scan(double sigma, std::uint64_t seed, std::vector<double>& out) {
        const std::size_t n = plan_.omega.size();
        GaussianStream gs(seed);
        for (std::size_t k = 0; k < n; ++k) {
            const double ph = sigma * gs.next();
            z_[k] = plan_.lam[k] * std::complex<double>(std::cos(ph), std::sin(ph));
        }
        out.resize(plan_.tau.size());
        for (std::size_t t = 0; t < plan_.tau.size(); ++t) {
            if (t == 0) {
                for (std::size_t k = 0; k < n; ++k) {
                    const double ph = plan_.omega[k] * plan_.tau[0];
                    r_[k] = {std::cos(ph), std::sin(ph)};
                }
            } else {
                const auto& rot = rot_cache_[find_rotation(plan_.tau[t] - plan_.tau[t - 1])];
                for (std::size_t k = 0; k < n; ++k) r_[k] *= rot[k];
            }
            double ar = 0.0, ai = 0.0, br = 0.0, bi = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double zr = z_[k].real(), zi = z_[k].imag();
                const double rr = r_[k].real(), ri = r_[k].imag();
                ar += zr * rr - zi * ri;
                ai += zr * ri + zi * rr;
                br += zr * ri;  // z_k · Im(r_k) = z_k · sin(Ω_k τ)
                bi += zi * ri;
            }
            out[t] = plan_.prefactor * ((ar * ar + ai * ai) - (br * br + bi * bi));
        }
    }

private:
    std::size_t find_rotation(double d) const {
        for (std::size_t i = 0; i < rot_steps_.size(); ++i) {
            if (rot_steps_[i] == d) return i;
        }
        return rot_cache_.size();
    }

    const ScanPlan& plan_;
    std::vector<std::complex<double>> z_, r_;
    std::vector<double> rot_steps_;
    std::vector<std::vector<std::complex<double>>> rot_cache_;
};

struct BlockSums {
    std::vector<double> sum, sumsq;
    std::vector<double> dev_sum, dev_sumsq;  // window points only
    double wsum{0.0}, wsumsq{0.0};
};

}  // namespace detail

// Ensemble-averaged S(τ) over n dephasing realizations. Realization j is
// seeded with derive_seed(master_seed, j); blocks of consecutive realizations
// are summed in index order and merged in block order, so the result is
// bit-identical for any worker count.
inline std::pair<CorrelationTrace, RunStats>
run_ensemble(const SpectralAmplitude& sa, const EnsembleConfig& cfg,
             const std::vector<double>& tau_grid) {
    validate(sa);
    if (!sa.symmetric) {
        throw std::invalid_argument("run_ensemble: spectral amplitude must be symmetric");
    }
    if (cfg.n_realizations < 1) {
        throw std::invalid_argument("run_ensemble: n_realizations must be >= 1");
    }
    if (cfg.sigma < 0.0) throw std::invalid_argument("run_ensemble: sigma must be >= 0");
    if (tau_grid.empty()) throw std::invalid_argument("run_ensemble: empty tau grid");
    for (std::size_t i = 1; i < tau_grid.size(); ++i) {
        if (!(tau_grid[i] > tau_grid[i - 1])) {
            throw std::invalid_argument("run_ensemble: tau grid must be strictly increasing");
        }
    }

    const auto t_start = std::chrono::steady_clock::now();
    const detail::ScanPlan plan(sa, tau_grid);
    const std::size_t T = tau_grid.size();

    CorrelationTrace trace;
    trace.tau = tau_grid;
    trace.value.assign(T, 0.0);
    trace.stderr_.assign(T, 0.0);
    trace.meta.sigma = cfg.sigma;
    trace.meta.n_realizations = cfg.n_realizations;
    trace.meta.seed = cfg.master_seed;
    trace.meta.kind = (cfg.sigma == 0.0) ? TraceKind::Direct : TraceKind::MeasuredSim;

    RunStats stats;
    stats.has_window = !plan.window_idx.empty();

    if (cfg.sigma == 0.0) {
        // no randomness: every realization is the same deterministic trace
        detail::RealizationScanner scanner(plan);
        scanner.scan(0.0, derive_seed(cfg.master_seed, 0), trace.value);
        stats.n_effective = 1;
        if (stats.has_window) {
            double acc = 0.0;
            for (const auto t : plan.window_idx) acc += trace.value[t];
            stats.window_mean = acc / static_cast<double>(plan.window_idx.size());
            stats.window_indices = plan.window_idx;
            for (const auto t : plan.window_idx) {
                stats.window_dev_mean.push_back(trace.value[t] - stats.window_mean);
                stats.window_dev_stderr.push_back(0.0);
            }
        }
    } else {
        const long long n = cfg.n_realizations;
        const long long block_size = std::max<long long>(64, (n + 2047) / 2048);
        const long long n_blocks = (n + block_size - 1) / block_size;

        std::vector<detail::BlockSums> blocks(static_cast<std::size_t>(n_blocks));
        std::atomic<long long> next_block{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;

        int workers = cfg.workers > 0
                          ? cfg.workers
                          : static_cast<int>(std::thread::hardware_concurrency());
        if (workers < 1) workers = 1;
        workers = static_cast<int>(std::min<long long>(workers, n_blocks));

        auto work = [&]() {
            try {
                detail::RealizationScanner scanner(plan);
                std::vector<double> s;
                for (;;) {
                    const long long b = next_block.fetch_add(1);
                    if (b >= n_blocks) break;
                    detail::BlockSums bs;
                    bs.sum.assign(T, 0.0);
                    bs.sumsq.assign(T, 0.0);
                    const std::size_t nw = plan.window_idx.size();
                    bs.dev_sum.assign(nw, 0.0);
                    bs.dev_sumsq.assign(nw, 0.0);
                    const long long j_end = std::min(n, (b + 1) * block_size);
                    for (long long j = b * block_size; j < j_end; ++j) {
                        scanner.scan(cfg.sigma,
                                     derive_seed(cfg.master_seed, static_cast<std::uint64_t>(j)), s);
                        for (std::size_t t = 0; t < T; ++t) {
                            bs.sum[t] += s[t];
                            bs.sumsq[t] += s[t] * s[t];
                        }
                        if (nw != 0) {
                            double acc = 0.0;
                            for (const auto t : plan.window_idx) acc += s[t];
                            const double w = acc / static_cast<double>(nw);
                            bs.wsum += w;
                            bs.wsumsq += w * w;
                            for (std::size_t i = 0; i < nw; ++i) {
                                const double dev = s[plan.window_idx[i]] - w;
                                bs.dev_sum[i] += dev;
                                bs.dev_sumsq[i] += dev * dev;
                            }
                        }
                    }
                    blocks[static_cast<std::size_t>(b)] = std::move(bs);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        };

        if (workers == 1) {
            work();
        } else {
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(workers));
            for (int w = 0; w < workers; ++w) pool.emplace_back(work);
            for (auto& th : pool) th.join();
        }
        if (failure) std::rethrow_exception(failure);

        // fixed-order merge (block 0, 1, 2, ...) keeps the reduction bit-exact
        const std::size_t nw = plan.window_idx.size();
        std::vector<double> sum(T, 0.0), sumsq(T, 0.0);
        std::vector<double> dev_sum(nw, 0.0), dev_sumsq(nw, 0.0);
        double wsum = 0.0, wsumsq = 0.0;
        for (const auto& bs : blocks) {
            for (std::size_t t = 0; t < T; ++t) {
                sum[t] += bs.sum[t];
                sumsq[t] += bs.sumsq[t];
            }
            for (std::size_t i = 0; i < nw; ++i) {
                dev_sum[i] += bs.dev_sum[i];
                dev_sumsq[i] += bs.dev_sumsq[i];
            }
            wsum += bs.wsum;
            wsumsq += bs.wsumsq;
        }

        const double dn = static_cast<double>(n);
        auto mean_stderr = [dn, n](double s1, double s2) {
            const double var = (n > 1) ? std::max(0.0, (s2 - s1 * s1 / dn) / (dn - 1.0)) : 0.0;
            return std::sqrt(var / dn);
        };
        for (std::size_t t = 0; t < T; ++t) {
            trace.value[t] = sum[t] / dn;
            trace.stderr_[t] = mean_stderr(sum[t], sumsq[t]);
        }
        stats.n_effective = n;
        if (stats.has_window) {
            stats.window_mean = wsum / dn;
            stats.window_stderr = mean_stderr(wsum, wsumsq);
            stats.window_indices = plan.window_idx;
            stats.window_dev_mean.resize(nw);
            stats.window_dev_stderr.resize(nw);
            for (std::size_t i = 0; i < nw; ++i) {
                stats.window_dev_mean[i] = dev_sum[i] / dn;
                stats.window_dev_stderr[i] = mean_stderr(dev_sum[i], dev_sumsq[i]);
            }
        }
    }

    stats.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return {std::move(trace), stats};
}

inline CorrelationTrace trace_scan(const SpectralAmplitude& sa, double sigma,
                                   long long n_realizations, std::uint64_t master_seed,
                                   const std::vector<double>& tau_grid, int workers = 0) {
    EnsembleConfig cfg;
    cfg.n_realizations = n_realizations;
    cfg.sigma = sigma;
    cfg.master_seed = master_seed;
    cfg.workers = workers;
    return run_ensemble(sa, cfg, tau_grid).first;
}

// Emulates a dark-count-subtracted measurement: each point is replaced by
// Poisson counts of rate (value + dark)·T, reported as counts/T - dark with
// stderr √counts/T. Negative expected rates are clipped to zero and counted
// in meta.clipped_points.
inline CorrelationTrace poissonize(const CorrelationTrace& trace, double acquisition_time_s,
                                   double dark_rate_hz, std::uint64_t seed) {
    if (!(acquisition_time_s > 0.0)) {
        throw std::invalid_argument("poissonize: acquisition_time must be positive");
    }
    if (dark_rate_hz < 0.0) throw std::invalid_argument("poissonize: dark_rate must be >= 0");

    CorrelationTrace out = trace;
    long long clipped = 0;
    for (std::size_t i = 0; i < trace.tau.size(); ++i) {
        double rate = trace.value[i] + dark_rate_hz;
        if (rate < 0.0) {
            rate = 0.0;
            ++clipped;
        }
        SplitMix64 eng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        const auto counts = poisson_sample(rate * acquisition_time_s, eng);
        out.value[i] = static_cast<double>(counts) / acquisition_time_s - dark_rate_hz;
        out.stderr_[i] = std::sqrt(static_cast<double>(counts)) / acquisition_time_s;
    }
    out.meta.poissonized = true;
    out.meta.clipped_points = clipped;
    if (out.meta.kind == TraceKind::Direct) out.meta.kind = TraceKind::MeasuredSim;
    return out;
}

}  // namespace biphoton
