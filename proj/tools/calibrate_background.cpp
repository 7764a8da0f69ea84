// One-time calibration of the grid bin width: solves for the omega_max that
// makes the sigma=10 ensemble background of the default protocol (n = 10^4,
// master seed 123456789, tau in [-250, 250] fs step 1, window |tau| in
// [180, 200] fs) equal the target level. The solved value is pinned as
// kCalibratedOmegaMax in include/biphoton/config.hpp.
//
// Usage: calibrate_background [target_hz] [n_pos] [seed] [n_realizations]

#include <cstdint>
#include <cstdlib>
#include <iostream>

#include "biphoton/biphoton.hpp"

namespace {

double background_for(double omega_max, int n_pos, std::uint64_t seed, long long n) {
    const auto grid = biphoton::make_grid(n_pos, omega_max);
    const auto sa = biphoton::double_gaussian(708.71, 0.0275, 0.022, grid);
    biphoton::EnsembleConfig cfg;
    cfg.sigma = 10.0;
    cfg.n_realizations = n;
    cfg.master_seed = seed;
    const auto [trace, stats] = biphoton::run_ensemble(sa, cfg, biphoton::default_tau_grid());
    (void)trace;
    return stats.window_mean;
}

}  // namespace

int main(int argc, char** argv) {
    const double target = argc > 1 ? std::atof(argv[1]) : 26.93;
    const int n_pos = argc > 2 ? std::atoi(argv[2]) : 20;
    const std::uint64_t seed = argc > 3 ? std::strtoull(argv[3], nullptr, 10)
                                        : biphoton::kDefaultMasterSeed;
    const long long n = argc > 4 ? std::atoll(argv[4]) : 10000;

    // background grows monotonically with the bin width at this scale
    double lo = 0.06, hi = 0.16;
    double bg_lo = background_for(lo, n_pos, seed, n);
    double bg_hi = background_for(hi, n_pos, seed, n);
    std::cout << "bracket: bg(" << lo << ") = " << bg_lo << "  bg(" << hi << ") = " << bg_hi
              << '\n';
    if ((bg_lo - target) * (bg_hi - target) > 0.0) {
        std::cerr << "target not bracketed\n";
        return 2;
    }
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double bg = background_for(mid, n_pos, seed, n);
        if ((bg - target) * (bg_lo - target) > 0.0) {
            lo = mid;
            bg_lo = bg;
        } else {
            hi = mid;
        }
    }
    const double omega = 0.5 * (lo + hi);
    std::printf("omega_max = %.17g\n", omega);
    std::printf("background = %.6f Hz (target %.6f)\n",
                background_for(omega, n_pos, seed, n), target);
    return 0;
}
