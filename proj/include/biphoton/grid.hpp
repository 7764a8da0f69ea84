#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace biphoton {

// Symmetric detuning grid: 2*n_pos bins at Ω = ±(k+1/2)·bin_width, k = 0..n_pos-1.
// There is no Ω=0 bin, so every bin has a distinct mirror partner at -Ω and the
// Ω≥0 / Ω<0 branches of the transfer functions never meet an ambiguous sample.
// Frequencies are detunings from half the pump frequency, in rad/fs.
struct FrequencyGrid {
    int n_pos{0};
    double omega_max{0.0};
    double bin_width{0.0};
    std::vector<double> values;  // strictly increasing, negative half first

    std::size_t size() const { return values.size(); }

    // index of the bin at exactly -values[i]
    std::size_t mirror_index(std::size_t i) const { return values.size() - 1 - i; }

    bool is_positive(std::size_t i) const {
        return i >= static_cast<std::size_t>(n_pos);
    }

    // k-th positive detuning, k in [0, n_pos)
    double positive_value(int k) const {
        return values[static_cast<std::size_t>(n_pos + k)];
    }
    std::size_t positive_index(int k) const {
        return static_cast<std::size_t>(n_pos + k);
    }
    // index of the positive partner of bin i (i itself if already positive)
    std::size_t positive_partner(std::size_t i) const {
        return is_positive(i) ? i : mirror_index(i);
    }

    bool same_as(const FrequencyGrid& other) const {
        return n_pos == other.n_pos && omega_max == other.omega_max;
    }
};

inline FrequencyGrid make_grid(int n_pos, double omega_max) {
    if (n_pos < 2) {
        throw std::invalid_argument("make_grid: n_pos must be >= 2");
    }
    if (!(omega_max > 0.0)) {
        throw std::invalid_argument("make_grid: omega_max must be positive");
    }
    FrequencyGrid g;
    g.n_pos = n_pos;
    g.omega_max = omega_max;
    g.bin_width = omega_max / n_pos;
    g.values.resize(2 * static_cast<std::size_t>(n_pos));
    for (int k = 0; k < n_pos; ++k) {
        const double w = (k + 0.5) * g.bin_width;
        g.values[static_cast<std::size_t>(n_pos + k)] = w;
        g.values[static_cast<std::size_t>(n_pos - 1 - k)] = -w;  // exact negation
    }
    return g;
}

}  // namespace biphoton
