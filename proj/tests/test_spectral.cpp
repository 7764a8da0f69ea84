#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "biphoton/correlation.hpp"
#include "biphoton/spectral.hpp"

using namespace biphoton;

namespace {
constexpr double kB = 708.71;
constexpr double kMu = 0.0275;
constexpr double kSigmaP = 0.022;
}  // namespace

TEST_CASE("double_gaussian: maxima near +-mu, symmetric, finite") {
    const auto g = make_grid(2048, 0.15);
    const auto sa = double_gaussian(kB, kMu, kSigmaP, g);
    REQUIRE(sa.symmetric);
    REQUIRE_NOTHROW(validate(sa));

    // the two humps overlap, which pulls the maxima slightly inward of +-mu
    std::size_t imax = 0;
    double vmax = 0.0;
    for (std::size_t i = g.size() / 2; i < g.size(); ++i) {
        if (std::abs(sa.amp[i]) > vmax) {
            vmax = std::abs(sa.amp[i]);
            imax = i;
        }
    }
    CHECK(std::abs(g.values[imax] - kMu) < 0.004);
}

TEST_CASE("double_gaussian: mu=0 degenerates to a single peak at Omega=0") {
    const auto g = make_grid(256, 0.12);
    const auto sa = double_gaussian(kB, 0.0, kSigmaP, g);
    // peak at the two innermost bins (no Omega=0 sample)
    double vmax = 0.0;
    std::size_t imax = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (std::abs(sa.amp[i]) > vmax) {
            vmax = std::abs(sa.amp[i]);
            imax = i;
        }
    }
    CHECK(std::abs(g.values[imax]) <= g.bin_width);
}

TEST_CASE("double_gaussian rejects bad parameters") {
    const auto g = make_grid(16, 0.12);
    CHECK_THROWS_AS(double_gaussian(kB, kMu, 0.0, g), std::invalid_argument);
    CHECK_THROWS_AS(double_gaussian(kB, kMu, -1.0, g), std::invalid_argument);
    CHECK_THROWS_AS(double_gaussian(0.0, kMu, kSigmaP, g), std::invalid_argument);
    CHECK_THROWS_AS(double_gaussian(kB, -0.01, kSigmaP, g), std::invalid_argument);
}

TEST_CASE("fourier_to_time: constant amplitude peaks at tau=0") {
    const auto g = make_grid(64, 0.1);
    SpectralAmplitude sa;
    sa.grid = g;
    sa.amp.assign(g.size(), {1.0, 0.0});
    sa.symmetric = true;
    const auto ta = fourier_to_time(sa, make_tau_grid(-200.0, 200.0, 1.0));
    double best = 0.0;
    std::size_t ibest = 0;
    for (std::size_t i = 0; i < ta.amp.size(); ++i) {
        if (std::abs(ta.amp[i]) > best) {
            best = std::abs(ta.amp[i]);
            ibest = i;
        }
    }
    CHECK(ta.tau[ibest] == 0.0);
}

TEST_CASE("fourier_to_time matches the closed-form Gaussian-integral oracle") {
    // |FT|^2 of the double-Gaussian amplitude vs cos^2(mu tau) e^{-sigma'^2 tau^2},
    // normalized at tau=0; points kept clear of the cos zeros where truncation
    // error is amplified.
    const auto g = make_grid(2048, 0.15);
    const auto sa = double_gaussian(kB, kMu, kSigmaP, g);
    std::vector<double> taus;
    for (int t = 2; taus.size() < 20; ++t) {
        const double z1 = std::numbers::pi / (2.0 * kMu);
        if (std::abs(t - z1) > 6.0 && std::abs(t - 3.0 * z1) > 6.0) taus.push_back(t);
    }
    const auto ta = fourier_to_time(sa, taus);
    const auto ta0 = fourier_to_time(sa, {0.0});
    const double peak = std::norm(ta0.amp[0]);
    for (std::size_t i = 0; i < taus.size(); ++i) {
        const double got = std::norm(ta.amp[i]) / peak;
        const double c = std::cos(kMu * taus[i]);
        const double expected = c * c * std::exp(-kSigmaP * kSigmaP * taus[i] * taus[i]);
        CHECK(std::abs(got - expected) <= 1e-3 * expected);
    }
}

TEST_CASE("fourier_to_time: real symmetric spectrum gives a real transform") {
    const auto g = make_grid(512, 0.12);
    const auto sa = double_gaussian(kB, kMu, kSigmaP, g);
    const auto ta = fourier_to_time(sa, make_tau_grid(-150.0, 150.0, 3.0));
    double max_abs_amp = 0.0;
    for (const auto& a : ta.amp) max_abs_amp = std::max(max_abs_amp, std::abs(a));
    for (const auto& a : ta.amp) CHECK(std::abs(a.imag()) <= 1e-10 * max_abs_amp);
}

TEST_CASE("fourier_to_time is linear") {
    const auto g = make_grid(128, 0.12);
    const auto sa1 = double_gaussian(kB, kMu, kSigmaP, g);
    const auto sa2 = double_gaussian(2.0 * kB, 0.015, 0.03, g);
    const std::complex<double> a{2.0, 0.0}, b{-0.5, 1.0};

    SpectralAmplitude combo;
    combo.grid = g;
    combo.amp.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        combo.amp[i] = a * sa1.amp[i] + b * sa2.amp[i];
    }
    const auto tau = make_tau_grid(-120.0, 120.0, 7.5);
    const auto t_combo = fourier_to_time(combo, tau);
    const auto t1 = fourier_to_time(sa1, tau);
    const auto t2 = fourier_to_time(sa2, tau);
    double scale = 0.0;
    for (const auto& v : t_combo.amp) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < tau.size(); ++i) {
        CHECK(std::abs(t_combo.amp[i] - (a * t1.amp[i] + b * t2.amp[i])) <= 1e-12 * scale);
    }
}

TEST_CASE("Parseval identity on the conjugate tau grid") {
    const auto g = make_grid(256, 0.12);
    const auto sa = double_gaussian(kB, kMu, kSigmaP, g);
    const auto tau = conjugate_tau_grid(g);
    const double dtau = tau[1] - tau[0];
    const auto ta = fourier_to_time(sa, tau);

    double lhs = 0.0;
    for (const auto& a : ta.amp) lhs += std::norm(a) * dtau;
    double rhs = 0.0;
    for (const auto& a : sa.amp) rhs += std::norm(a) * g.bin_width;
    rhs *= 2.0 * std::numbers::pi;
    CHECK(std::abs(lhs - rhs) <= 1e-6 * rhs);
}

TEST_CASE("doubling n_pos changes |FT|^2 by < 0.1%") {
    const auto sa1 = double_gaussian(kB, kMu, kSigmaP, make_grid(512, 0.12));
    const auto sa2 = double_gaussian(kB, kMu, kSigmaP, make_grid(1024, 0.12));
    const auto tau = make_tau_grid(-150.0, 150.0, 2.0);
    const auto t1 = fourier_to_time(sa1, tau);
    const auto t2 = fourier_to_time(sa2, tau);
    double peak = 0.0;
    for (const auto& a : t1.amp) peak = std::max(peak, std::norm(a));
    for (std::size_t i = 0; i < tau.size(); ++i) {
        CHECK(std::abs(std::norm(t1.amp[i]) - std::norm(t2.amp[i])) < 1e-3 * peak);
    }
}

TEST_CASE("width_to_wavelength") {
    // reference parameters: sqrt(sigma'^2 + mu^2) = 0.03522 rad/fs -> 21.2 nm at 1064 nm
    const double w = std::hypot(kSigmaP, kMu);
    CHECK(width_to_wavelength(w, 1064.0) == Catch::Approx(21.2).margin(0.1));
    CHECK(width_to_wavelength(0.0, 1064.0) == 0.0);
    // direct evaluation: 1064^2 * 0.01 / (2 pi c)
    const double expected = 1064.0 * 1064.0 * 0.01 / (2.0 * std::numbers::pi * 299.792458);
    CHECK(width_to_wavelength(0.01, 1064.0) == Catch::Approx(expected).epsilon(1e-12));
    CHECK(width_to_wavelength(0.01, 1064.0) == Catch::Approx(6.0).margin(0.05));
    CHECK_THROWS_AS(width_to_wavelength(-0.01, 1064.0), std::invalid_argument);
    CHECK_THROWS_AS(width_to_wavelength(0.01, 0.0), std::invalid_argument);
}

TEST_CASE("validate rejects a broken symmetric flag") {
    const auto g = make_grid(8, 0.1);
    SpectralAmplitude sa;
    sa.grid = g;
    sa.amp.assign(g.size(), {1.0, 0.0});
    sa.symmetric = true;
    sa.amp[0] = {2.0, 0.0};
    CHECK_THROWS_AS(validate(sa), std::invalid_argument);
    sa.symmetric = false;
    CHECK_NOTHROW(validate(sa));
    sa.amp[3] = {std::nan(""), 0.0};
    CHECK_THROWS_AS(validate(sa), std::invalid_argument);
}
