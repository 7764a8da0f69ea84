#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "biphoton/shaper.hpp"

using namespace biphoton;

TEST_CASE("ma_mask: identity at tau=0, unit modulus, pair product e^{i|Omega|tau}") {
    const auto g = make_grid(32, 0.12);

    const auto m0 = ma_mask(0.0, g);
    for (const auto& m : m0.mask) CHECK(m == std::complex<double>{1.0, 0.0});

    const double tau = 137.0;
    const auto m = ma_mask(tau, g);
    REQUIRE_NOTHROW(validate(m));
    for (const auto& v : m.mask) CHECK(std::abs(v) == Catch::Approx(1.0).epsilon(1e-14));

    const auto prof = pair_profile(m);
    for (int k = 0; k < g.n_pos; ++k) {
        const double ph = g.positive_value(k) * tau;
        const std::complex<double> expected{std::cos(ph), std::sin(ph)};
        CHECK(std::abs(prof[static_cast<std::size_t>(k)] - expected) < 1e-12);
    }
}

TEST_CASE("mb_mask: zero on positive bins at tau=0, pair product sin(Omega tau)") {
    const auto g = make_grid(32, 0.12);

    const auto m0 = mb_mask(0.0, g);
    for (int k = 0; k < g.n_pos; ++k) {
        CHECK(m0.mask[g.positive_index(k)] == std::complex<double>{0.0, 0.0});
        CHECK(m0.mask[g.mirror_index(g.positive_index(k))] == std::complex<double>{1.0, 0.0});
    }

    const double tau = 73.0;
    const auto m = mb_mask(tau, g);
    REQUIRE_NOTHROW(validate(m));  // |sin| <= 1
    const auto prof = pair_profile(m);
    for (int k = 0; k < g.n_pos; ++k) {
        CHECK(prof[static_cast<std::size_t>(k)].real() ==
              Catch::Approx(std::sin(g.positive_value(k) * tau)).margin(1e-15));
        CHECK(prof[static_cast<std::size_t>(k)].imag() == 0.0);
    }
}

TEST_CASE("random_dephaser: sigma=0 identity, determinism, pair phase on positives") {
    const auto g = make_grid(64, 0.12);

    const auto id = random_dephaser(0.0, 42, g);
    for (const auto& m : id.mask) CHECK(m == std::complex<double>{1.0, 0.0});

    const auto a = random_dephaser(1.3, 987654321, g);
    const auto b = random_dephaser(1.3, 987654321, g);
    REQUIRE(a.mask.size() == b.mask.size());
    for (std::size_t i = 0; i < a.mask.size(); ++i) {
        CHECK(a.mask[i].real() == b.mask[i].real());
        CHECK(a.mask[i].imag() == b.mask[i].imag());
    }

    // negative bins transmit with zero phase; pair product is the positive phase
    const auto pr = make_phase_realization(1.3, 987654321, g);
    const auto prof = pair_profile(a);
    for (int k = 0; k < g.n_pos; ++k) {
        CHECK(a.mask[g.mirror_index(g.positive_index(k))] == std::complex<double>{1.0, 0.0});
        const std::complex<double> expected{std::cos(pr.phases[static_cast<std::size_t>(k)]),
                                            std::sin(pr.phases[static_cast<std::size_t>(k)])};
        CHECK(std::abs(prof[static_cast<std::size_t>(k)] - expected) < 1e-15);
    }

    CHECK_THROWS_AS(random_dephaser(-0.1, 1, g), std::invalid_argument);
}

TEST_CASE("dephaser phase statistics: mean and variance") {
    const auto g = make_grid(16, 0.12);
    const double sigma = 1.7;
    const long long n = 100000;
    double sum = 0.0, sumsq = 0.0;
    long long count = 0;
    for (long long j = 0; j < n / g.n_pos + 1; ++j) {
        const auto pr = make_phase_realization(sigma, derive_seed(2024, static_cast<std::uint64_t>(j)), g);
        for (const auto p : pr.phases) {
            sum += p;
            sumsq += p * p;
            ++count;
        }
    }
    const double mean = sum / static_cast<double>(count);
    const double var = sumsq / static_cast<double>(count) - mean * mean;
    CHECK(std::abs(mean) <= 5.0 * sigma / std::sqrt(static_cast<double>(count)));
    CHECK(std::abs(var - sigma * sigma) <= 0.03 * sigma * sigma);
}

TEST_CASE("four-phase correlator: 1 for equal |Omega|, e^{-sigma^2} otherwise") {
    const auto g = make_grid(16, 0.12);
    const long long n = 100000;
    for (const double sigma : {0.5, 1.0, 2.0}) {
        std::complex<double> acc_diff{0.0, 0.0};
        for (long long j = 0; j < n; ++j) {
            const auto pr =
                make_phase_realization(sigma, derive_seed(777, static_cast<std::uint64_t>(j)), g);
            // with unit transmission and zero phase on Omega<0 the correlator
            // reduces to e^{i(phi_k - phi_l)}
            const double d = pr.phases[2] - pr.phases[9];
            acc_diff += std::complex<double>{std::cos(d), std::sin(d)};
            // equal bins: exactly 1 for every realization
            REQUIRE(pr.phases[4] - pr.phases[4] == 0.0);
        }
        acc_diff /= static_cast<double>(n);
        const double tol = 5.0 / std::sqrt(static_cast<double>(n));
        CHECK(std::abs(acc_diff.real() - std::exp(-sigma * sigma)) <= tol);
        CHECK(std::abs(acc_diff.imag()) <= tol);
    }
}

TEST_CASE("compose: identity, conjugate delay cancels, modulus multiplies") {
    const auto g = make_grid(24, 0.1);
    const auto id = identity_mask(g);
    const auto m = random_dephaser(0.8, 5, g);

    const auto c1 = compose(id, m);
    for (std::size_t i = 0; i < m.mask.size(); ++i) CHECK(c1.mask[i] == m.mask[i]);

    const auto cancel = compose(ma_mask(55.0, g), ma_mask(-55.0, g));
    for (const auto& v : cancel.mask) {
        CHECK(v.real() == Catch::Approx(1.0).margin(1e-14));
        CHECK(v.imag() == Catch::Approx(0.0).margin(1e-14));
    }

    const auto mb = mb_mask(40.0, g);
    const auto prod = compose(m, mb);
    for (std::size_t i = 0; i < prod.mask.size(); ++i) {
        CHECK(std::abs(prod.mask[i]) ==
              Catch::Approx(std::abs(m.mask[i]) * std::abs(mb.mask[i])).margin(1e-14));
    }

    const auto g2 = make_grid(24, 0.2);
    CHECK_THROWS_AS(compose(m, identity_mask(g2)), std::invalid_argument);
}

TEST_CASE("pair_profile: identity mask gives ones; profile depends only on |Omega|") {
    const auto g = make_grid(12, 0.06);
    const auto prof_id = pair_profile(identity_mask(g));
    for (const auto& p : prof_id) CHECK(p == std::complex<double>{1.0, 0.0});

    // m(Omega) m(-Omega) computed from the +Omega entry and the -Omega entry
    // orders must agree exactly
    const auto m = compose(random_dephaser(1.1, 31, g), ma_mask(23.0, g));
    const auto prof = pair_profile(m);
    for (int k = 0; k < g.n_pos; ++k) {
        const auto ip = g.positive_index(k);
        const auto in = g.mirror_index(ip);
        const auto from_pos = m.mask[ip] * m.mask[in];
        const auto from_neg = m.mask[in] * m.mask[ip];
        CHECK(prof[static_cast<std::size_t>(k)] == from_pos);
        CHECK(from_pos == from_neg);
    }
}

TEST_CASE("transfer function validation rejects gain and non-finite masks") {
    const auto g = make_grid(8, 0.1);
    TransferFunction tf = identity_mask(g);
    tf.mask[3] = {1.5, 0.0};
    CHECK_THROWS_AS(validate(tf), std::invalid_argument);
    tf.mask[3] = {std::nan(""), 0.0};
    CHECK_THROWS_AS(validate(tf), std::invalid_argument);
}
