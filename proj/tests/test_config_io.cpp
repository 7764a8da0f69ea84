#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "biphoton/config.hpp"
#include "biphoton/io.hpp"

using namespace biphoton;
namespace fs = std::filesystem;

namespace {
fs::path temp_dir() {
    const auto dir = fs::temp_directory_path() / "biphoton_io_test";
    fs::create_directories(dir);
    return dir;
}
}  // namespace

TEST_CASE("trace CSV round trip keeps full double precision") {
    CorrelationTrace tr;
    tr.tau = {-2.0, -1.0, 0.0, 1.0, 2.0};
    tr.value = {0.1234567890123456789, -3.5e-17, 708.71, 1.0 / 3.0, 2.5e300};
    tr.stderr_ = {0.0, 1e-300, 26.62, 0.5, 1.0};

    const auto path = temp_dir() / "trace.csv";
    write_trace_csv(path, tr);
    const auto back = read_trace_csv(path);
    REQUIRE(back.tau.size() == tr.tau.size());
    for (std::size_t i = 0; i < tr.tau.size(); ++i) {
        REQUIRE(back.tau[i] == tr.tau[i]);
        REQUIRE(back.value[i] == tr.value[i]);
        REQUIRE(back.stderr_[i] == tr.stderr_[i]);
    }
}

TEST_CASE("trace CSV reader reports malformed input with line numbers") {
    const auto path = temp_dir() / "broken.csv";
    write_text_file(path, "tau_fs,value_hz,stderr_hz\n0,1,0\nnot,a,row,x\n");
    try {
        read_trace_csv(path);
        FAIL("expected parse error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find(":3:") != std::string::npos);
    }

    write_text_file(path, "wrong,header\n");
    CHECK_THROWS_AS(read_trace_csv(path), std::runtime_error);
}

TEST_CASE("mask, matrix and curve exports carry the documented headers") {
    const auto dir = temp_dir();
    const auto g = make_grid(4, 0.1);

    write_mask_csv(dir / "mask.csv", ma_mask(10.0, g));
    std::ifstream mask_in(dir / "mask.csv");
    std::string header;
    std::getline(mask_in, header);
    CHECK(header == "omega_rad_per_fs,re,im");
    std::size_t rows = 0;
    for (std::string line; std::getline(mask_in, line);) rows += !line.empty();
    CHECK(rows == g.size());

    const auto sa = double_gaussian(708.71, 0.0275, 0.022, g);
    write_matrix_csv(dir / "rho.csv", pure_state(sa));
    std::ifstream mat_in(dir / "rho.csv");
    std::getline(mat_in, header);
    CHECK(header == "row,col,re,im");

    SweepCurve curve;
    curve.sigma = {0.0, 1.0};
    curve.value = {1.0, 0.3678794411714423};
    curve.stderr_ = {0.0, 0.0};
    write_curve_csv(dir / "curve.csv", curve);
    std::ifstream curve_in(dir / "curve.csv");
    std::getline(curve_in, header);
    CHECK(header == "sigma_rad,value,stderr");
}

TEST_CASE("config defaults mirror the published run parameters") {
    const RunConfig cfg;
    CHECK(cfg.spectrum.B_hz == 708.71);
    CHECK(cfg.spectrum.mu == 0.0275);
    CHECK(cfg.spectrum.sigma_p == 0.022);
    CHECK(cfg.ensemble.n_realizations == 10000);
    REQUIRE(cfg.ensemble.sigma_list.size() == 5);
    CHECK(cfg.ensemble.sigma_list == std::vector<double>{0.0, 0.5, 1.0, 2.0, 10.0});
    CHECK(cfg.tau.min == -250.0);
    CHECK(cfg.tau.max == 250.0);
    CHECK(cfg.tau.step == 1.0);
    CHECK_NOTHROW(validate(cfg));
}

TEST_CASE("config JSON: unknown keys rejected, values validated, round trip") {
    const json good = {
        {"spectrum", {{"B_hz", 500.0}, {"mu_rad_per_fs", 0.02}}},
        {"ensemble", {{"sigma", 1.5}, {"n_realizations", 100}}},
        {"tau", {{"min_fs", -100.0}, {"max_fs", 100.0}, {"step_fs", 0.5}}},
    };
    const auto cfg = config_from_json(good);
    CHECK(cfg.spectrum.B_hz == 500.0);
    CHECK(cfg.ensemble.sigma_list == std::vector<double>{1.5});
    CHECK(cfg.spectrum.sigma_p == 0.022);  // default survives partial objects

    // resolved form round-trips to the same configuration
    const auto cfg2 = config_from_json(config_to_json(cfg));
    CHECK(config_to_json(cfg2) == config_to_json(cfg));

    json unknown = good;
    unknown["spectrum"]["unexpected"] = 1;
    CHECK_THROWS_AS(config_from_json(unknown), ConfigError);
    json top_unknown = good;
    top_unknown["extra_section"] = json::object();
    CHECK_THROWS_AS(config_from_json(top_unknown), ConfigError);

    json bad_value = good;
    bad_value["tau"]["step_fs"] = 0.0;
    CHECK_THROWS_AS(config_from_json(bad_value), ConfigError);
    json both_sigma = good;
    both_sigma["ensemble"]["sigma_list"] = {0.1, 0.2};
    CHECK_THROWS_AS(config_from_json(both_sigma), ConfigError);
    json bad_type = good;
    bad_type["spectrum"]["B_hz"] = "many";
    CHECK_THROWS_AS(config_from_json(bad_type), ConfigError);
}

TEST_CASE("calibrated grid preset matches its constants") {
    const auto g = calibrated_grid();
    CHECK(g.n_pos == kCalibratedNPos);
    CHECK(g.omega_max == kCalibratedOmegaMax);
    const auto f = fine_grid();
    CHECK(f.n_pos == 512);
}
