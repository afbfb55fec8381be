#include "doctest.h"

#include <fstream>
#include <string>

#include "varsketch/config.hpp"

#include "test_support.hpp"

using namespace varsketch;

namespace {

ExperimentConfig parse(const std::string& text) { return parse_config(text, "test"); }

std::string error_of(const std::string& text) {
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("an empty object yields the documented defaults") {
    const ExperimentConfig cfg = parse("{}");
    CHECK(cfg.rows == 32);
    CHECK(cfg.cols == 32);
    CHECK(cfg.n_coils == 4);
    CHECK(cfg.phantom.kind == PhantomKind::smooth_random);
    CHECK(!cfg.phantom.seed.has_value());
    CHECK(cfg.mask.scheme == MaskScheme::poisson_disc_2d);
    CHECK(cfg.mask.acceleration == 8.0);
    CHECK(cfg.noise.mode == NoiseMode::sources);
    CHECK(cfg.noise.alpha == 1.0);
    CHECK(cfg.model.kind == ModelKind::unrolled_dc);
    CHECK(cfg.model.steps == 4);
    CHECK(cfg.estimators ==
          std::vector<EstimatorKind>{EstimatorKind::sketch, EstimatorKind::mc});
    CHECK(cfg.sketch_S == 1000);
    CHECK(cfg.distribution == ProbeDistribution::random_phase);
    CHECK(cfg.mc_trials == 3000);
    CHECK(cfg.linearization == LinPoint::measured);
    CHECK(cfg.chunk == 64);
    CHECK(cfg.threads == 1);
    CHECK(cfg.master_seed == 1);
    CHECK(!cfg.sweep.has_value());
}

TEST_CASE("a fully specified config parses into the matching fields") {
    const ExperimentConfig cfg = parse(R"({
        "grid": {"rows": 16, "cols": 24},
        "coils": {"count": 2},
        "phantom": {"kind": "point-grid", "seed": 9, "point_spacing": 4},
        "mask": {"scheme": "uniform-1d", "acceleration": 2.0, "seed": 3, "calib_region": 0},
        "noise": {"mode": "estimated", "alpha": 2.5, "base_sigma": 0.02,
                  "n_sources": 5, "corner_fraction": 0.08, "weights_seed": 11},
        "model": {"kind": "unrolled-dc", "steps": 6, "dc_solver": "cg", "dc_lambda": 0.5,
                  "dc_cg_iters": 12,
                  "net": {"layers": 2, "channels": 3, "kernel": 5, "gain": 0.25},
                  "weights_seed": 13},
        "estimators": ["sketch", "naive", "mc", "brute"],
        "sketch": {"S": 250, "distribution": "complex-gaussian"},
        "mc": {"trials": 500},
        "linearization": "truth",
        "chunk": 8,
        "threads": 2,
        "seed": 42,
        "out": "results",
        "sweep": {"param": "S", "values": [100, 400]},
        "bench": {"repeats": 5}
    })");
    CHECK(cfg.rows == 16);
    CHECK(cfg.cols == 24);
    CHECK(cfg.n_coils == 2);
    CHECK(cfg.phantom.kind == PhantomKind::point_grid);
    CHECK(cfg.phantom.seed == 9);
    CHECK(cfg.phantom.point_spacing == 4);
    CHECK(cfg.mask.scheme == MaskScheme::uniform_1d);
    CHECK(cfg.mask.calib_region == 0);
    CHECK(cfg.noise.mode == NoiseMode::estimated);
    CHECK(cfg.noise.alpha == 2.5);
    CHECK(cfg.noise.n_sources == 5);
    CHECK(cfg.noise.weights_seed == 11);
    CHECK(cfg.model.dc_solver == DcSolver::cg);
    CHECK(cfg.model.dc_lambda == 0.5);
    CHECK(cfg.model.dc_cg_iters == 12);
    CHECK(cfg.model.net_layers == 2);
    CHECK(cfg.model.net_kernel == 5);
    CHECK(cfg.estimators.size() == 4);
    CHECK(cfg.has_estimator(EstimatorKind::brute));
    CHECK(cfg.sketch_S == 250);
    CHECK(cfg.distribution == ProbeDistribution::complex_gaussian);
    CHECK(cfg.mc_trials == 500);
    CHECK(cfg.linearization == LinPoint::truth);
    CHECK(cfg.master_seed == 42);
    CHECK(cfg.out_dir == "results");
    REQUIRE(cfg.sweep.has_value());
    CHECK(cfg.sweep->param == "S");
    CHECK(cfg.sweep->values == std::vector<double>{100.0, 400.0});
    CHECK(cfg.bench.repeats == 5);
}

TEST_CASE("the resolved config survives a json round trip") {
    const ExperimentConfig a = parse(R"({
        "grid": {"rows": 16, "cols": 16},
        "coils": {"count": 2},
        "phantom": {"seed": 7},
        "mask": {"scheme": "poisson-disc-2d", "acceleration": 4.0},
        "noise": {"mode": "identity"},
        "model": {"kind": "single-pass-denoiser"},
        "estimators": ["naive", "brute"],
        "sweep": {"param": "scheme", "values": ["uniform-1d", "poisson-disc-2d"]}
    })");
    const ExperimentConfig b = parse(config_to_json(a));
    CHECK(config_to_json(b) == config_to_json(a));
    CHECK(b.phantom.seed == 7);
    CHECK(b.noise.mode == NoiseMode::identity);
    CHECK(b.estimators == a.estimators);
    REQUIRE(b.sweep.has_value());
    CHECK(b.sweep->scheme_values == a.sweep->scheme_values);
}

TEST_CASE("unknown keys are rejected with their full field path") {
    CHECK(error_of(R"({"gird": {}})").find("test.gird") != std::string::npos);
    CHECK(error_of(R"({"grid": {"rowz": 8}})").find("grid.rowz") != std::string::npos);
    CHECK(error_of(R"({"model": {"net": {"width": 3}}})").find("model.net.width") !=
          std::string::npos);
    CHECK(error_of(R"({"noise": {"sigma": 1}})").find("noise.sigma") != std::string::npos);
}

TEST_CASE("invalid values are rejected with a reason") {
    CHECK(error_of(R"({"grid": {"rows": 4}})").find("grid.rows") != std::string::npos);
    CHECK(error_of(R"({"mask": {"acceleration": 0.5}})").find("must be >= 1") !=
          std::string::npos);
    CHECK(error_of(R"({"mask": {"scheme": "spiral"}})").find("mask.scheme") != std::string::npos);
    CHECK(error_of(R"({"noise": {"alpha": 0}})").find("noise.alpha") != std::string::npos);
    CHECK(error_of(R"({"noise": {"corner_fraction": 1.5}})").find("corner_fraction") !=
          std::string::npos);
    CHECK(error_of(R"({"model": {"net": {"kernel": 4}}})").find("must be odd") !=
          std::string::npos);
    CHECK(error_of(R"({"estimators": []})").find("estimators") != std::string::npos);
    CHECK(error_of(R"({"estimators": ["exact"]})").find("estimators[0]") != std::string::npos);
    CHECK(error_of(R"({"sketch": {"S": 0}})").find("sketch.S") != std::string::npos);
    CHECK(error_of(R"({"mc": {"trials": 1}})").find("mc.trials") != std::string::npos);
    CHECK(error_of(R"({"linearization": "midpoint"})").find("linearization") !=
          std::string::npos);
    CHECK(error_of(R"({"sweep": {"param": "Q", "values": [1]}})").find("sweep.param") !=
          std::string::npos);
    CHECK(error_of(R"({"sweep": {"param": "S", "values": []}})").find("sweep.values") !=
          std::string::npos);
    CHECK(error_of(R"({"sweep": {"param": "S", "values": [-5]}})").find("values[0]") !=
          std::string::npos);
    CHECK(error_of("{not json").find("test") != std::string::npos);
}

TEST_CASE("cross-field constraints are enforced") {
    CHECK(error_of(R"({"coils": {"count": 4}, "noise": {"n_sources": 2}})")
              .find("n_sources") != std::string::npos);
    CHECK(error_of(R"({"model": {"kind": "unrolled-dc", "steps": 65}})").find("model.steps") !=
          std::string::npos);
    // n_sources 0 keeps the coil-count default and passes
    CHECK(parse(R"({"coils": {"count": 4}})").noise.n_sources == 0);
}

TEST_CASE("configs load from disk and missing files are reported") {
    testsupport::TempDir dir("config");
    const auto path = dir.path() / "exp.json";
    std::ofstream(path) << R"({"grid": {"rows": 12, "cols": 12}, "seed": 77})";
    const ExperimentConfig cfg = load_config(path);
    CHECK(cfg.rows == 12);
    CHECK(cfg.master_seed == 77);
    CHECK_THROWS_AS(load_config(dir.path() / "absent.json"), ConfigError);
}
