#include "doctest.h"

#include <cmath>

#include "varsketch/estimators.hpp"
#include "varsketch/metrics.hpp"
#include "varsketch/sensitivity.hpp"

#include "test_support.hpp"

using namespace varsketch;

namespace {

SampleCovariance identity_cov(std::size_t n_coils, std::size_t n_freqs) {
    NoiseSourceModel src;
    src.n_sources = n_coils;
    src.sigmas.assign(n_coils, 1.0);
    src.weights = ComplexArray::zeros({n_coils, n_coils});
    for (std::size_t g = 0; g < n_coils; ++g) src.weights.at2(g, g) = 1.0;
    SampleCovariance cov;
    cov.coil_cov = build_coil_covariance(src);
    cov.n_freqs = n_freqs;
    return cov;
}

SampleCovariance coupled_cov(std::size_t n_coils, std::size_t n_freqs, std::uint64_t seed) {
    NoiseSourceModel src;
    src.n_sources = n_coils + 1;
    src.sigmas.resize(src.n_sources);
    for (std::size_t t = 0; t < src.n_sources; ++t) src.sigmas[t] = 0.5 + 0.1 * double(t);
    src.weights = testsupport::random_array({n_coils, src.n_sources}, seed);
    for (std::size_t g = 0; g < n_coils; ++g) src.weights.at2(g, g) += 2.0; // keep well conditioned
    SampleCovariance cov;
    cov.coil_cov = build_coil_covariance(src);
    cov.n_freqs = n_freqs;
    return cov;
}

struct PlanFixture {
    std::size_t n;
    ComplexArray maps;
    SamplingMask mask;
    ImagingOperator op;
    ModelSpec model_spec;
    ReconModel model;
    SampleCovariance cov;
    SketchPlan plan;

    PlanFixture(std::size_t n_, std::size_t n_coils, MaskScheme scheme, double r,
                ModelKind kind, std::uint64_t seed)
        : n(n_),
          maps(birdcage_maps(n_coils, n_, n_)),
          mask(make_mask({scheme, n_, n_, r, seed + 1, -1})),
          op(maps, mask),
          model_spec(make_model_spec(kind)),
          model(model_spec, &op),
          cov(coupled_cov(n_coils, n_ * n_, seed + 2)) {
        plan.op = &op;
        plan.model = &model;
        plan.cov = cov;
        plan.linearization = testsupport::random_array({n_, n_}, seed + 3);
        plan.measured = op.forward(testsupport::random_array({n_, n_}, seed + 4));
        plan.seed = seed;
        plan.chunk = 16;
    }

    static ModelSpec make_model_spec(ModelKind kind) {
        ModelSpec s;
        s.kind = kind;
        s.steps = 2;
        s.net_channels = 2;
        s.weights_seed = 9;
        return s;
    }
};

} // namespace

TEST_CASE("exact backends give the all-ones map on a unitary pipeline") {
    // single coil, full sampling, identity model and identity covariance:
    // the reconstruction covariance is exactly the identity
    const std::size_t n = 8;
    const ComplexArray maps = birdcage_maps(1, n, n);
    const SamplingMask mask = make_mask({MaskScheme::uniform_1d, n, n, 1.0, 3, 0});
    const ImagingOperator op(maps, mask);
    ModelSpec ms;
    ms.kind = ModelKind::identity;
    const ReconModel model(ms, &op);

    SketchPlan plan;
    plan.op = &op;
    plan.model = &model;
    plan.cov = identity_cov(1, n * n);
    plan.linearization = testsupport::random_array({n, n}, 600);
    plan.measured = op.forward(testsupport::random_array({n, n}, 601));
    plan.chunk = 8;

    for (const VarianceMap& map : {naive_variance(plan), brute_force_diag(plan)})
        for (std::size_t i = 0; i < map.values.size(); ++i)
            CHECK(map.values[i] == doctest::Approx(1.0).epsilon(1e-12));

    // a single random-phase probe already averages to exactly 1 over voxels
    // because a unitary map preserves the probe's norm
    plan.S = 1;
    plan.distribution = ProbeDistribution::random_phase;
    const VarianceMap sk = sketch_variance(plan);
    double mean = 0.0;
    for (std::size_t i = 0; i < sk.values.size(); ++i) mean += sk.values[i];
    mean /= double(sk.values.size());
    CHECK(mean == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("maps scale exactly with the covariance scale") {
    PlanFixture f(8, 2, MaskScheme::uniform_random_2d, 2.0, ModelKind::identity, 610);
    const VarianceMap base = naive_variance(f.plan);
    SketchPlan scaled = f.plan;
    scaled.cov.coil_cov = f.plan.cov.coil_cov.with_scale(4.0);
    const VarianceMap big = naive_variance(scaled);
    for (std::size_t i = 0; i < base.values.size(); ++i)
        CHECK(big.values[i] == 4.0 * base.values[i]); // power-of-two scale is exact

    SketchPlan small = f.plan;
    small.S = 32;
    scaled.S = 32;
    const VarianceMap sk1 = sketch_variance(small);
    const VarianceMap sk4 = sketch_variance(scaled);
    for (std::size_t i = 0; i < sk1.values.size(); ++i)
        CHECK(sk4.values[i] == 4.0 * sk1.values[i]);
}

TEST_CASE("a zero covariance produces exactly zero maps from every backend") {
    const std::size_t n = 8;
    const ComplexArray maps = birdcage_maps(2, n, n);
    const SamplingMask mask = make_mask({MaskScheme::uniform_random_2d, n, n, 2.0, 5, -1});
    const ImagingOperator op(maps, mask);
    ModelSpec ms;
    ms.kind = ModelKind::identity;
    const ReconModel model(ms, &op);

    NoiseSourceModel src;
    src.n_sources = 2;
    src.sigmas = {0.0, 0.0};
    src.weights = testsupport::random_array({2, 2}, 620);

    SketchPlan plan;
    plan.op = &op;
    plan.model = &model;
    plan.cov.coil_cov = build_coil_covariance(src);
    plan.cov.n_freqs = n * n;
    plan.linearization = testsupport::random_array({n, n}, 621);
    plan.measured = op.forward(testsupport::random_array({n, n}, 622));
    plan.S = 4;
    plan.chunk = 8;

    McOptions mc;
    mc.trials = 4;
    for (const VarianceMap& map : {sketch_variance(plan), naive_variance(plan),
                                   brute_force_diag(plan), mc_variance(plan, mc)})
        for (std::size_t i = 0; i < map.values.size(); ++i) CHECK(map.values[i] == 0.0);
}

TEST_CASE("naive and brute-force backends agree to rounding error") {
    for (ModelKind kind : {ModelKind::unrolled_dc, ModelKind::single_pass_denoiser}) {
        PlanFixture f(12, 2, MaskScheme::uniform_random_2d, 2.0, kind, 630);
        const VarianceMap naive = naive_variance(f.plan);
        const VarianceMap brute = brute_force_diag(f.plan);
        double rel = 0.0;
        for (std::size_t i = 0; i < naive.values.size(); ++i)
            rel = std::max(rel, testsupport::rel_err(brute.values[i], naive.values[i]));
        CHECK(rel < 1e-10);
    }
}

TEST_CASE("the sketch converges to the exact map as probes accumulate") {
    PlanFixture f(12, 2, MaskScheme::uniform_random_2d, 2.0, ModelKind::unrolled_dc, 640);
    const VarianceMap exact = naive_variance(f.plan);

    SketchPlan plan = f.plan;
    plan.S = 4000;
    plan.distribution = ProbeDistribution::random_phase;
    const ComparisonReport phase = compare_maps(sketch_variance(plan).values, exact.values);
    CHECK(phase.nrmse < 5.0);
    CHECK(phase.pcc > 99.0);

    plan.distribution = ProbeDistribution::complex_gaussian;
    const ComparisonReport gauss = compare_maps(sketch_variance(plan).values, exact.values);
    CHECK(gauss.nrmse < 8.0);

    // different probe seeds give different (but both valid) maps
    SketchPlan other = f.plan;
    other.S = 16;
    const VarianceMap a = sketch_variance(other);
    other.seed += 1;
    const VarianceMap b = sketch_variance(other);
    CHECK(norm2(a.values) > 0.0);
    double diff = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        diff = std::max(diff, std::abs(a.values[i] - b.values[i]));
    CHECK(diff > 0.0);
}

TEST_CASE("monte-carlo trials converge to the exact map for a linear model") {
    PlanFixture f(12, 2, MaskScheme::uniform_random_2d, 2.0, ModelKind::identity, 650);
    const VarianceMap exact = naive_variance(f.plan);
    McOptions mc;
    mc.trials = 4000;
    const VarianceMap est = mc_variance(f.plan, mc);
    const ComparisonReport rep = compare_maps(est.values, exact.values);
    CHECK(rep.nrmse < 6.0);
    CHECK(rep.pcc > 99.0);
}

TEST_CASE("thread count never changes any map") {
    PlanFixture f(12, 2, MaskScheme::poisson_disc_2d, 4.0, ModelKind::unrolled_dc, 660);
    SketchPlan p1 = f.plan;
    p1.S = 37; // not a multiple of the chunk size
    SketchPlan p4 = p1;
    p4.n_threads = 4;
    McOptions mc;
    mc.trials = 23;

    const VarianceMap s1 = sketch_variance(p1), s4 = sketch_variance(p4);
    const VarianceMap n1 = naive_variance(p1), n4 = naive_variance(p4);
    const VarianceMap m1 = mc_variance(p1, mc), m4 = mc_variance(p4, mc);
    const VarianceMap b1 = brute_force_diag(p1), b4 = brute_force_diag(p4);
    for (std::size_t i = 0; i < s1.values.size(); ++i) {
        CHECK(s1.values[i] == s4.values[i]);
        CHECK(n1.values[i] == n4.values[i]);
        CHECK(m1.values[i] == m4.values[i]);
        CHECK(b1.values[i] == b4.values[i]);
    }
}

TEST_CASE("naive maps are identical for any chunk size") {
    PlanFixture f(8, 2, MaskScheme::uniform_random_2d, 2.0, ModelKind::unrolled_dc, 670);
    SketchPlan a = f.plan, b = f.plan;
    a.chunk = 5;
    b.chunk = 64;
    const VarianceMap ma = naive_variance(a), mb = naive_variance(b);
    for (std::size_t i = 0; i < ma.values.size(); ++i) CHECK(ma.values[i] == mb.values[i]);
}

TEST_CASE("estimator guard rails") {
    PlanFixture f(8, 2, MaskScheme::uniform_random_2d, 2.0, ModelKind::identity, 680);

    SketchPlan no_probes = f.plan;
    no_probes.S = 0;
    CHECK_THROWS_AS(sketch_variance(no_probes), ConfigError);

    SketchPlan no_chunk = f.plan;
    no_chunk.chunk = 0;
    CHECK_THROWS_AS(naive_variance(no_chunk), ConfigError);

    McOptions one_trial;
    one_trial.trials = 1;
    CHECK_THROWS_AS(mc_variance(f.plan, one_trial), ConfigError);

    SketchPlan bad_lin = f.plan;
    bad_lin.linearization = testsupport::random_array({4, 4}, 681);
    CHECK_THROWS_AS(naive_variance(bad_lin), ShapeMismatch);

    SketchPlan bad_measured = f.plan;
    bad_measured.measured = testsupport::random_array({1, 8, 8}, 682);
    CHECK_THROWS_AS(sketch_variance(bad_measured), ShapeMismatch);
}

TEST_CASE("the brute-force backend refuses large grids") {
    const std::size_t n = 34; // 1156 voxels, just past the 1024 limit
    const ComplexArray maps = birdcage_maps(1, n, n);
    const SamplingMask mask = make_mask({MaskScheme::uniform_1d, n, n, 1.0, 1, 0});
    const ImagingOperator op(maps, mask);
    ModelSpec ms;
    ms.kind = ModelKind::identity;
    const ReconModel model(ms, &op);
    SketchPlan plan;
    plan.op = &op;
    plan.model = &model;
    plan.cov = identity_cov(1, n * n);
    plan.linearization = ComplexArray::zeros({n, n});
    plan.measured = ComplexArray::zeros({1, n, n});
    CHECK_THROWS_AS(brute_force_diag(plan), SizeLimit);
}

TEST_CASE("variance maps round trip through disk with their metadata") {
    PlanFixture f(8, 2, MaskScheme::uniform_random_2d, 2.0, ModelKind::identity, 690);
    SketchPlan plan = f.plan;
    plan.S = 8;
    const VarianceMap map = sketch_variance(plan);
    CHECK(map.meta.estimator == "sketch");
    CHECK(map.meta.samples == 8);
    CHECK(map.meta.model_kind == "identity");
    CHECK(map.meta.wall_seconds >= 0.0);

    testsupport::TempDir dir("varmap");
    const auto base = dir.path() / "map";
    write_variance_map(base, map);
    const RealArray back = read_variance_map(base);
    REQUIRE(back.size() == map.values.size());
    for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i] == map.values[i]);
    CHECK(std::filesystem::exists(dir.path() / "map.meta"));
}
