#include "varsketch/estimators.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "varsketch/errors.hpp"
#include "varsketch/io.hpp"
#include "varsketch/parallel.hpp"
#include "varsketch/rng.hpp"

namespace varsketch {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void validate_plan(const SketchPlan& plan, const char* what) {
    if (!plan.op || !plan.model) throw ConfigError(std::string(what) + ": plan lacks operator or model");
    plan.linearization.require_rank(2, what);
    if (plan.linearization.shape()[0] != plan.op->rows() ||
        plan.linearization.shape()[1] != plan.op->cols())
        throw ShapeMismatch(std::string(what) + ": linearization image does not match operator grid");
    plan.measured.require_rank(3, what);
    if (plan.measured.shape()[0] != plan.op->n_coils() ||
        plan.measured.shape()[1] != plan.op->rows() || plan.measured.shape()[2] != plan.op->cols())
        throw ShapeMismatch(std::string(what) + ": measured k-space does not match operator");
    if (plan.cov.coil_cov.n_coils != plan.op->n_coils())
        throw ShapeMismatch(std::string(what) + ": covariance coil count does not match operator");
    if (plan.cov.n_freqs != plan.op->rows() * plan.op->cols())
        throw ShapeMismatch(std::string(what) + ": covariance frequency count does not match grid");
    if (plan.chunk == 0) throw ConfigError(std::string(what) + ": chunk size must be >= 1");
}

std::string mask_desc(const SamplingMask& mask) {
    std::ostringstream os;
    os << to_string(mask.scheme) << " R=" << mask.acceleration << " grid=" << mask.rows << "x"
       << mask.cols;
    return os.str();
}

VarianceMapMeta make_meta(const SketchPlan& plan, std::string estimator, std::size_t samples,
                          std::uint64_t seed) {
    VarianceMapMeta meta;
    meta.estimator = std::move(estimator);
    meta.samples = samples;
    meta.seed = seed;
    meta.model_kind = to_string(plan.model->spec().kind);
    meta.mask_desc = mask_desc(plan.op->mask());
    meta.alpha = plan.cov.coil_cov.scale;
    return meta;
}

void assert_valid_map(const RealArray& values, const char* what) {
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!std::isfinite(values[i]) || values[i] < 0.0)
            throw Error(std::string(what) + ": map value " + std::to_string(values[i]) +
                        " at index " + std::to_string(i) + " breaks the nonnegative-finite invariant");
}

// Scatter a flat frequency-major probe column (index q*n_coils + coil)
// into a (coils, rows, cols) stack.
ComplexArray column_to_stack(const ComplexArray& v, std::size_t n_coils, std::size_t rows,
                             std::size_t cols) {
    ComplexArray s({n_coils, rows, cols});
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            const std::size_t q = r * cols + c;
            for (std::size_t g = 0; g < n_coils; ++g) s.at3(g, r, c) = v[q * n_coils + g];
        }
    return s;
}

// Per-chunk accumulator of sum |u_i|^2.
struct SquareSum {
    RealArray acc;
};

// Streaming complex mean/M2 in the per-voxel Welford form; partials merge
// pairwise with the standard combination identities, applied in chunk
// order for determinism.
struct WelfordPartial {
    std::size_t count = 0;
    ComplexArray mean;
    RealArray m2;

    void init(const std::vector<std::size_t>& shape) {
        count = 0;
        mean = ComplexArray::zeros(shape);
        m2 = RealArray(shape);
    }

    void add(const ComplexArray& x) {
        ++count;
        const double inv = 1.0 / static_cast<double>(count);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const cplx delta = x[i] - mean[i];
            mean[i] += delta * inv;
            m2[i] += std::real(std::conj(delta) * (x[i] - mean[i]));
        }
    }

    void merge(const WelfordPartial& o) {
        if (o.count == 0) return;
        if (count == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(count);
        const double nb = static_cast<double>(o.count);
        const double nab = na + nb;
        for (std::size_t i = 0; i < mean.size(); ++i) {
            const cplx delta = o.mean[i] - mean[i];
            mean[i] += delta * (nb / nab);
            m2[i] += o.m2[i] + std::norm(delta) * (na * nb / nab);
        }
        count += o.count;
    }
};

} // namespace

VarianceMap sketch_variance(const SketchPlan& plan) {
    const auto t0 = Clock::now();
    validate_plan(plan, "sketch_variance");
    if (plan.S == 0) throw ConfigError("sketch_variance: S must be >= 1");

    const std::size_t rows = plan.op->rows();
    const std::size_t cols = plan.op->cols();
    const std::size_t n_coils = plan.op->n_coils();
    const std::size_t m = plan.cov.m();
    const Linearization lin = plan.model->linearize(plan.linearization, plan.measured);

    auto partials = map_chunks<SquareSum>(
        plan.S, plan.chunk, plan.n_threads, [&](const ChunkRange& range) {
            SquareSum part{RealArray({rows, cols})};
            for (std::size_t s = range.begin; s < range.end; ++s) {
                ComplexArray v = probe_column(m, plan.distribution, plan.seed, s);
                ComplexArray w = apply_factor_stack(plan.cov, column_to_stack(v, n_coils, rows, cols));
                ComplexArray x = plan.op->adjoint(w);
                ComplexArray u = lin.apply_jvp(x);
                for (std::size_t i = 0; i < u.size(); ++i) part.acc[i] += std::norm(u[i]);
            }
            return part;
        });

    VarianceMap map;
    map.values = RealArray({rows, cols});
    for (const auto& part : partials)
        for (std::size_t i = 0; i < map.values.size(); ++i) map.values[i] += part.acc[i];
    const double inv = 1.0 / static_cast<double>(plan.S);
    for (std::size_t i = 0; i < map.values.size(); ++i) map.values[i] *= inv;

    assert_valid_map(map.values, "sketch_variance");
    map.meta = make_meta(plan, "sketch", plan.S, plan.seed);
    map.meta.wall_seconds = seconds_since(t0);
    return map;
}

VarianceMap naive_variance(const SketchPlan& plan) {
    const auto t0 = Clock::now();
    validate_plan(plan, "naive_variance");

    const std::size_t rows = plan.op->rows();
    const std::size_t cols = plan.op->cols();
    const std::size_t n = rows * cols;
    const Linearization lin = plan.model->linearize(plan.linearization, plan.measured);

    auto partials = map_chunks<RealArray>(
        n, plan.chunk, plan.n_threads, [&](const ChunkRange& range) {
            RealArray part({range.end - range.begin});
            ComplexArray basis = ComplexArray::zeros({rows, cols});
            for (std::size_t i = range.begin; i < range.end; ++i) {
                basis[i] = cplx(1.0, 0.0);
                ComplexArray row = lin.apply_vjp(basis);
                basis[i] = cplx(0.0, 0.0);
                ComplexArray k = plan.op->forward(row);
                ComplexArray l = apply_factor_adjoint_stack(plan.cov, k);
                part[i - range.begin] = norm2sq(l);
            }
            return part;
        });

    VarianceMap map;
    map.values = RealArray({rows, cols});
    for (std::size_t c = 0; c < partials.size(); ++c)
        for (std::size_t j = 0; j < partials[c].size(); ++j)
            map.values[c * plan.chunk + j] = partials[c][j];

    assert_valid_map(map.values, "naive_variance");
    map.meta = make_meta(plan, "naive", n, plan.seed);
    map.meta.wall_seconds = seconds_since(t0);
    return map;
}

VarianceMap mc_variance(const SketchPlan& plan, const McOptions& mc) {
    const auto t0 = Clock::now();
    validate_plan(plan, "mc_variance");
    if (mc.trials < 2) throw ConfigError("mc_variance: need at least 2 trials");
    const ComplexArray& base = mc.base ? *mc.base : plan.measured;
    base.require_same_shape(plan.measured, "mc_variance base k-space");
    const std::uint64_t noise_seed =
        mc.noise_seed ? *mc.noise_seed : derive_seed(plan.seed, /*tag=*/0x6d63u); // "mc"

    const std::size_t rows = plan.op->rows();
    const std::size_t cols = plan.op->cols();

    auto partials = map_chunks<WelfordPartial>(
        mc.trials, plan.chunk, plan.n_threads, [&](const ChunkRange& range) {
            WelfordPartial part;
            part.init({rows, cols});
            for (std::size_t t = range.begin; t < range.end; ++t) {
                const std::uint64_t trial_seed = derive_seed(noise_seed, /*tag=*/1u, t);
                ComplexArray y_t = sample_noise(plan.cov, rows, cols, trial_seed);
                y_t += base;
                ComplexArray x0 = plan.op->adjoint(y_t);
                part.add(plan.model->reconstruct(x0, plan.measured));
            }
            return part;
        });

    WelfordPartial total;
    total.init({rows, cols});
    for (const auto& part : partials) total.merge(part);

    VarianceMap map;
    map.values = RealArray({rows, cols});
    const double inv = 1.0 / static_cast<double>(total.count - 1);
    for (std::size_t i = 0; i < map.values.size(); ++i) map.values[i] = total.m2[i] * inv;

    assert_valid_map(map.values, "mc_variance");
    map.meta = make_meta(plan, "mc", mc.trials, noise_seed);
    map.meta.wall_seconds = seconds_since(t0);
    return map;
}

VarianceMap brute_force_diag(const SketchPlan& plan) {
    const auto t0 = Clock::now();
    validate_plan(plan, "brute_force_diag");
    const std::size_t rows = plan.op->rows();
    const std::size_t cols = plan.op->cols();
    const std::size_t n = rows * cols;
    if (n > 1024)
        throw SizeLimit("brute_force_diag: grid has " + std::to_string(n) +
                        " voxels, limit is 1024");
    const std::size_t n_coils = plan.op->n_coils();
    const std::size_t m = plan.cov.m();
    const Linearization lin = plan.model->linearize(plan.linearization, plan.measured);

    auto partials = map_chunks<SquareSum>(
        m, plan.chunk, plan.n_threads, [&](const ChunkRange& range) {
            SquareSum part{RealArray({rows, cols})};
            ComplexArray basis = ComplexArray::zeros({m});
            for (std::size_t q = range.begin; q < range.end; ++q) {
                basis[q] = cplx(1.0, 0.0);
                ComplexArray w =
                    apply_factor_stack(plan.cov, column_to_stack(basis, n_coils, rows, cols));
                basis[q] = cplx(0.0, 0.0);
                ComplexArray x = plan.op->adjoint(w);
                ComplexArray u = lin.apply_jvp(x);
                for (std::size_t i = 0; i < u.size(); ++i) part.acc[i] += std::norm(u[i]);
            }
            return part;
        });

    VarianceMap map;
    map.values = RealArray({rows, cols});
    for (const auto& part : partials)
        for (std::size_t i = 0; i < map.values.size(); ++i) map.values[i] += part.acc[i];

    assert_valid_map(map.values, "brute_force_diag");
    map.meta = make_meta(plan, "brute-force", m, plan.seed);
    map.meta.wall_seconds = seconds_since(t0);
    return map;
}

void write_variance_map(const std::filesystem::path& base, const VarianceMap& map) {
    write_array(base, map.values);
    std::filesystem::path meta = base;
    meta += ".meta";
    std::ostringstream alpha, wall;
    alpha << map.meta.alpha;
    wall << map.meta.wall_seconds;
    write_kv(meta, {{"estimator", map.meta.estimator},
                    {"samples", std::to_string(map.meta.samples)},
                    {"seed", std::to_string(map.meta.seed)},
                    {"model", map.meta.model_kind},
                    {"mask", map.meta.mask_desc},
                    {"alpha", alpha.str()},
                    {"wall_seconds", wall.str()}});
}

RealArray read_variance_map(const std::filesystem::path& base) { return read_real_array(base); }

} // namespace varsketch
