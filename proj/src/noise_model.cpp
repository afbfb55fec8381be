#include "varsketch/noise_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "varsketch/io.hpp"
#include "varsketch/rng.hpp"

namespace varsketch {

CoilCovariance build_coil_covariance(const NoiseSourceModel& src) {
    if (src.n_sources == 0 || src.sigmas.size() != src.n_sources)
        throw ShapeMismatch("build_coil_covariance: need at least one source and matching sigmas");
    src.weights.require_rank(2, "build_coil_covariance");
    if (src.weights.dim(1) != src.n_sources)
        throw ShapeMismatch("build_coil_covariance: weights are " +
                            std::to_string(src.weights.dim(0)) + "x" +
                            std::to_string(src.weights.dim(1)) + ", expected n_sources columns");
    const std::size_t nc = src.weights.dim(0);
    CoilCovariance cov;
    cov.n_coils = nc;
    cov.matrix = HermitianMatrix(nc);
    for (std::size_t g = 0; g < nc; ++g) {
        for (std::size_t h = 0; h <= g; ++h) {
            cplx acc(0.0, 0.0);
            for (std::size_t t = 0; t < src.n_sources; ++t) {
                const double s2 = src.sigmas[t] * src.sigmas[t];
                acc += s2 * src.weights.at2(g, t) * std::conj(src.weights.at2(h, t));
            }
            cov.matrix.at(g, h) = acc;
            cov.matrix.at(h, g) = std::conj(acc);
        }
    }
    cov.matrix.symmetrize();
    cov.factor = cholesky(cov.matrix, default_jitter(cov.matrix));
    cov.scale = 1.0;
    cov.provenance = "built";
    return cov;
}

CoilCovariance estimate_coil_covariance(const ComplexArray& ksp, double corner_fraction) {
    ksp.require_rank(3, "estimate_coil_covariance");
    if (!(corner_fraction > 0.0 && corner_fraction < 1.0))
        throw ShapeMismatch("estimate_coil_covariance: corner_fraction must be in (0,1)");
    const std::size_t nc = ksp.dim(0);
    const std::size_t rows = ksp.dim(1);
    const std::size_t cols = ksp.dim(2);
    const std::size_t n = rows * cols;

    // Chebyshev distance of every grid point from the k-space center.
    const double cr = static_cast<double>(rows) / 2.0;
    const double cc = static_cast<double>(cols) / 2.0;
    std::vector<double> dist(n);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            dist[r * cols + c] = std::max(std::abs(static_cast<double>(r) - cr),
                                          std::abs(static_cast<double>(c) - cc));

    // Exactly the requested share of points, farthest first; the grid has
    // heavy distance ties, so break them by index to stay deterministic.
    std::size_t want = static_cast<std::size_t>(std::llround(corner_fraction * static_cast<double>(n)));
    if (want < 1) want = 1;
    if (want > n) want = n;
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&dist](std::size_t a, std::size_t b) { return dist[a] > dist[b]; });
    const std::vector<std::size_t> picked(order.begin(),
                                          order.begin() + static_cast<std::ptrdiff_t>(want));

    const std::size_t P = picked.size();
    if (P < std::max<std::size_t>(2, 2 * nc))
        throw TooFewSamples("estimate_coil_covariance: corner region has " + std::to_string(P) +
                            " samples, need at least " + std::to_string(std::max<std::size_t>(2, 2 * nc)));

    CoilCovariance cov;
    cov.n_coils = nc;
    cov.matrix = HermitianMatrix(nc);
    for (std::size_t i : picked) {
        const std::size_t r = i / cols;
        const std::size_t c = i % cols;
        for (std::size_t g = 0; g < nc; ++g) {
            const cplx zg = ksp.at3(g, r, c);
            for (std::size_t h = 0; h < nc; ++h)
                cov.matrix.at(g, h) += zg * std::conj(ksp.at3(h, r, c));
        }
    }
    const double norm = 1.0 / static_cast<double>(P - 1);
    for (std::size_t g = 0; g < nc; ++g)
        for (std::size_t h = 0; h < nc; ++h)
            cov.matrix.at(g, h) *= norm;
    cov.matrix.symmetrize();
    cov.factor = cholesky(cov.matrix, default_jitter(cov.matrix));
    cov.scale = 1.0;
    std::ostringstream prov;
    prov << "estimated(corner_fraction=" << corner_fraction << ", grid=" << rows << "x" << cols
         << ", samples=" << P << ")";
    cov.provenance = prov.str();
    return cov;
}

ComplexArray sample_noise(const SampleCovariance& cov, std::size_t rows, std::size_t cols,
                          std::uint64_t rng_seed) {
    const std::size_t nc = cov.coil_cov.n_coils;
    if (cov.n_freqs != rows * cols)
        throw ShapeMismatch("sample_noise: covariance is for " + std::to_string(cov.n_freqs) +
                            " frequencies, grid has " + std::to_string(rows * cols));
    const double root_alpha = std::sqrt(cov.coil_cov.scale);
    ComplexArray out({nc, rows, cols});
    std::vector<cplx> g(nc), colored(nc);
    for (std::size_t q = 0; q < cov.n_freqs; ++q) {
        CounterRng rng(rng_seed, RngStream::noise, q);
        for (std::size_t gamma = 0; gamma < nc; ++gamma) g[gamma] = rng.cgauss(gamma);
        colored = cov.coil_cov.factor.apply(g);
        const std::size_t r = q / cols;
        const std::size_t c = q % cols;
        for (std::size_t gamma = 0; gamma < nc; ++gamma)
            out.at3(gamma, r, c) = root_alpha * colored[gamma];
    }
    return out;
}

ComplexArray apply_factor(const SampleCovariance& cov, const ComplexArray& v) {
    v.require_rank(1, "apply_factor");
    if (v.size() != cov.m())
        throw ShapeMismatch("apply_factor: vector length " + std::to_string(v.size()) +
                            " vs m = " + std::to_string(cov.m()));
    const std::size_t nc = cov.coil_cov.n_coils;
    const double root_alpha = std::sqrt(cov.coil_cov.scale);
    ComplexArray out({v.size()});
    std::vector<cplx> block(nc);
    for (std::size_t q = 0; q < cov.n_freqs; ++q) {
        for (std::size_t gamma = 0; gamma < nc; ++gamma) block[gamma] = v[q * nc + gamma];
        const std::vector<cplx> colored = cov.coil_cov.factor.apply(block);
        for (std::size_t gamma = 0; gamma < nc; ++gamma)
            out[q * nc + gamma] = root_alpha * colored[gamma];
    }
    return out;
}

namespace {

enum class FactorSide { normal, adjoint };

ComplexArray apply_stack(const SampleCovariance& cov, const ComplexArray& v, FactorSide side) {
    v.require_rank(3, "apply_factor_stack");
    const std::size_t nc = cov.coil_cov.n_coils;
    if (v.dim(0) != nc || v.dim(1) * v.dim(2) != cov.n_freqs)
        throw ShapeMismatch("apply_factor_stack: stack shape does not match covariance");
    const std::size_t nf = cov.n_freqs;
    const double root_alpha = std::sqrt(cov.coil_cov.scale);
    ComplexArray out(v.shape());
    std::vector<cplx> block(nc);
    for (std::size_t q = 0; q < nf; ++q) {
        for (std::size_t gamma = 0; gamma < nc; ++gamma) block[gamma] = v[gamma * nf + q];
        const std::vector<cplx> colored = side == FactorSide::normal
                                              ? cov.coil_cov.factor.apply(block)
                                              : cov.coil_cov.factor.apply_adjoint(block);
        for (std::size_t gamma = 0; gamma < nc; ++gamma)
            out[gamma * nf + q] = root_alpha * colored[gamma];
    }
    return out;
}

} // namespace

ComplexArray apply_factor_stack(const SampleCovariance& cov, const ComplexArray& v) {
    return apply_stack(cov, v, FactorSide::normal);
}

ComplexArray apply_factor_adjoint_stack(const SampleCovariance& cov, const ComplexArray& v) {
    return apply_stack(cov, v, FactorSide::adjoint);
}

void write_coil_covariance(const std::filesystem::path& base, const CoilCovariance& cov) {
    write_array(base, cov.matrix.to_array());
    std::filesystem::path meta = base;
    meta += ".meta";
    write_kv(meta, {{"n_coils", std::to_string(cov.n_coils)},
                    {"scale", std::to_string(cov.scale)},
                    {"provenance", cov.provenance}});
}

CoilCovariance read_coil_covariance(const std::filesystem::path& base) {
    const ComplexArray m = read_complex_array(base);
    CoilCovariance cov;
    cov.matrix = HermitianMatrix::from_dense(m, 1e-9);
    cov.n_coils = cov.matrix.dim();
    cov.factor = cholesky(cov.matrix, default_jitter(cov.matrix));
    std::filesystem::path meta = base;
    meta += ".meta";
    for (const auto& [k, v] : read_kv(meta)) {
        if (k == "scale") cov.scale = std::stod(v);
        if (k == "provenance") cov.provenance = v;
    }
    return cov;
}

} // namespace varsketch
