#pragma once

// Correlated multi-coil k-space noise.
//
// A small ensemble of independent zero-mean Gaussian sources couples into
// the coils through complex weights, giving the coil covariance
// S = W * diag(sigma_tau^2) * W^H.  Across frequencies the noise is white,
// so the full k-space covariance is block diagonal with one copy of S per
// frequency; it is never materialized, every application goes through the
// per-frequency coil block.
//
// Flat length-m vectors use the frequency-major stacking v[q*n_c + gamma]
// (the layout in which the implied matrix is literally block diagonal).
// Rank-3 (coils, rows, cols) stacks use the natural coil-slice layout;
// both views apply the same operator.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "varsketch/array.hpp"
#include "varsketch/linalg.hpp"

namespace varsketch {

struct NoiseSourceModel {
    std::size_t n_sources = 0;
    std::vector<double> sigmas;  // per-source standard deviations
    ComplexArray weights;        // (n_coils, n_sources) coupling weights
};

// Coil-level covariance with its Cholesky factor.  `factor` factors the
// unscaled matrix; the stored scale alpha enters applications as
// sqrt(alpha), so rescaling never needs a refactorization.
struct CoilCovariance {
    std::size_t n_coils = 0;
    HermitianMatrix matrix;
    CholeskyFactor factor;
    double scale = 1.0;
    std::string provenance; // "built" or "estimated(corner_fraction=..., grid=...)"

    CoilCovariance with_scale(double alpha) const {
        CoilCovariance c = *this;
        c.scale = alpha;
        return c;
    }
};

// Block-diagonal k-space covariance view: one coil block per frequency.
struct SampleCovariance {
    CoilCovariance coil_cov;
    std::size_t n_freqs = 0;

    std::size_t m() const { return n_freqs * coil_cov.n_coils; }
};

// S = W * diag(sigma^2) * W^H, factored, scale 1.
CoilCovariance build_coil_covariance(const NoiseSourceModel& src);

// Sample covariance over the corner_fraction share of grid points
// farthest (Chebyshev) from the k-space center, distance ties broken by
// index so the selection is deterministic.
CoilCovariance estimate_coil_covariance(const ComplexArray& ksp, double corner_fraction);

// One draw of correlated k-space noise, shape (n_coils, rows, cols).
// Per-frequency counter-based substreams make generation order- and
// thread-independent.
ComplexArray sample_noise(const SampleCovariance& cov, std::size_t rows, std::size_t cols,
                          std::uint64_t rng_seed);

// sqrt(alpha) * sigma_k * v on a flat frequency-major vector of length m.
ComplexArray apply_factor(const SampleCovariance& cov, const ComplexArray& v);

// Same operator on a (n_coils, rows, cols) k-space stack.
ComplexArray apply_factor_stack(const SampleCovariance& cov, const ComplexArray& v);

// Adjoint sqrt(alpha) * sigma_k^H on a k-space stack (used by the
// row-by-row estimator backend).
ComplexArray apply_factor_adjoint_stack(const SampleCovariance& cov, const ComplexArray& v);

// Serialization: <base>.hdr/.bin hold the coil matrix; <base>.meta records
// scale and provenance.
void write_coil_covariance(const std::filesystem::path& base, const CoilCovariance& cov);
CoilCovariance read_coil_covariance(const std::filesystem::path& base);

// Default Cholesky jitter for estimated covariances.
inline double default_jitter(const HermitianMatrix& m) {
    return m.dim() ? 1e-12 * m.trace_real() / static_cast<double>(m.dim()) : 0.0;
}

} // namespace varsketch
