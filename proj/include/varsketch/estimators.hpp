#pragma once

// Variance-map backends.
//
// All four backends target the same quantity: the diagonal of
// Sigma_x = L L^H with L = J_f A^H sigma_k sqrt(alpha), the covariance of
// the reconstruction under the linearization of f at the plan's point.
//
//   sketch_variance   average of |L v|^2 over S random probes (unbiased)
//   naive_variance    per-voxel row norms ||L^H e_i||^2 (exact, n VJPs)
//   mc_variance       sample variance of reconstructions of freshly
//                     perturbed data over N trials (no linearization)
//   brute_force_diag  materializes L column by column (small grids only)
//
// Probe columns and MC trials carry their own derived seeds, and the
// averages fold fixed-size chunk partials in chunk order, so every map is
// bit-identical for any thread count.

#include <cstdint>
#include <optional>
#include <string>

#include "varsketch/array.hpp"
#include "varsketch/imaging_operator.hpp"
#include "varsketch/noise_model.hpp"
#include "varsketch/probes.hpp"
#include "varsketch/recon_model.hpp"

namespace varsketch {

struct SketchPlan {
    const ImagingOperator* op = nullptr;
    const ReconModel* model = nullptr;
    SampleCovariance cov;
    ComplexArray linearization; // x_0 image the Jacobian is taken at
    ComplexArray measured;      // y, held fixed inside DC steps
    std::size_t S = 1000;
    std::uint64_t seed = 0;
    ProbeDistribution distribution = ProbeDistribution::random_phase;
    std::size_t chunk = 64; // items per reduction chunk (fixed by config)
    std::size_t n_threads = 1;
};

struct VarianceMapMeta {
    std::string estimator;
    std::size_t samples = 0; // S, N, or basis size
    std::uint64_t seed = 0;
    std::string model_kind;
    std::string mask_desc;
    double alpha = 1.0;
    double wall_seconds = 0.0;
};

struct VarianceMap {
    RealArray values; // (rows, cols), nonnegative
    VarianceMapMeta meta;
};

struct McOptions {
    std::size_t trials = 3000;
    // Noise is added on top of this k-space; null means the plan's
    // measured y (fresh noise on measured data).  Callers with a clean
    // noise-free y can pass it to re-simulate from truth instead.
    const ComplexArray* base = nullptr;
    // Seed for trial noise; defaults to a derivation of plan.seed.
    std::optional<std::uint64_t> noise_seed;
};

VarianceMap sketch_variance(const SketchPlan& plan);
VarianceMap naive_variance(const SketchPlan& plan);
VarianceMap mc_variance(const SketchPlan& plan, const McOptions& mc);
VarianceMap brute_force_diag(const SketchPlan& plan);

// Serializes values plus a text manifest of the meta block.
void write_variance_map(const std::filesystem::path& base, const VarianceMap& map);
RealArray read_variance_map(const std::filesystem::path& base);

} // namespace varsketch
