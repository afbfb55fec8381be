#pragma once

// Experiment orchestration: builds the full synthetic pipeline from a
// validated config, runs the requested estimator backends, and emits
// artifacts (arrays, manifests, reports, difference maps, renders).
//
// Seed policy: every random ingredient draws its own seed from the master
// seed through tagged derivations (mask, phantom, source couplings,
// acquisition noise, calibration scan, probes), so one integer pins down
// the entire experiment bit-for-bit.

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "varsketch/config.hpp"
#include "varsketch/estimators.hpp"
#include "varsketch/metrics.hpp"

namespace varsketch {

// Fully wired experiment state.  The plan points at op/model, which live
// behind stable heap allocations, so Pipeline is movable.
struct Pipeline {
    Phantom phantom;
    std::unique_ptr<ImagingOperator> op;
    std::unique_ptr<ReconModel> model;
    CoilCovariance acq_cov; // covariance acquisition noise is drawn from
    ComplexArray y_clean;   // noise-free forward of the phantom
    ComplexArray measured;  // y_clean (+ acquisition noise unless truth mode)
    SketchPlan plan;        // linearization = A^H measured

    std::uint64_t phantom_seed = 0, mask_seed = 0, couplings_seed = 0;
    std::uint64_t acq_seed = 0, cal_seed = 0, probe_seed = 0;
};

Pipeline build_pipeline(const ExperimentConfig& cfg);

struct RunArtifacts {
    std::filesystem::path out_dir;
    std::map<EstimatorKind, VarianceMap> maps;
    // (name, reference name, report) for every pair that was compared
    std::vector<std::tuple<std::string, std::string, ComparisonReport>> reports;
};

// Runs every estimator in cfg.estimators and writes all artifacts under
// cfg.out_dir.  On failure every file this run created is removed.
RunArtifacts run_experiment(const ExperimentConfig& cfg);

struct BenchRow {
    std::string estimator;
    double median_seconds = 0.0;
    std::size_t mem_estimate_bytes = 0; // transient working set model
};

// Times each estimator bench.repeats times on one shared pipeline and
// reports medians; writes bench.txt / bench.csv under cfg.out_dir.
std::vector<BenchRow> run_benchmark(const ExperimentConfig& cfg);

// Sweeps cfg.sweep.param over its values; emits per-value maps plus a
// convergence table (param, nrmse, pcc) against the reference backend.
std::vector<ConvergenceRow> run_sweep(const ExperimentConfig& cfg);

// Renders a stored real map to an 8-bit image: grayscale PGM, or a
// signed red/blue PPM for difference maps.  Amplification scales values
// before clipping, leaving the stored data untouched.
void render_map(const std::filesystem::path& map_base, const std::filesystem::path& image_path,
                double amplify, bool signed_map);

} // namespace varsketch
