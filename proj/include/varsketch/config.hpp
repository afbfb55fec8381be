#pragma once

// Experiment configuration: a single JSON file with nested keys, loaded
// with full validation before any computation starts.  Every validation
// failure names the offending field path.  Grammar and defaults are
// documented in the README.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "varsketch/mask.hpp"
#include "varsketch/phantoms.hpp"
#include "varsketch/probes.hpp"
#include "varsketch/recon_model.hpp"

namespace varsketch {

enum class NoiseMode { sources, estimated, identity };
enum class LinPoint { measured, truth };
enum class EstimatorKind { sketch, naive, mc, brute };

std::string to_string(NoiseMode m);
std::string to_string(LinPoint p);
std::string to_string(EstimatorKind e);

struct NoiseConfig {
    NoiseMode mode = NoiseMode::sources;
    double alpha = 1.0;
    double base_sigma = 0.01;
    std::size_t n_sources = 0; // 0 means coil count
    double corner_fraction = 0.1;
    std::optional<std::uint64_t> weights_seed; // source couplings; default derived
};

struct PhantomConfig {
    PhantomKind kind = PhantomKind::smooth_random;
    std::optional<std::uint64_t> seed; // default derived from master seed
    std::size_t point_spacing = 8;
};

struct MaskConfig {
    MaskScheme scheme = MaskScheme::poisson_disc_2d;
    double acceleration = 8.0;
    std::optional<std::uint64_t> seed;
    int calib_region = -1;
};

struct SweepConfig {
    std::string param; // one of S, N, alpha, R, K, scheme
    std::vector<double> values;
    std::vector<std::string> scheme_values;
};

struct BenchConfig {
    std::size_t repeats = 3;
};

struct ExperimentConfig {
    std::size_t rows = 32, cols = 32;
    std::size_t n_coils = 4;
    PhantomConfig phantom;
    MaskConfig mask;
    NoiseConfig noise;
    ModelSpec model;
    std::vector<EstimatorKind> estimators = {EstimatorKind::sketch, EstimatorKind::mc};
    std::size_t sketch_S = 1000;
    ProbeDistribution distribution = ProbeDistribution::random_phase;
    std::size_t mc_trials = 3000;
    LinPoint linearization = LinPoint::measured;
    std::size_t chunk = 64;
    std::size_t threads = 1;
    std::uint64_t master_seed = 1;
    std::string out_dir = "out";
    std::optional<SweepConfig> sweep;
    BenchConfig bench;

    bool has_estimator(EstimatorKind e) const {
        for (EstimatorKind k : estimators)
            if (k == e) return true;
        return false;
    }
};

// Parses and validates; throws ConfigError with a field path on any
// problem.  Unknown keys are rejected (they are usually typos).
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text, const std::string& origin);

// Round-trips the resolved configuration (defaults filled in) to JSON so
// a run can be reproduced from its manifest alone.
std::string config_to_json(const ExperimentConfig& cfg);

} // namespace varsketch
