#pragma once

// Undersampling masks on a centered k-space grid (DC at rows/2, cols/2).
//
// Schemes:
//   uniform-1d        evenly spaced fully-sampled columns
//   random-1d         seeded random fully-sampled columns
//   uniform-random-2d seeded random points
//   poisson-disc-2d   dart throwing with a minimum-distance radius chosen
//                     by bisection to hit the target density
//
// The calibration region (when nonzero) is a fully sampled center band:
// center columns for the 1-d schemes, a center square for the 2-d ones.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "varsketch/array.hpp"

namespace varsketch {

enum class MaskScheme { uniform_1d, random_1d, uniform_random_2d, poisson_disc_2d };

std::string to_string(MaskScheme s);
MaskScheme mask_scheme_from_string(const std::string& s);

struct MaskSpec {
    MaskScheme scheme = MaskScheme::poisson_disc_2d;
    std::size_t rows = 0, cols = 0;
    double acceleration = 1.0; // target R
    std::uint64_t seed = 0;
    // Center calibration size in pixels; negative means the scheme default
    // (6% of the grid side for poisson-disc-2d, none otherwise).
    int calib_region = -1;
};

struct SamplingMask {
    std::size_t rows = 0, cols = 0;
    std::vector<std::uint8_t> kept; // rows*cols, row-major, 0/1
    MaskScheme scheme = MaskScheme::uniform_1d;
    double acceleration = 1.0; // target R
    std::size_t calib_region = 0;
    std::uint64_t rng_seed = 0;
    double radius = 0.0; // poisson-disc minimum distance, 0 otherwise

    std::size_t n_kept() const;
    double achieved_acceleration() const;
    bool at(std::size_t r, std::size_t c) const { return kept[r * cols + c] != 0; }

    // center calibration bounds [r0, r1) x [c0, c1); full column height for
    // the 1-d schemes
    void calib_bounds(std::size_t& r0, std::size_t& r1, std::size_t& c0, std::size_t& c1) const;
};

SamplingMask make_mask(const MaskSpec& spec);

// Grid (as 0/1 float64) plus a text sidecar.
void write_mask(const std::filesystem::path& base, const SamplingMask& mask);

} // namespace varsketch
