#pragma once

// Synthetic ground-truth images.
//
//   ellipse-phantom  fixed analytic arrangement of overlapping ellipses
//   smooth-random    seeded complex field, band-limited by a Gaussian
//                    spectral window (sigma = N/10 around DC)
//   point-grid       unit impulses on a regular lattice
//
// Every phantom is normalized to peak magnitude 1, and the deterministic
// kinds carry a smooth nonzero phase ramp so purely-real degeneracies
// cannot hide complex-arithmetic bugs downstream.

#include <cstdint>
#include <string>

#include "varsketch/array.hpp"

namespace varsketch {

enum class PhantomKind { ellipse_phantom, smooth_random, point_grid };

std::string to_string(PhantomKind k);
PhantomKind phantom_kind_from_string(const std::string& s);

struct Phantom {
    std::size_t rows = 0, cols = 0;
    PhantomKind kind = PhantomKind::smooth_random;
    std::uint64_t seed = 0;
    ComplexArray image; // (rows, cols), peak magnitude 1
};

Phantom make_phantom(PhantomKind kind, std::size_t rows, std::size_t cols, std::uint64_t seed,
                     std::size_t point_spacing = 8);

} // namespace varsketch
