#pragma once

// Synthetic birdcage-style coil sensitivity maps.
//
// Coil centers sit on a circle of radius 0.75 * max(rows, cols) around the
// image center.  Magnitude falls off as 1/distance to the coil center and
// the phase varies smoothly with the angle seen from the coil.  Maps are
// normalized so the sum-of-squares magnitude is exactly 1 at every pixel.

#include <cstddef>

#include "varsketch/array.hpp"

namespace varsketch {

// Returns a (coils, rows, cols) complex stack with unit sum-of-squares.
ComplexArray birdcage_maps(std::size_t n_coils, std::size_t rows, std::size_t cols);

} // namespace varsketch
