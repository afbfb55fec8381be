#pragma once

// Multi-coil Fourier encoding operator A and its exact adjoint A^H.
//
//   forward:  y_g = M . shift(F(S_g . x))        per coil g
//   adjoint:  x   = sum_g conj(S_g) . F^{-1}(unshift(M . y_g))
//
// where F is the unitary DFT, S_g the coil sensitivity map and M the 0/1
// sampling mask.  k-space is stored centered (DC at rows/2, cols/2); the
// shift is a pure index permutation, so <Ax, y> = <x, A^H y> holds to
// rounding error.
//
// Shapes: image (rows, cols); k-space stack (coils, rows, cols).

#include <cstddef>

#include "varsketch/array.hpp"
#include "varsketch/mask.hpp"

namespace varsketch {

// Circular shift by (dr, dc); out(r, c) = in((r - dr) mod rows, (c - dc) mod cols).
ComplexArray roll2(const ComplexArray& a, std::ptrdiff_t dr, std::ptrdiff_t dc);

class ImagingOperator {
public:
    // maps: (coils, rows, cols) sensitivity stack.  The mask grid must
    // match the map grid.
    ImagingOperator(ComplexArray maps, SamplingMask mask);

    std::size_t n_coils() const { return n_coils_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t image_size() const { return rows_ * cols_; }
    std::size_t kspace_size() const { return n_coils_ * rows_ * cols_; }

    const ComplexArray& maps() const { return maps_; }
    const SamplingMask& mask() const { return mask_; }

    // image (rows, cols) -> masked centered k-space (coils, rows, cols)
    ComplexArray forward(const ComplexArray& image) const;
    // masked centered k-space (coils, rows, cols) -> image (rows, cols)
    ComplexArray adjoint(const ComplexArray& kspace) const;

    // Applies the mask alone (zeroes dropped frequencies on every coil).
    void mask_inplace(ComplexArray& kspace) const;

private:
    ComplexArray maps_;
    SamplingMask mask_;
    std::size_t n_coils_, rows_, cols_;
};

} // namespace varsketch
