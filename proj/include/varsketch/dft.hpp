#pragma once

// Unitary 2-D discrete Fourier transforms.
//
// Convention (documented contract): forward kernel exp(-2*pi*i*j*k/N),
// symmetric 1/sqrt(N) scaling on both directions, so unitary_dft and
// unitary_idft are exact inverses AND exact adjoints of each other.
// Power-of-two lengths take a radix-2 FFT; other lengths fall back to
// direct summation, which is fine at the grid sizes this library targets.

#include "varsketch/array.hpp"

namespace varsketch {

// Forward / inverse unitary DFT of a rank-2 (rows, cols) array.
ComplexArray unitary_dft(const ComplexArray& image);
ComplexArray unitary_idft(const ComplexArray& kspace);

// In-place transform; accepts rank 2, or rank 3 treated as a stack of
// independent (rows, cols) slices along the leading axis.
void unitary_dft_inplace(ComplexArray& a, bool inverse);

} // namespace varsketch
