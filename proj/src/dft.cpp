#include "varsketch/dft.hpp"

#include <cmath>
#include <map>
#include <vector>

namespace varsketch {
namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Full twiddle table exp(-2*pi*i*k/n) for k in [0, n).  Cached per
// length; thread_local so hot transform loops never take a lock.
const std::vector<cplx>& twiddles(std::size_t n) {
    thread_local std::map<std::size_t, std::vector<cplx>> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<cplx> w(n);
    for (std::size_t k = 0; k < n; ++k)
        w[k] = std::polar(1.0, -2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n));
    return cache.emplace(n, std::move(w)).first->second;
}

// Iterative radix-2 Cooley-Tukey, unscaled.
void fft_pow2_inplace(cplx* x, std::size_t n, bool inverse) {
    if (n < 2) return;
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    const std::vector<cplx>& w = twiddles(n);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t step = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx tw = w[k * step];
                if (inverse) tw = std::conj(tw);
                const cplx u = x[i + k];
                const cplx v = x[i + k + len / 2] * tw;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
            }
        }
    }
}

// Direct O(n^2) summation for lengths without a radix-2 path, unscaled.
void dft_direct(const cplx* in, cplx* out, std::size_t n, bool inverse) {
    const std::vector<cplx>& w = twiddles(n);
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc(0.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            cplx tw = w[(j * k) % n];
            if (inverse) tw = std::conj(tw);
            acc += in[j] * tw;
        }
        out[k] = acc;
    }
}

void transform_1d(cplx* x, std::size_t n, bool inverse, std::vector<cplx>& scratch) {
    if (is_pow2(n)) {
        fft_pow2_inplace(x, n, inverse);
    } else {
        scratch.resize(n);
        dft_direct(x, scratch.data(), n, inverse);
        for (std::size_t i = 0; i < n; ++i) x[i] = scratch[i];
    }
}

// One (rows, cols) slice: transform rows, then columns, then apply the
// unitary 1/sqrt(rows*cols) scale once.
void dft2_slice(cplx* data, std::size_t rows, std::size_t cols, bool inverse) {
    std::vector<cplx> scratch;
    for (std::size_t r = 0; r < rows; ++r)
        transform_1d(data + r * cols, cols, inverse, scratch);

    std::vector<cplx> col(rows);
    for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t r = 0; r < rows; ++r) col[r] = data[r * cols + c];
        transform_1d(col.data(), rows, inverse, scratch);
        for (std::size_t r = 0; r < rows; ++r) data[r * cols + c] = col[r];
    }

    const double scale = 1.0 / std::sqrt(static_cast<double>(rows) * static_cast<double>(cols));
    const std::size_t n = rows * cols;
    for (std::size_t i = 0; i < n; ++i) data[i] *= scale;
}

} // namespace

void unitary_dft_inplace(ComplexArray& a, bool inverse) {
    if (a.rank() == 2) {
        dft2_slice(a.data(), a.dim(0), a.dim(1), inverse);
    } else if (a.rank() == 3) {
        const std::size_t slice = a.dim(1) * a.dim(2);
        for (std::size_t s = 0; s < a.dim(0); ++s)
            dft2_slice(a.data() + s * slice, a.dim(1), a.dim(2), inverse);
    } else {
        throw ShapeMismatch("unitary_dft: expected a rank-2 image or rank-3 stack");
    }
}

ComplexArray unitary_dft(const ComplexArray& image) {
    image.require_rank(2, "unitary_dft");
    ComplexArray out = image;
    unitary_dft_inplace(out, /*inverse=*/false);
    return out;
}

ComplexArray unitary_idft(const ComplexArray& kspace) {
    kspace.require_rank(2, "unitary_idft");
    ComplexArray out = kspace;
    unitary_dft_inplace(out, /*inverse=*/true);
    return out;
}

} // namespace varsketch
