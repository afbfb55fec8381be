#include "varsketch/imaging_operator.hpp"

#include "varsketch/dft.hpp"
#include "varsketch/errors.hpp"

namespace varsketch {

ComplexArray roll2(const ComplexArray& a, std::ptrdiff_t dr, std::ptrdiff_t dc) {
    a.require_rank(2, "roll2");
    const std::size_t rows = a.shape()[0];
    const std::size_t cols = a.shape()[1];
    const std::size_t sr = static_cast<std::size_t>(((dr % static_cast<std::ptrdiff_t>(rows)) +
                                                     static_cast<std::ptrdiff_t>(rows)) %
                                                    static_cast<std::ptrdiff_t>(rows));
    const std::size_t sc = static_cast<std::size_t>(((dc % static_cast<std::ptrdiff_t>(cols)) +
                                                     static_cast<std::ptrdiff_t>(cols)) %
                                                    static_cast<std::ptrdiff_t>(cols));
    ComplexArray out({rows, cols});
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t rr = (r + sr) % rows;
        for (std::size_t c = 0; c < cols; ++c) out.at2(rr, (c + sc) % cols) = a.at2(r, c);
    }
    return out;
}

namespace {

// DC-to-center permutation of one (rows, cols) slice within a stack.
// `sign` +1 centers (fftshift), -1 undoes it.  A pure permutation, hence
// unitary, hence its own adjoint up to direction.
void shift_slice(ComplexArray& stack, std::size_t g, int sign, ComplexArray& scratch) {
    const std::size_t rows = stack.shape()[1];
    const std::size_t cols = stack.shape()[2];
    const std::size_t sr = sign > 0 ? rows / 2 : rows - rows / 2;
    const std::size_t sc = sign > 0 ? cols / 2 : cols - cols / 2;
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t rr = (r + sr) % rows;
        for (std::size_t c = 0; c < cols; ++c)
            scratch.at2(rr, (c + sc) % cols) = stack.at3(g, r, c);
    }
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) stack.at3(g, r, c) = scratch.at2(r, c);
}

} // namespace

ImagingOperator::ImagingOperator(ComplexArray maps, SamplingMask mask)
    : maps_(std::move(maps)), mask_(std::move(mask)) {
    maps_.require_rank(3, "ImagingOperator maps");
    n_coils_ = maps_.shape()[0];
    rows_ = maps_.shape()[1];
    cols_ = maps_.shape()[2];
    if (mask_.rows != rows_ || mask_.cols != cols_)
        throw ShapeMismatch("ImagingOperator: mask grid " + std::to_string(mask_.rows) + "x" +
                            std::to_string(mask_.cols) + " does not match maps " +
                            std::to_string(rows_) + "x" + std::to_string(cols_));
}

ComplexArray ImagingOperator::forward(const ComplexArray& image) const {
    image.require_rank(2, "ImagingOperator::forward");
    if (image.shape()[0] != rows_ || image.shape()[1] != cols_)
        throw ShapeMismatch("ImagingOperator::forward: image " +
                            detail::shape_string(image.shape()) + " vs grid " +
                            std::to_string(rows_) + "x" + std::to_string(cols_));
    ComplexArray y({n_coils_, rows_, cols_});
    ComplexArray scratch({rows_, cols_});
    for (std::size_t g = 0; g < n_coils_; ++g)
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c)
                y.at3(g, r, c) = maps_.at3(g, r, c) * image.at2(r, c);
    unitary_dft_inplace(y, /*inverse=*/false);
    for (std::size_t g = 0; g < n_coils_; ++g) shift_slice(y, g, +1, scratch);
    mask_inplace(y);
    return y;
}

ComplexArray ImagingOperator::adjoint(const ComplexArray& kspace) const {
    kspace.require_rank(3, "ImagingOperator::adjoint");
    if (kspace.shape()[0] != n_coils_ || kspace.shape()[1] != rows_ || kspace.shape()[2] != cols_)
        throw ShapeMismatch("ImagingOperator::adjoint: k-space " +
                            detail::shape_string(kspace.shape()) + " vs expected (" +
                            std::to_string(n_coils_) + ", " + std::to_string(rows_) + ", " +
                            std::to_string(cols_) + ")");
    ComplexArray work = kspace;
    mask_inplace(work);
    ComplexArray scratch({rows_, cols_});
    for (std::size_t g = 0; g < n_coils_; ++g) shift_slice(work, g, -1, scratch);
    unitary_dft_inplace(work, /*inverse=*/true);
    ComplexArray x = ComplexArray::zeros({rows_, cols_});
    for (std::size_t g = 0; g < n_coils_; ++g)
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c)
                x.at2(r, c) += std::conj(maps_.at3(g, r, c)) * work.at3(g, r, c);
    return x;
}

void ImagingOperator::mask_inplace(ComplexArray& kspace) const {
    kspace.require_rank(3, "ImagingOperator::mask_inplace");
    for (std::size_t g = 0; g < n_coils_; ++g)
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c)
                if (!mask_.at(r, c)) kspace.at3(g, r, c) = cplx(0.0, 0.0);
}

} // namespace varsketch
