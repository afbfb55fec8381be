#include "varsketch/sensitivity.hpp"

#include <cmath>

#include "varsketch/errors.hpp"

namespace varsketch {

ComplexArray birdcage_maps(std::size_t n_coils, std::size_t rows, std::size_t cols) {
    if (n_coils == 0 || rows == 0 || cols == 0)
        throw ShapeMismatch("birdcage_maps: coils, rows and cols must be positive");

    ComplexArray maps({n_coils, rows, cols});
    const double cy = 0.5 * static_cast<double>(rows - 1);
    const double cx = 0.5 * static_cast<double>(cols - 1);
    const double orbit = 0.75 * static_cast<double>(std::max(rows, cols));

    for (std::size_t g = 0; g < n_coils; ++g) {
        const double ang = 2.0 * M_PI * static_cast<double>(g) / static_cast<double>(n_coils);
        const double coil_y = cy + orbit * std::sin(ang);
        const double coil_x = cx + orbit * std::cos(ang);
        // Unit vector from the coil toward the image center; phase is the
        // angle of each pixel relative to this direction, which keeps the
        // atan2 branch cut outside the field of view.
        const double iny = (cy - coil_y) / orbit;
        const double inx = (cx - coil_x) / orbit;
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                const double dy = static_cast<double>(r) - coil_y;
                const double dx = static_cast<double>(c) - coil_x;
                const double d = std::sqrt(dy * dy + dx * dx);
                const double along = dy * iny + dx * inx;
                const double across = dx * iny - dy * inx;
                const double phi = 0.5 * std::atan2(across, along);
                maps.at3(g, r, c) = (orbit / d) * cplx(std::cos(phi), std::sin(phi));
            }
        }
    }

    // sum-of-squares normalization
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            double ss = 0.0;
            for (std::size_t g = 0; g < n_coils; ++g) ss += std::norm(maps.at3(g, r, c));
            const double inv = 1.0 / std::sqrt(ss);
            for (std::size_t g = 0; g < n_coils; ++g) maps.at3(g, r, c) *= inv;
        }
    }
    return maps;
}

} // namespace varsketch
