#include "varsketch/phantoms.hpp"

#include <cmath>

#include "varsketch/dft.hpp"
#include "varsketch/errors.hpp"
#include "varsketch/rng.hpp"

namespace varsketch {

std::string to_string(PhantomKind k) {
    switch (k) {
        case PhantomKind::ellipse_phantom: return "ellipse-phantom";
        case PhantomKind::smooth_random: return "smooth-random";
        case PhantomKind::point_grid: return "point-grid";
    }
    return "?";
}

PhantomKind phantom_kind_from_string(const std::string& s) {
    if (s == "ellipse-phantom") return PhantomKind::ellipse_phantom;
    if (s == "smooth-random") return PhantomKind::smooth_random;
    if (s == "point-grid") return PhantomKind::point_grid;
    throw ConfigError("unknown phantom kind '" + s + "'");
}

namespace {

struct Ellipse {
    double cy, cx, ry, rx, angle, amplitude;
};

// Fixed layout in the unit square [-1, 1]^2: one outer shell, interior
// lobes of varying intensity, and two small off-axis inclusions.
constexpr Ellipse kEllipses[] = {
    {0.00, 0.00, 0.88, 0.70, 0.0, 1.00},
    {0.00, 0.00, 0.82, 0.64, 0.0, -0.45},
    {-0.20, 0.22, 0.30, 0.14, 0.35, 0.35},
    {-0.20, -0.24, 0.32, 0.16, -0.30, 0.25},
    {0.35, 0.00, 0.22, 0.26, 0.0, 0.30},
    {-0.05, 0.00, 0.10, 0.08, 0.0, 0.20},
    {0.52, 0.28, 0.07, 0.06, 0.0, 0.18},
    {0.52, -0.28, 0.07, 0.06, 0.0, 0.18},
};

void apply_phase_ramp(ComplexArray& img) {
    const std::size_t rows = img.shape()[0];
    const std::size_t cols = img.shape()[1];
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            const double t = 2.0 * M_PI * (0.13 * static_cast<double>(r) / static_cast<double>(rows) +
                                           0.07 * static_cast<double>(c) / static_cast<double>(cols));
            img.at2(r, c) *= cplx(std::cos(t), std::sin(t));
        }
}

void normalize_peak(ComplexArray& img) {
    double peak = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i) peak = std::max(peak, std::abs(img[i]));
    if (peak > 0.0) img *= cplx(1.0 / peak, 0.0);
}

ComplexArray ellipse_image(std::size_t rows, std::size_t cols) {
    ComplexArray img = ComplexArray::zeros({rows, cols});
    for (std::size_t r = 0; r < rows; ++r) {
        const double y = 2.0 * static_cast<double>(r) / static_cast<double>(rows - 1) - 1.0;
        for (std::size_t c = 0; c < cols; ++c) {
            const double x = 2.0 * static_cast<double>(c) / static_cast<double>(cols - 1) - 1.0;
            double v = 0.0;
            for (const Ellipse& e : kEllipses) {
                const double dy = y - e.cy;
                const double dx = x - e.cx;
                const double ca = std::cos(e.angle);
                const double sa = std::sin(e.angle);
                const double uy = (ca * dy + sa * dx) / e.ry;
                const double ux = (-sa * dy + ca * dx) / e.rx;
                if (uy * uy + ux * ux <= 1.0) v += e.amplitude;
            }
            img.at2(r, c) = cplx(v, 0.0);
        }
    }
    return img;
}

ComplexArray smooth_random_image(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    // centered spectrum, Gaussian amplitude window, then inverse transform
    ComplexArray spec({rows, cols});
    const double sigma = static_cast<double>(std::min(rows, cols)) / 10.0;
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    CounterRng rng(seed, RngStream::phantom);
    for (std::size_t r = 0; r < rows; ++r) {
        const double dr = static_cast<double>(r) - static_cast<double>(rows / 2);
        for (std::size_t c = 0; c < cols; ++c) {
            const double dc = static_cast<double>(c) - static_cast<double>(cols / 2);
            const double w = std::exp(-(dr * dr + dc * dc) * inv2s2);
            spec.at2(r, c) = w * rng.cgauss(r * cols + c);
        }
    }
    // undo the centering so DC sits at index 0 for the transform
    ComplexArray shifted({rows, cols});
    const std::size_t sr = rows - rows / 2;
    const std::size_t sc = cols - cols / 2;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            shifted.at2((r + sr) % rows, (c + sc) % cols) = spec.at2(r, c);
    return unitary_idft(shifted);
}

ComplexArray point_grid_image(std::size_t rows, std::size_t cols, std::size_t spacing) {
    ComplexArray img = ComplexArray::zeros({rows, cols});
    for (std::size_t r = spacing / 2; r < rows; r += spacing)
        for (std::size_t c = spacing / 2; c < cols; c += spacing) img.at2(r, c) = cplx(1.0, 0.0);
    return img;
}

} // namespace

Phantom make_phantom(PhantomKind kind, std::size_t rows, std::size_t cols, std::uint64_t seed,
                     std::size_t point_spacing) {
    if (rows < 8 || cols < 8) throw ShapeMismatch("make_phantom: grid must be at least 8x8");
    Phantom p;
    p.rows = rows;
    p.cols = cols;
    p.kind = kind;
    p.seed = seed;
    switch (kind) {
        case PhantomKind::ellipse_phantom:
            p.image = ellipse_image(rows, cols);
            apply_phase_ramp(p.image);
            break;
        case PhantomKind::smooth_random:
            p.image = smooth_random_image(rows, cols, seed);
            break;
        case PhantomKind::point_grid:
            if (point_spacing == 0) throw ConfigError("make_phantom: point spacing must be >= 1");
            p.image = point_grid_image(rows, cols, point_spacing);
            apply_phase_ramp(p.image);
            break;
    }
    normalize_peak(p.image);
    return p;
}

} // namespace varsketch
