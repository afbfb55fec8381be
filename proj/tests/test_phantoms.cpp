#include "doctest.h"

#include <cmath>

#include "varsketch/dft.hpp"
#include "varsketch/phantoms.hpp"

#include "test_support.hpp"

using namespace varsketch;

namespace {

double peak_magnitude(const ComplexArray& img) {
    double m = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i) m = std::max(m, std::abs(img[i]));
    return m;
}

} // namespace

TEST_CASE("every phantom kind is normalized to unit peak magnitude") {
    for (PhantomKind k :
         {PhantomKind::ellipse_phantom, PhantomKind::smooth_random, PhantomKind::point_grid}) {
        const Phantom p = make_phantom(k, 32, 32, 41);
        CHECK(p.rows == 32);
        CHECK(p.cols == 32);
        CHECK(p.image.shape() == std::vector<std::size_t>{32, 32});
        CHECK(peak_magnitude(p.image) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("point-grid phantoms place unit impulses on the requested lattice") {
    const Phantom p = make_phantom(PhantomKind::point_grid, 16, 16, 0, 8);
    std::size_t nonzero = 0;
    for (std::size_t r = 0; r < 16; ++r)
        for (std::size_t c = 0; c < 16; ++c) {
            const double mag = std::abs(p.image.at2(r, c));
            if (mag > 0.0) {
                ++nonzero;
                CHECK(mag == doctest::Approx(1.0).epsilon(1e-12));
                CHECK(r % 8 == 4); // lattice is centered inside each cell
                CHECK(c % 8 == 4);
            }
        }
    CHECK(nonzero == 4);
}

TEST_CASE("smooth-random phantoms are band limited") {
    const Phantom p = make_phantom(PhantomKind::smooth_random, 32, 32, 41);
    const ComplexArray k = unitary_dft(p.image);
    // spectral energy outside the low-frequency quarter-band (aliased
    // frequency index in (8, 24)) must be negligible for sigma = N/10
    double inside = 0.0, outside = 0.0;
    for (std::size_t r = 0; r < 32; ++r)
        for (std::size_t c = 0; c < 32; ++c) {
            const bool high_r = r > 8 && r < 24;
            const bool high_c = c > 8 && c < 24;
            const double e = std::norm(k.at2(r, c));
            if (high_r || high_c)
                outside += e;
            else
                inside += e;
        }
    CHECK(outside < 0.01 * (inside + outside));
}

TEST_CASE("deterministic kinds carry a genuinely complex phase") {
    for (PhantomKind k : {PhantomKind::ellipse_phantom, PhantomKind::smooth_random}) {
        const Phantom p = make_phantom(k, 16, 16, 7);
        double max_imag = 0.0;
        for (std::size_t i = 0; i < p.image.size(); ++i)
            max_imag = std::max(max_imag, std::abs(p.image[i].imag()));
        CHECK(max_imag > 1e-3);
    }
}

TEST_CASE("phantoms are reproducible and seed sensitive") {
    const Phantom a = make_phantom(PhantomKind::smooth_random, 16, 16, 5);
    const Phantom b = make_phantom(PhantomKind::smooth_random, 16, 16, 5);
    const Phantom c = make_phantom(PhantomKind::smooth_random, 16, 16, 6);
    CHECK(testsupport::max_abs_diff(a.image, b.image) == 0.0);
    CHECK(testsupport::max_abs_diff(a.image, c.image) > 1e-3);

    // the ellipse arrangement ignores the seed entirely
    const Phantom e1 = make_phantom(PhantomKind::ellipse_phantom, 16, 16, 5);
    const Phantom e2 = make_phantom(PhantomKind::ellipse_phantom, 16, 16, 99);
    CHECK(testsupport::max_abs_diff(e1.image, e2.image) == 0.0);
}

TEST_CASE("phantom construction guards") {
    CHECK_THROWS_AS(make_phantom(PhantomKind::smooth_random, 4, 4, 0), ShapeMismatch);
    CHECK_THROWS_AS(make_phantom(PhantomKind::point_grid, 16, 16, 0, 0), ConfigError);
    for (PhantomKind k :
         {PhantomKind::ellipse_phantom, PhantomKind::smooth_random, PhantomKind::point_grid})
        CHECK(phantom_kind_from_string(to_string(k)) == k);
    CHECK_THROWS_AS(phantom_kind_from_string("shepp"), ConfigError);
}
