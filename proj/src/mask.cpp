#include "varsketch/mask.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "varsketch/io.hpp"
#include "varsketch/rng.hpp"

namespace varsketch {

std::string to_string(MaskScheme s) {
    switch (s) {
        case MaskScheme::uniform_1d: return "uniform-1d";
        case MaskScheme::random_1d: return "random-1d";
        case MaskScheme::uniform_random_2d: return "uniform-random-2d";
        case MaskScheme::poisson_disc_2d: return "poisson-disc-2d";
    }
    return "?";
}

MaskScheme mask_scheme_from_string(const std::string& s) {
    if (s == "uniform-1d") return MaskScheme::uniform_1d;
    if (s == "random-1d") return MaskScheme::random_1d;
    if (s == "uniform-random-2d") return MaskScheme::uniform_random_2d;
    if (s == "poisson-disc-2d") return MaskScheme::poisson_disc_2d;
    throw ConfigError("unknown mask scheme '" + s + "'");
}

std::size_t SamplingMask::n_kept() const {
    std::size_t k = 0;
    for (std::uint8_t v : kept) k += v;
    return k;
}

double SamplingMask::achieved_acceleration() const {
    const std::size_t k = n_kept();
    if (k == 0) return 0.0;
    return static_cast<double>(rows * cols) / static_cast<double>(k);
}

void SamplingMask::calib_bounds(std::size_t& r0, std::size_t& r1, std::size_t& c0,
                                std::size_t& c1) const {
    const std::size_t side = std::min(calib_region, std::min(rows, cols));
    const bool one_d = scheme == MaskScheme::uniform_1d || scheme == MaskScheme::random_1d;
    if (side == 0) {
        r0 = r1 = c0 = c1 = 0;
        return;
    }
    c0 = (cols - side) / 2;
    c1 = c0 + side;
    if (one_d) {
        r0 = 0;
        r1 = rows;
    } else {
        r0 = (rows - side) / 2;
        r1 = r0 + side;
    }
}

namespace {

// Spread `count` picks evenly over `pool` (deterministic, seed-free).
std::vector<std::size_t> evenly_spaced(const std::vector<std::size_t>& pool, std::size_t count) {
    std::vector<std::size_t> out;
    out.reserve(count);
    for (std::size_t j = 0; j < count; ++j)
        out.push_back(pool[(j * pool.size()) / count]);
    return out;
}

// First `count` elements of a seeded Fisher-Yates shuffle of `pool`.
std::vector<std::size_t> seeded_sample(std::vector<std::size_t> pool, std::size_t count,
                                       std::uint64_t seed, std::uint64_t substream) {
    CounterRng rng(seed, RngStream::mask, substream);
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t w = rng.words(i).first;
        const std::size_t j = i + static_cast<std::size_t>(w % (pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    return pool;
}

struct DartResult {
    std::vector<std::size_t> points; // flat indices of accepted non-calib points
};

// Dart throwing at a fixed minimum distance; deterministic in
// (seed, substream).  Stops once `budget` points are placed.
DartResult throw_darts(std::size_t rows, std::size_t cols, double radius, std::size_t budget,
                       std::uint64_t seed, std::uint64_t substream, std::size_t cr0,
                       std::size_t cr1, std::size_t cc0, std::size_t cc1) {
    DartResult res;
    if (budget == 0) return res;
    const double r2 = radius * radius;
    const std::size_t cell = static_cast<std::size_t>(std::max(1.0, std::ceil(radius)));
    const std::size_t brows = (rows + cell - 1) / cell;
    const std::size_t bcols = (cols + cell - 1) / cell;
    std::vector<std::vector<std::size_t>> buckets(brows * bcols);
    std::vector<std::uint8_t> taken(rows * cols, 0);

    CounterRng rng(seed, RngStream::mask, substream);
    const std::size_t attempts = 40 * rows * cols;
    for (std::size_t a = 0; a < attempts && res.points.size() < budget; ++a) {
        auto [w0, w1] = rng.words(a);
        const std::size_t r = static_cast<std::size_t>(w0 % rows);
        const std::size_t c = static_cast<std::size_t>(w1 % cols);
        if (r >= cr0 && r < cr1 && c >= cc0 && c < cc1) continue; // calib handled separately
        const std::size_t flat = r * cols + c;
        if (taken[flat]) continue;
        const std::size_t br = r / cell;
        const std::size_t bc = c / cell;
        bool ok = true;
        for (std::size_t nbr = (br == 0 ? 0 : br - 1); ok && nbr <= std::min(br + 1, brows - 1); ++nbr) {
            for (std::size_t nbc = (bc == 0 ? 0 : bc - 1); ok && nbc <= std::min(bc + 1, bcols - 1); ++nbc) {
                for (std::size_t p : buckets[nbr * bcols + nbc]) {
                    const double dr = static_cast<double>(p / cols) - static_cast<double>(r);
                    const double dc = static_cast<double>(p % cols) - static_cast<double>(c);
                    if (dr * dr + dc * dc < r2) {
                        ok = false;
                        break;
                    }
                }
            }
        }
        if (!ok) continue;
        taken[flat] = 1;
        buckets[br * bcols + bc].push_back(flat);
        res.points.push_back(flat);
    }
    return res;
}

} // namespace

SamplingMask make_mask(const MaskSpec& spec) {
    if (spec.rows < 8 || spec.cols < 8)
        throw InfeasibleSpec("make_mask: grid must be at least 8x8");
    if (spec.acceleration < 1.0)
        throw InfeasibleSpec("make_mask: acceleration must be >= 1");

    SamplingMask mask;
    mask.rows = spec.rows;
    mask.cols = spec.cols;
    mask.scheme = spec.scheme;
    mask.acceleration = spec.acceleration;
    mask.rng_seed = spec.seed;
    mask.kept.assign(spec.rows * spec.cols, 0);

    if (spec.calib_region >= 0) {
        mask.calib_region = static_cast<std::size_t>(spec.calib_region);
    } else if (spec.scheme == MaskScheme::poisson_disc_2d) {
        mask.calib_region = static_cast<std::size_t>(
            std::lround(0.06 * static_cast<double>(std::min(spec.rows, spec.cols))));
    } else {
        mask.calib_region = 0;
    }

    const std::size_t n = spec.rows * spec.cols;
    const std::size_t target =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(
                                     static_cast<double>(n) / spec.acceleration)));

    if (spec.acceleration == 1.0) {
        std::fill(mask.kept.begin(), mask.kept.end(), 1);
        return mask;
    }

    std::size_t cr0, cr1, cc0, cc1;
    mask.calib_bounds(cr0, cr1, cc0, cc1);
    std::size_t calib_count = 0;
    for (std::size_t r = cr0; r < cr1; ++r)
        for (std::size_t c = cc0; c < cc1; ++c) {
            mask.kept[r * spec.cols + c] = 1;
            ++calib_count;
        }
    if (calib_count > target)
        throw InfeasibleSpec("make_mask: calibration region (" + std::to_string(calib_count) +
                             " points) exceeds the sampling budget (" + std::to_string(target) +
                             " points) at R = " + std::to_string(spec.acceleration));

    const bool one_d =
        spec.scheme == MaskScheme::uniform_1d || spec.scheme == MaskScheme::random_1d;

    if (one_d) {
        const std::size_t target_cols = std::max<std::size_t>(
            1, static_cast<std::size_t>(
                   std::lround(static_cast<double>(spec.cols) / spec.acceleration)));
        const std::size_t calib_cols = cc1 - cc0;
        if (calib_cols > target_cols)
            throw InfeasibleSpec("make_mask: calibration columns exceed the column budget");
        std::vector<std::size_t> pool;
        for (std::size_t c = 0; c < spec.cols; ++c)
            if (c < cc0 || c >= cc1) pool.push_back(c);
        const std::size_t want = target_cols - calib_cols;
        std::vector<std::size_t> picked;
        if (want > 0) {
            picked = spec.scheme == MaskScheme::uniform_1d
                         ? evenly_spaced(pool, want)
                         : seeded_sample(pool, want, spec.seed, /*substream=*/0);
        }
        for (std::size_t c : picked)
            for (std::size_t r = 0; r < spec.rows; ++r) mask.kept[r * spec.cols + c] = 1;
    } else if (spec.scheme == MaskScheme::uniform_random_2d) {
        std::vector<std::size_t> pool;
        for (std::size_t r = 0; r < spec.rows; ++r)
            for (std::size_t c = 0; c < spec.cols; ++c)
                if (!(r >= cr0 && r < cr1 && c >= cc0 && c < cc1)) pool.push_back(r * spec.cols + c);
        const std::size_t want = target - calib_count;
        for (std::size_t p : seeded_sample(std::move(pool), want, spec.seed, /*substream=*/0))
            mask.kept[p] = 1;
    } else { // poisson-disc-2d
        const std::size_t budget = target - calib_count;
        // Largest radius that still places the full budget within the
        // attempt limit, found by bisection.  Substream isolates each
        // probe run so results never depend on the search path; the
        // points of the best successful probe are kept as the mask.
        double lo = 0.7;
        double hi = 2.0 * std::sqrt(static_cast<double>(n) / std::max<std::size_t>(1, budget)) + 2.0;
        DartResult best = throw_darts(spec.rows, spec.cols, lo, budget, spec.seed,
                                      /*substream=*/1, cr0, cr1, cc0, cc1);
        if (best.points.size() < budget)
            throw InfeasibleSpec("make_mask: poisson-disc placement failed to reach the budget");
        for (int iter = 0; iter < 20; ++iter) {
            const double mid = 0.5 * (lo + hi);
            DartResult probe = throw_darts(spec.rows, spec.cols, mid, budget, spec.seed,
                                           static_cast<std::uint64_t>(iter + 2), cr0, cr1, cc0,
                                           cc1);
            if (probe.points.size() >= budget) {
                lo = mid;
                best = std::move(probe);
            } else {
                hi = mid;
            }
        }
        for (std::size_t p : best.points) mask.kept[p] = 1;
        mask.radius = lo;
    }

    const double achieved = mask.achieved_acceleration();
    if (std::abs(achieved - spec.acceleration) > 0.1 * spec.acceleration) {
        std::ostringstream os;
        os << "make_mask: achieved acceleration " << achieved << " misses target "
           << spec.acceleration << " by more than 10%";
        throw InfeasibleSpec(os.str());
    }
    return mask;
}

void write_mask(const std::filesystem::path& base, const SamplingMask& mask) {
    RealArray grid({mask.rows, mask.cols});
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = mask.kept[i] ? 1.0 : 0.0;
    write_array(base, grid);
    std::filesystem::path meta = base;
    meta += ".meta";
    std::ostringstream r_target, r_achieved, radius;
    r_target << mask.acceleration;
    r_achieved << mask.achieved_acceleration();
    radius << mask.radius;
    write_kv(meta, {{"scheme", to_string(mask.scheme)},
                    {"acceleration_target", r_target.str()},
                    {"acceleration_achieved", r_achieved.str()},
                    {"calib_region", std::to_string(mask.calib_region)},
                    {"seed", std::to_string(mask.rng_seed)},
                    {"poisson_radius", radius.str()}});
}

} // namespace varsketch
