#pragma once

// Counter-based random number generation (Philox 4x32-10).
//
// Every random quantity in the library is addressed, not drawn from a
// stateful stream: value = f(seed, stream, index).  This makes generation
// order-independent, so parallel code paths produce bit-identical results
// for any thread count, and individual probe columns / noise draws can be
// regenerated in isolation.

#include <array>
#include <cmath>
#include <cstdint>

#include "varsketch/array.hpp"

namespace varsketch {

namespace philox {

constexpr std::uint32_t kW32A = 0x9E3779B9; // golden ratio
constexpr std::uint32_t kW32B = 0xBB67AE85; // sqrt(3) - 1
constexpr std::uint32_t kM4x32A = 0xD2511F53;
constexpr std::uint32_t kM4x32B = 0xCD9E8D57;

inline std::uint32_t mulhi(std::uint32_t a, std::uint32_t b) {
    return static_cast<std::uint32_t>((static_cast<std::uint64_t>(a) * b) >> 32);
}

// One 10-round Philox block: 128 counter bits + 64 key bits -> 128
// random bits.
inline std::array<std::uint32_t, 4> block(std::uint64_t key,
                                          std::uint64_t ctr_hi,
                                          std::uint64_t ctr_lo) {
    std::uint32_t c0 = static_cast<std::uint32_t>(ctr_lo);
    std::uint32_t c1 = static_cast<std::uint32_t>(ctr_lo >> 32);
    std::uint32_t c2 = static_cast<std::uint32_t>(ctr_hi);
    std::uint32_t c3 = static_cast<std::uint32_t>(ctr_hi >> 32);
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    for (int round = 0; round < 10; ++round) {
        const std::uint32_t lo0 = kM4x32A * c0;
        const std::uint32_t hi0 = mulhi(kM4x32A, c0);
        const std::uint32_t lo1 = kM4x32B * c2;
        const std::uint32_t hi1 = mulhi(kM4x32B, c2);
        const std::uint32_t n0 = hi1 ^ c1 ^ k0;
        const std::uint32_t n1 = lo1;
        const std::uint32_t n2 = hi0 ^ c3 ^ k1;
        const std::uint32_t n3 = lo0;
        c0 = n0; c1 = n1; c2 = n2; c3 = n3;
        k0 += kW32A;
        k1 += kW32B;
    }
    return {c0, c1, c2, c3};
}

inline std::uint64_t join(std::uint32_t lo, std::uint32_t hi) {
    return static_cast<std::uint64_t>(lo) | (static_cast<std::uint64_t>(hi) << 32);
}

} // namespace philox

// Stream tags keep unrelated consumers of the same seed out of each
// other's counter space.
enum class RngStream : std::uint32_t {
    probe = 1,
    noise = 2,
    weights = 3,
    mask = 4,
    phantom = 5,
    covariance = 6,
    derive = 7,
    oracle = 8,
};

// Addressable generator for a fixed (seed, stream, substream) triple.
// `index` enumerates draws within the triple.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, RngStream stream, std::uint64_t substream = 0)
        : key_(seed),
          hi_(philox::join(static_cast<std::uint32_t>(stream),
                           static_cast<std::uint32_t>(substream & 0xFFFFFFFFu)) ^
               (substream & 0xFFFFFFFF00000000ull)) {}

    // Two independent 64-bit words at `index`.
    std::pair<std::uint64_t, std::uint64_t> words(std::uint64_t index) const {
        auto b = philox::block(key_, hi_, index);
        return {philox::join(b[0], b[1]), philox::join(b[2], b[3])};
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform(std::uint64_t index) const {
        return static_cast<double>(words(index).first >> 11) * 0x1.0p-53;
    }

    // Pair of independent standard normals (Box-Muller).
    std::pair<double, double> gauss_pair(std::uint64_t index) const {
        auto [w0, w1] = words(index);
        // (0,1] for the log, [0,1) for the angle
        const double u1 = (static_cast<double>(w0 >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(w1 >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * M_PI * u2;
        return {r * std::cos(t), r * std::sin(t)};
    }

    // Circular complex normal with E[v] = 0, E[|v|^2] = 1
    // (real and imaginary parts N(0, 1/2)).
    cplx cgauss(std::uint64_t index) const {
        auto [g0, g1] = gauss_pair(index);
        return cplx(g0 * M_SQRT1_2, g1 * M_SQRT1_2);
    }

    // Unit-modulus random phase exp(i*theta), theta ~ U[0, 2*pi).
    cplx phase(std::uint64_t index) const {
        const double t = 2.0 * M_PI * uniform(index);
        return cplx(std::cos(t), std::sin(t));
    }

private:
    std::uint64_t key_;
    std::uint64_t hi_;
};

// Deterministic seed derivation for sub-components (mask seed from master
// seed, per-trial noise seeds, ...).  Documented scheme: one Philox block
// keyed by the parent seed on the `derive` stream, indexed by (tag, index).
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint32_t tag,
                                 std::uint64_t index = 0) {
    auto b = philox::block(parent, philox::join(static_cast<std::uint32_t>(RngStream::derive), tag),
                           index);
    return philox::join(b[0], b[1]);
}

} // namespace varsketch
