#include "varsketch/probes.hpp"

#include "varsketch/errors.hpp"
#include "varsketch/rng.hpp"

namespace varsketch {

std::string to_string(ProbeDistribution d) {
    return d == ProbeDistribution::complex_gaussian ? "complex-gaussian" : "random-phase";
}

ProbeDistribution probe_distribution_from_string(const std::string& s) {
    if (s == "complex-gaussian") return ProbeDistribution::complex_gaussian;
    if (s == "random-phase") return ProbeDistribution::random_phase;
    throw ConfigError("unknown probe distribution '" + s + "'");
}

cplx probe_entry(ProbeDistribution d, std::uint64_t seed, std::size_t s, std::size_t i) {
    CounterRng rng(seed, RngStream::probe, s);
    return d == ProbeDistribution::complex_gaussian ? rng.cgauss(i) : rng.phase(i);
}

ComplexArray probe_column(std::size_t m, ProbeDistribution d, std::uint64_t seed, std::size_t s) {
    ComplexArray v({m});
    CounterRng rng(seed, RngStream::probe, s);
    if (d == ProbeDistribution::complex_gaussian) {
        for (std::size_t i = 0; i < m; ++i) v[i] = rng.cgauss(i);
    } else {
        for (std::size_t i = 0; i < m; ++i) v[i] = rng.phase(i);
    }
    return v;
}

ProbeMatrix gen_probes(std::size_t m, std::size_t S, ProbeDistribution d, std::uint64_t seed) {
    if (m == 0 || S == 0) throw ShapeMismatch("gen_probes: m and S must be >= 1");
    ProbeMatrix pm;
    pm.m = m;
    pm.S = S;
    pm.distribution = d;
    pm.rng_seed = seed;
    pm.data = ComplexArray({m, S});
    for (std::size_t s = 0; s < S; ++s) {
        ComplexArray col = probe_column(m, d, seed, s);
        for (std::size_t i = 0; i < m; ++i) pm.data.at2(i, s) = col[i];
    }
    return pm;
}

std::vector<double> estimator_variance_closed_form(const HermitianMatrix& sigma,
                                                   ProbeDistribution d) {
    const std::size_t n = sigma.dim();
    std::vector<double> var(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += std::norm(sigma.at(i, j));
        if (d == ProbeDistribution::random_phase) row -= std::norm(sigma.at(i, i));
        var[i] = row;
    }
    return var;
}

} // namespace varsketch
