#pragma once

// Random probe vectors for diagonal sketching.
//
// Two distributions, both zero-mean with unit covariance:
//   complex-gaussian   re, im ~ N(0, 1/2), so E|v|^2 = 1, E|v|^4 = 2
//   random-phase       v = e^{i theta}, theta ~ U[0, 2pi), |v| = 1, E|v|^4 = 1
//
// The smaller fourth moment makes random-phase probes strictly less noisy
// per probe whenever the sketched matrix has a nonzero diagonal, which is
// why they are the default everywhere.
//
// Entries are addressed as (seed, column, row) through the counter RNG, so
// any column can be regenerated in isolation and generation order never
// matters.

#include <cstdint>
#include <string>
#include <vector>

#include "varsketch/array.hpp"
#include "varsketch/linalg.hpp"

namespace varsketch {

enum class ProbeDistribution { complex_gaussian, random_phase };

std::string to_string(ProbeDistribution d);
ProbeDistribution probe_distribution_from_string(const std::string& s);

struct ProbeMatrix {
    std::size_t m = 0;
    std::size_t S = 0;
    ProbeDistribution distribution = ProbeDistribution::random_phase;
    std::uint64_t rng_seed = 0;
    ComplexArray data; // (m, S), column s = probe s
};

// Single entry (row i of probe column s).
cplx probe_entry(ProbeDistribution d, std::uint64_t seed, std::size_t s, std::size_t i);

// One probe column of length m, for streaming consumers.
ComplexArray probe_column(std::size_t m, ProbeDistribution d, std::uint64_t seed, std::size_t s);

ProbeMatrix gen_probes(std::size_t m, std::size_t S, ProbeDistribution d, std::uint64_t seed);

// Per-index variance of the single-probe diagonal estimate of a Hermitian
// matrix: gaussian probes give sum_j |S_ij|^2, random-phase probes give
// sum_{j != i} |S_ij|^2.
std::vector<double> estimator_variance_closed_form(const HermitianMatrix& sigma,
                                                   ProbeDistribution d);

} // namespace varsketch
