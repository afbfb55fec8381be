#include "doctest.h"

#include <cmath>
#include <vector>

#include "varsketch/probes.hpp"

#include "test_support.hpp"

using namespace varsketch;

TEST_CASE("random-phase probe entries have unit modulus") {
    const ComplexArray col = probe_column(4096, ProbeDistribution::random_phase, 11, 0);
    for (std::size_t i = 0; i < col.size(); ++i)
        CHECK(std::abs(std::abs(col[i]) - 1.0) < 1e-15);
}

TEST_CASE("probe second and fourth moments match the advertised values") {
    const std::size_t n = 1u << 20;
    for (ProbeDistribution d :
         {ProbeDistribution::complex_gaussian, ProbeDistribution::random_phase}) {
        double m2 = 0.0, m4 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double a2 = std::norm(probe_entry(d, 13, 0, i));
            m2 += a2;
            m4 += a2 * a2;
        }
        m2 /= double(n);
        m4 /= double(n);
        CHECK(m2 == doctest::Approx(1.0).epsilon(0.005));
        if (d == ProbeDistribution::complex_gaussian)
            CHECK(m4 == doctest::Approx(2.0).epsilon(0.01));
        else
            CHECK(std::abs(m4 - 1.0) < 1e-12);
    }
}

TEST_CASE("the empirical probe covariance converges to the identity") {
    const std::size_t m = 4, S = 100000;
    for (ProbeDistribution d :
         {ProbeDistribution::complex_gaussian, ProbeDistribution::random_phase}) {
        const ProbeMatrix probes = gen_probes(m, S, d, 17);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                cplx acc(0.0, 0.0);
                for (std::size_t s = 0; s < S; ++s)
                    acc += probes.data.at2(i, s) * std::conj(probes.data.at2(j, s));
                acc /= double(S);
                const double want = i == j ? 1.0 : 0.0;
                CHECK(std::abs(acc - want) < 0.02);
            }
    }
}

TEST_CASE("entry, column and matrix access agree and order never matters") {
    const std::size_t m = 33, S = 7;
    for (ProbeDistribution d :
         {ProbeDistribution::complex_gaussian, ProbeDistribution::random_phase}) {
        const ProbeMatrix probes = gen_probes(m, S, d, 19);
        CHECK(probes.m == m);
        CHECK(probes.S == S);
        CHECK(probes.data.shape() == std::vector<std::size_t>{m, S});
        // regenerate columns last-to-first
        for (std::size_t s = S; s-- > 0;) {
            const ComplexArray col = probe_column(m, d, 19, s);
            for (std::size_t i = 0; i < m; ++i) {
                CHECK(col[i] == probes.data.at2(i, s));
                CHECK(probe_entry(d, 19, s, i) == col[i]);
            }
        }
        // distinct seeds and columns decorrelate
        CHECK(probe_entry(d, 19, 0, 0) != probe_entry(d, 20, 0, 0));
        CHECK(probe_entry(d, 19, 0, 0) != probe_entry(d, 19, 1, 0));
    }
}

TEST_CASE("closed-form single-probe variance for the identity matrix") {
    HermitianMatrix eye(5);
    for (std::size_t i = 0; i < 5; ++i) eye.at(i, i) = 1.0;
    const std::vector<double> vg =
        estimator_variance_closed_form(eye, ProbeDistribution::complex_gaussian);
    const std::vector<double> vp =
        estimator_variance_closed_form(eye, ProbeDistribution::random_phase);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(vg[i] == doctest::Approx(1.0));
        CHECK(vp[i] == doctest::Approx(0.0));
    }
}

namespace {

// Empirical per-index variance of the diagonal estimate
// d_i = conj(v_i) (Sigma v)_i over many single probes.
std::vector<double> empirical_variance(const HermitianMatrix& sigma, ProbeDistribution d,
                                       std::uint64_t seed, std::size_t trials) {
    const std::size_t n = sigma.dim();
    std::vector<double> m2(n, 0.0);
    for (std::size_t s = 0; s < trials; ++s) {
        const ComplexArray col = probe_column(n, d, seed, s);
        std::vector<cplx> v(col.data(), col.data() + n);
        const std::vector<cplx> sv = sigma.matvec(v);
        for (std::size_t i = 0; i < n; ++i) {
            // the estimate is complex; its variance is E|est - Sigma_ii|^2
            const cplx delta = std::conj(v[i]) * sv[i] - sigma.at(i, i);
            m2[i] += std::norm(delta);
        }
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = m2[i] / double(trials);
    return out;
}

} // namespace

TEST_CASE("closed-form variance matches a direct monte-carlo estimate") {
    const HermitianMatrix sigma = testsupport::random_hpsd(6, 31, 0.1);
    const std::size_t trials = 400000;
    for (ProbeDistribution d :
         {ProbeDistribution::complex_gaussian, ProbeDistribution::random_phase}) {
        const std::vector<double> want = estimator_variance_closed_form(sigma, d);
        const std::vector<double> got = empirical_variance(sigma, d, 37, trials);
        for (std::size_t i = 0; i < sigma.dim(); ++i)
            CHECK(got[i] == doctest::Approx(want[i]).epsilon(0.03));
    }
}

TEST_CASE("random-phase probes are never noisier than gaussian ones") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const HermitianMatrix sigma = testsupport::random_hpsd(8, 100 + seed, 0.01);
        const std::vector<double> vg =
            estimator_variance_closed_form(sigma, ProbeDistribution::complex_gaussian);
        const std::vector<double> vp =
            estimator_variance_closed_form(sigma, ProbeDistribution::random_phase);
        for (std::size_t i = 0; i < sigma.dim(); ++i) {
            CHECK(vp[i] <= vg[i] + 1e-12);
            if (std::abs(sigma.at(i, i)) > 1e-12) CHECK(vp[i] < vg[i]);
        }
    }
}

TEST_CASE("probe distribution names round trip") {
    for (ProbeDistribution d :
         {ProbeDistribution::complex_gaussian, ProbeDistribution::random_phase})
        CHECK(probe_distribution_from_string(to_string(d)) == d);
    CHECK_THROWS_AS(probe_distribution_from_string("rademacher"), ConfigError);
}
