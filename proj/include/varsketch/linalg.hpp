#pragma once

#include <vector>

#include "varsketch/array.hpp"

namespace varsketch {

// Dense Hermitian matrix.  Mutating accessors do not re-validate; callers
// that assemble entries by hand should finish with symmetrize().
class HermitianMatrix {
public:
    HermitianMatrix() = default;
    explicit HermitianMatrix(std::size_t dim) : dim_(dim), a_(dim * dim) {}

    // Validates conjugate symmetry: max |A_ij - conj(A_ji)| must not
    // exceed tol * max|A_ij|.
    static HermitianMatrix from_dense(const ComplexArray& m, double tol = 1e-10);

    std::size_t dim() const { return dim_; }

    cplx& at(std::size_t i, std::size_t j) { return a_[i * dim_ + j]; }
    const cplx& at(std::size_t i, std::size_t j) const { return a_[i * dim_ + j]; }

    const std::vector<cplx>& raw() const { return a_; }

    // Replace A by (A + A^H)/2 and force real diagonal.
    void symmetrize();

    double trace_real() const;

    std::vector<cplx> matvec(const std::vector<cplx>& v) const;

    ComplexArray to_array() const;

private:
    std::size_t dim_ = 0;
    std::vector<cplx> a_;
};

// Lower-triangular Cholesky factor L with L * L^H equal to the factored
// matrix (plus at most the jitter used to produce it).
struct CholeskyFactor {
    std::size_t dim = 0;
    std::vector<cplx> lower; // row-major, strictly upper part kept at zero

    cplx& at(std::size_t i, std::size_t j) { return lower[i * dim + j]; }
    const cplx& at(std::size_t i, std::size_t j) const { return lower[i * dim + j]; }

    // y = L v
    std::vector<cplx> apply(const std::vector<cplx>& v) const;
    // y = L^H v
    std::vector<cplx> apply_adjoint(const std::vector<cplx>& v) const;

    HermitianMatrix reconstruct() const;
};

// Complex Cholesky factorization of a Hermitian PSD matrix.  Pivots in
// [-jitter, 0] are clamped to zero (rank-deficient PSD up to rounding);
// a pivot below -jitter throws NotPSD.
CholeskyFactor cholesky(const HermitianMatrix& m, double jitter = 0.0);

} // namespace varsketch
