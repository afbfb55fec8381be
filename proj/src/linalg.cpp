#include "varsketch/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace varsketch {

HermitianMatrix HermitianMatrix::from_dense(const ComplexArray& m, double tol) {
    m.require_rank(2, "HermitianMatrix::from_dense");
    if (m.dim(0) != m.dim(1))
        throw ShapeMismatch("HermitianMatrix::from_dense: matrix is " +
                            std::to_string(m.dim(0)) + "x" + std::to_string(m.dim(1)));
    const std::size_t d = m.dim(0);
    double amax = 0.0;
    double dev = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            amax = std::max(amax, std::abs(m.at2(i, j)));
            dev = std::max(dev, std::abs(m.at2(i, j) - std::conj(m.at2(j, i))));
        }
    }
    if (dev > tol * std::max(amax, 1e-300))
        throw NotPSD("HermitianMatrix: input is not conjugate-symmetric (max deviation " +
                     std::to_string(dev) + ")");
    HermitianMatrix h(d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            h.at(i, j) = m.at2(i, j);
    h.symmetrize();
    return h;
}

void HermitianMatrix::symmetrize() {
    for (std::size_t i = 0; i < dim_; ++i) {
        at(i, i) = cplx(at(i, i).real(), 0.0);
        for (std::size_t j = i + 1; j < dim_; ++j) {
            const cplx v = 0.5 * (at(i, j) + std::conj(at(j, i)));
            at(i, j) = v;
            at(j, i) = std::conj(v);
        }
    }
}

double HermitianMatrix::trace_real() const {
    double t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += at(i, i).real();
    return t;
}

std::vector<cplx> HermitianMatrix::matvec(const std::vector<cplx>& v) const {
    if (v.size() != dim_)
        throw ShapeMismatch("HermitianMatrix::matvec: vector length " +
                            std::to_string(v.size()) + " vs dim " + std::to_string(dim_));
    std::vector<cplx> y(dim_, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < dim_; ++i) {
        cplx acc(0.0, 0.0);
        for (std::size_t j = 0; j < dim_; ++j) acc += at(i, j) * v[j];
        y[i] = acc;
    }
    return y;
}

ComplexArray HermitianMatrix::to_array() const {
    ComplexArray out({dim_, dim_});
    for (std::size_t i = 0; i < dim_ * dim_; ++i) out[i] = a_[i];
    return out;
}

std::vector<cplx> CholeskyFactor::apply(const std::vector<cplx>& v) const {
    if (v.size() != dim)
        throw ShapeMismatch("CholeskyFactor::apply: vector length mismatch");
    std::vector<cplx> y(dim, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < dim; ++i) {
        cplx acc(0.0, 0.0);
        for (std::size_t j = 0; j <= i; ++j) acc += at(i, j) * v[j];
        y[i] = acc;
    }
    return y;
}

std::vector<cplx> CholeskyFactor::apply_adjoint(const std::vector<cplx>& v) const {
    if (v.size() != dim)
        throw ShapeMismatch("CholeskyFactor::apply_adjoint: vector length mismatch");
    std::vector<cplx> y(dim, cplx(0.0, 0.0));
    for (std::size_t j = 0; j < dim; ++j) {
        cplx acc(0.0, 0.0);
        for (std::size_t i = j; i < dim; ++i) acc += std::conj(at(i, j)) * v[i];
        y[j] = acc;
    }
    return y;
}

HermitianMatrix CholeskyFactor::reconstruct() const {
    HermitianMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            cplx acc(0.0, 0.0);
            for (std::size_t k = 0; k <= j; ++k) acc += at(i, k) * std::conj(at(j, k));
            m.at(i, j) = acc;
            m.at(j, i) = std::conj(acc);
        }
    }
    return m;
}

CholeskyFactor cholesky(const HermitianMatrix& m, double jitter) {
    const std::size_t d = m.dim();
    CholeskyFactor f;
    f.dim = d;
    f.lower.assign(d * d, cplx(0.0, 0.0));
    for (std::size_t j = 0; j < d; ++j) {
        double piv = m.at(j, j).real();
        for (std::size_t k = 0; k < j; ++k) piv -= std::norm(f.at(j, k));
        if (piv < -jitter)
            throw NotPSD("cholesky: pivot " + std::to_string(piv) + " at column " +
                         std::to_string(j) + " below -jitter (" + std::to_string(-jitter) + ")");
        const double ljj = piv > 0.0 ? std::sqrt(piv) : 0.0;
        f.at(j, j) = cplx(ljj, 0.0);
        for (std::size_t i = j + 1; i < d; ++i) {
            cplx s = m.at(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= f.at(i, k) * std::conj(f.at(j, k));
            f.at(i, j) = ljj > 0.0 ? s / ljj : cplx(0.0, 0.0);
        }
    }
    return f;
}

} // namespace varsketch
