#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "varsketch/errors.hpp"

namespace varsketch {

using cplx = std::complex<double>;

namespace detail {

inline std::size_t shape_product(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

inline std::string shape_string(const std::vector<std::size_t>& shape) {
    std::string s = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(shape[i]);
    }
    s += ")";
    return s;
}

} // namespace detail

// Dense row-major complex array of arbitrary rank.  This is the carrier
// type for images, k-space stacks and probe columns; all layouts in the
// library flatten in row-major (last index fastest) order.
class ComplexArray {
public:
    ComplexArray() = default;

    explicit ComplexArray(std::vector<std::size_t> shape)
        : shape_(std::move(shape)), data_(detail::shape_product(shape_)) {}

    ComplexArray(std::vector<std::size_t> shape, std::vector<cplx> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (data_.size() != detail::shape_product(shape_))
            throw ShapeMismatch("ComplexArray: data size " + std::to_string(data_.size()) +
                                " does not match shape " + detail::shape_string(shape_));
    }

    static ComplexArray zeros(std::initializer_list<std::size_t> dims) {
        return ComplexArray(std::vector<std::size_t>(dims));
    }
    static ComplexArray zeros(std::vector<std::size_t> dims) {
        return ComplexArray(std::move(dims));
    }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t dim(std::size_t i) const { return shape_.at(i); }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    cplx* data() { return data_.data(); }
    const cplx* data() const { return data_.data(); }

    cplx& operator[](std::size_t i) { return data_[i]; }
    const cplx& operator[](std::size_t i) const { return data_[i]; }

    // Rank-specific accessors; row-major.
    cplx& at2(std::size_t r, std::size_t c) { return data_[r * shape_[1] + c]; }
    const cplx& at2(std::size_t r, std::size_t c) const { return data_[r * shape_[1] + c]; }

    cplx& at3(std::size_t s, std::size_t r, std::size_t c) {
        return data_[(s * shape_[1] + r) * shape_[2] + c];
    }
    const cplx& at3(std::size_t s, std::size_t r, std::size_t c) const {
        return data_[(s * shape_[1] + r) * shape_[2] + c];
    }

    cplx& at4(std::size_t t, std::size_t s, std::size_t r, std::size_t c) {
        return data_[((t * shape_[1] + s) * shape_[2] + r) * shape_[3] + c];
    }
    const cplx& at4(std::size_t t, std::size_t s, std::size_t r, std::size_t c) const {
        return data_[((t * shape_[1] + s) * shape_[2] + r) * shape_[3] + c];
    }

    bool same_shape(const ComplexArray& o) const { return shape_ == o.shape_; }

    void require_same_shape(const ComplexArray& o, const char* what) const {
        if (!same_shape(o))
            throw ShapeMismatch(std::string(what) + ": shape " + detail::shape_string(shape_) +
                                " vs " + detail::shape_string(o.shape_));
    }

    void require_rank(std::size_t r, const char* what) const {
        if (rank() != r)
            throw ShapeMismatch(std::string(what) + ": expected rank " + std::to_string(r) +
                                " array, got shape " + detail::shape_string(shape_));
    }

    ComplexArray reshaped(std::vector<std::size_t> new_shape) const {
        if (detail::shape_product(new_shape) != size())
            throw ShapeMismatch("reshape: element count mismatch " + detail::shape_string(shape_) +
                                " -> " + detail::shape_string(new_shape));
        ComplexArray out;
        out.shape_ = std::move(new_shape);
        out.data_ = data_;
        return out;
    }

    ComplexArray& operator+=(const ComplexArray& o) {
        require_same_shape(o, "operator+=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }

    ComplexArray& operator-=(const ComplexArray& o) {
        require_same_shape(o, "operator-=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }

    ComplexArray& operator*=(cplx a) {
        for (auto& v : data_) v *= a;
        return *this;
    }

private:
    std::vector<std::size_t> shape_;
    std::vector<cplx> data_;
};

inline ComplexArray operator+(ComplexArray a, const ComplexArray& b) { a += b; return a; }
inline ComplexArray operator-(ComplexArray a, const ComplexArray& b) { a -= b; return a; }
inline ComplexArray operator*(cplx s, ComplexArray a) { a *= s; return a; }

// Dense row-major real array; used for variance maps, masks on disk and
// difference maps.
class RealArray {
public:
    RealArray() = default;

    explicit RealArray(std::vector<std::size_t> shape)
        : shape_(std::move(shape)), data_(detail::shape_product(shape_)) {}

    RealArray(std::vector<std::size_t> shape, std::vector<double> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (data_.size() != detail::shape_product(shape_))
            throw ShapeMismatch("RealArray: data size does not match shape " +
                                detail::shape_string(shape_));
    }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t dim(std::size_t i) const { return shape_.at(i); }
    std::size_t size() const { return data_.size(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    double& operator[](std::size_t i) { return data_[i]; }
    const double& operator[](std::size_t i) const { return data_[i]; }

    double& at2(std::size_t r, std::size_t c) { return data_[r * shape_[1] + c]; }
    const double& at2(std::size_t r, std::size_t c) const { return data_[r * shape_[1] + c]; }

    bool same_shape(const RealArray& o) const { return shape_ == o.shape_; }

    void require_same_shape(const RealArray& o, const char* what) const {
        if (!same_shape(o))
            throw ShapeMismatch(std::string(what) + ": shape " + detail::shape_string(shape_) +
                                " vs " + detail::shape_string(o.shape_));
    }

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

// Complex inner product <a,b> = sum_i conj(a_i) * b_i, sequential
// left-to-right accumulation.
inline cplx inner(const ComplexArray& a, const ComplexArray& b) {
    a.require_same_shape(b, "inner");
    cplx acc(0.0, 0.0);
    const cplx* pa = a.data();
    const cplx* pb = b.data();
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(pa[i]) * pb[i];
    return acc;
}

inline double norm2sq(const ComplexArray& a) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::norm(a[i]);
    return acc;
}

inline double norm2(const ComplexArray& a) { return std::sqrt(norm2sq(a)); }

inline double norm2(const RealArray& a) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * a[i];
    return acc > 0.0 ? std::sqrt(acc) : 0.0;
}

} // namespace varsketch
