#pragma once

// Differentiable reconstruction functions f(x0, y) with exact Jacobian
// products.
//
// Kinds:
//   identity              f = x0
//   single-pass-denoiser  f = x0 + net(x0)
//   unrolled-dc           K alternations of regularizer then data
//                         consistency, x^(k) = DC(x^(k-1) + net(x^(k-1)))
//
// The DC step defaults to the gradient form x_hat - A^H(A x_hat - y).
// The optional CG solver variant instead returns the solution of
// (A^H A + lambda I) x = A^H y + lambda x_hat by a fixed number of CG
// iterations; its derivative uses the implicit form
// dx/dx_hat = lambda (A^H A + lambda I)^{-1}, evaluated by a deeper fixed
// CG run so jvp and vjp stay adjoint-consistent to rounding error.
//
// Measured data y is held fixed throughout differentiation: jvp and vjp
// are products with the Jacobian of x0 -> f(x0, y) only.
//
// linearize() runs one taped forward pass; the resulting Linearization
// applies jvp/vjp at the cost of a single linearized sweep each, which is
// what makes many-probe sketching cheap.

#include <cstdint>
#include <string>
#include <vector>

#include "varsketch/array.hpp"
#include "varsketch/conv_net.hpp"
#include "varsketch/imaging_operator.hpp"

namespace varsketch {

enum class ModelKind { identity, unrolled_dc, single_pass_denoiser };
enum class DcSolver { gradient, cg };

std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);

struct ModelSpec {
    ModelKind kind = ModelKind::unrolled_dc;
    std::size_t steps = 4; // K, unrolled only
    DcSolver dc_solver = DcSolver::gradient;
    double dc_lambda = 1.0;        // cg solver only
    std::size_t dc_cg_iters = 10;  // cg solver only, forward pass
    std::size_t net_layers = 3;
    std::size_t net_channels = 4;
    std::size_t net_kernel = 3;
    double net_gain = 0.5;
    std::uint64_t weights_seed = 1;
};

class ReconModel;

class Linearization {
public:
    ComplexArray apply_jvp(const ComplexArray& u) const;
    ComplexArray apply_vjp(const ComplexArray& w) const;

private:
    friend class ReconModel;
    const ReconModel* model_ = nullptr;
    std::vector<NetTape> tapes_; // one per unrolled step (or the single pass)
};

class ReconModel {
public:
    // op may be null for kinds that never touch the imaging operator
    // (identity, single-pass-denoiser); unrolled-dc requires it.  The
    // operator must outlive the model.
    ReconModel(ModelSpec spec, const ImagingOperator* op);

    const ModelSpec& spec() const { return spec_; }
    const SmoothConvNet& net() const { return net_; }
    const ImagingOperator* op() const { return op_; }

    ComplexArray reconstruct(const ComplexArray& x0, const ComplexArray& y) const;

    // Taped forward pass at x_lin; must outlive neither model nor operator.
    Linearization linearize(const ComplexArray& x_lin, const ComplexArray& y) const;

    // One-shot products J_f(x_lin) u and J_f(x_lin)^H w.
    ComplexArray jvp(const ComplexArray& x_lin, const ComplexArray& y,
                     const ComplexArray& u) const;
    ComplexArray vjp(const ComplexArray& x_lin, const ComplexArray& y,
                     const ComplexArray& w) const;

private:
    friend class Linearization;

    ComplexArray dc_step(const ComplexArray& x_hat, const ComplexArray& y) const;
    // Fixed-iteration CG on (A^H A + lambda I) x = b.
    ComplexArray cg_solve(const ComplexArray& b, const ComplexArray& start,
                          std::size_t iters) const;
    std::size_t deriv_cg_iters() const;
    void check_shapes(const ComplexArray& x, const ComplexArray* y, const char* what) const;

    ModelSpec spec_;
    const ImagingOperator* op_;
    SmoothConvNet net_;
};

} // namespace varsketch
