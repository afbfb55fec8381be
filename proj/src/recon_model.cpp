#include "varsketch/recon_model.hpp"

#include <algorithm>

#include "varsketch/errors.hpp"

namespace varsketch {

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::identity: return "identity";
        case ModelKind::unrolled_dc: return "unrolled-dc";
        case ModelKind::single_pass_denoiser: return "single-pass-denoiser";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "identity") return ModelKind::identity;
    if (s == "unrolled-dc") return ModelKind::unrolled_dc;
    if (s == "single-pass-denoiser") return ModelKind::single_pass_denoiser;
    throw ConfigError("unknown model kind '" + s + "'");
}

ReconModel::ReconModel(ModelSpec spec, const ImagingOperator* op)
    : spec_(spec), op_(op) {
    if (spec_.kind == ModelKind::unrolled_dc) {
        if (!op_) throw ConfigError("unrolled-dc model requires an imaging operator");
        if (spec_.steps == 0) throw ConfigError("unrolled-dc model requires steps >= 1");
        if (spec_.dc_solver == DcSolver::cg && spec_.dc_lambda <= 0.0)
            throw ConfigError("cg data-consistency requires lambda > 0");
    }
    if (spec_.kind != ModelKind::identity)
        net_ = make_conv_net(spec_.net_layers, spec_.net_channels, spec_.net_kernel,
                             spec_.weights_seed, spec_.net_gain);
}

void ReconModel::check_shapes(const ComplexArray& x, const ComplexArray* y,
                              const char* what) const {
    x.require_rank(2, what);
    if (op_) {
        if (x.shape()[0] != op_->rows() || x.shape()[1] != op_->cols())
            throw ShapeMismatch(std::string(what) + ": image " +
                                detail::shape_string(x.shape()) + " vs operator grid " +
                                std::to_string(op_->rows()) + "x" + std::to_string(op_->cols()));
    }
    if (y && spec_.kind == ModelKind::unrolled_dc) {
        y->require_rank(3, what);
        if (y->shape()[0] != op_->n_coils() || y->shape()[1] != op_->rows() ||
            y->shape()[2] != op_->cols())
            throw ShapeMismatch(std::string(what) + ": k-space " +
                                detail::shape_string(y->shape()) + " does not match operator");
    }
}

std::size_t ReconModel::deriv_cg_iters() const {
    return std::max<std::size_t>(30, 3 * spec_.dc_cg_iters);
}

ComplexArray ReconModel::cg_solve(const ComplexArray& b, const ComplexArray& start,
                                  std::size_t iters) const {
    const double lambda = spec_.dc_lambda;
    ComplexArray x = start;
    ComplexArray ax = op_->adjoint(op_->forward(x));
    ComplexArray r = b;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= ax[i] + lambda * x[i];
    ComplexArray p = r;
    double rs = norm2sq(r);
    for (std::size_t it = 0; it < iters && rs > 0.0; ++it) {
        ComplexArray mp = op_->adjoint(op_->forward(p));
        for (std::size_t i = 0; i < mp.size(); ++i) mp[i] += lambda * p[i];
        const double denom = std::real(inner(p, mp));
        if (denom <= 0.0) break;
        const double alpha = rs / denom;
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * mp[i];
        }
        const double rs_new = norm2sq(r);
        const double beta = rs_new / rs;
        rs = rs_new;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
    }
    return x;
}

ComplexArray ReconModel::dc_step(const ComplexArray& x_hat, const ComplexArray& y) const {
    if (spec_.dc_solver == DcSolver::gradient) {
        ComplexArray res = op_->forward(x_hat);
        res -= y;
        ComplexArray corr = op_->adjoint(res);
        ComplexArray out = x_hat;
        out -= corr;
        return out;
    }
    ComplexArray b = op_->adjoint(y);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] += spec_.dc_lambda * x_hat[i];
    return cg_solve(b, x_hat, spec_.dc_cg_iters);
}

ComplexArray ReconModel::reconstruct(const ComplexArray& x0, const ComplexArray& y) const {
    check_shapes(x0, &y, "reconstruct");
    switch (spec_.kind) {
        case ModelKind::identity: return x0;
        case ModelKind::single_pass_denoiser: {
            ComplexArray out = net_.forward(x0);
            out += x0;
            return out;
        }
        case ModelKind::unrolled_dc: {
            ComplexArray x = x0;
            for (std::size_t k = 0; k < spec_.steps; ++k) {
                ComplexArray x_hat = net_.forward(x);
                x_hat += x;
                x = dc_step(x_hat, y);
            }
            return x;
        }
    }
    throw ConfigError("reconstruct: unhandled model kind");
}

Linearization ReconModel::linearize(const ComplexArray& x_lin, const ComplexArray& y) const {
    check_shapes(x_lin, &y, "linearize");
    Linearization lin;
    lin.model_ = this;
    switch (spec_.kind) {
        case ModelKind::identity: break;
        case ModelKind::single_pass_denoiser: {
            lin.tapes_.resize(1);
            net_.forward(x_lin, &lin.tapes_[0]);
            break;
        }
        case ModelKind::unrolled_dc: {
            lin.tapes_.resize(spec_.steps);
            ComplexArray x = x_lin;
            for (std::size_t k = 0; k < spec_.steps; ++k) {
                ComplexArray x_hat = net_.forward(x, &lin.tapes_[k]);
                x_hat += x;
                x = dc_step(x_hat, y);
            }
            break;
        }
    }
    return lin;
}

ComplexArray Linearization::apply_jvp(const ComplexArray& u) const {
    const ReconModel& m = *model_;
    m.check_shapes(u, nullptr, "apply_jvp");
    switch (m.spec_.kind) {
        case ModelKind::identity: return u;
        case ModelKind::single_pass_denoiser: {
            ComplexArray t = m.net_.jvp(tapes_[0], u);
            t += u;
            return t;
        }
        case ModelKind::unrolled_dc: {
            ComplexArray t = u;
            for (std::size_t k = 0; k < m.spec_.steps; ++k) {
                ComplexArray th = m.net_.jvp(tapes_[k], t);
                th += t;
                if (m.spec_.dc_solver == DcSolver::gradient) {
                    ComplexArray corr = m.op_->adjoint(m.op_->forward(th));
                    th -= corr;
                    t = std::move(th);
                } else {
                    th *= cplx(m.spec_.dc_lambda, 0.0);
                    t = m.cg_solve(th, ComplexArray::zeros(th.shape()), m.deriv_cg_iters());
                }
            }
            return t;
        }
    }
    throw ConfigError("apply_jvp: unhandled model kind");
}

ComplexArray Linearization::apply_vjp(const ComplexArray& w) const {
    const ReconModel& m = *model_;
    m.check_shapes(w, nullptr, "apply_vjp");
    switch (m.spec_.kind) {
        case ModelKind::identity: return w;
        case ModelKind::single_pass_denoiser: {
            ComplexArray s = m.net_.vjp(tapes_[0], w);
            s += w;
            return s;
        }
        case ModelKind::unrolled_dc: {
            ComplexArray s = w;
            for (std::size_t k = m.spec_.steps; k-- > 0;) {
                // DC derivative is Hermitian, so the adjoint sweep applies
                // the same operator as the forward sweep
                if (m.spec_.dc_solver == DcSolver::gradient) {
                    ComplexArray corr = m.op_->adjoint(m.op_->forward(s));
                    s -= corr;
                } else {
                    ComplexArray rhs = s;
                    rhs *= cplx(m.spec_.dc_lambda, 0.0);
                    s = m.cg_solve(rhs, ComplexArray::zeros(rhs.shape()), m.deriv_cg_iters());
                }
                ComplexArray sv = m.net_.vjp(tapes_[k], s);
                s += sv;
            }
            return s;
        }
    }
    throw ConfigError("apply_vjp: unhandled model kind");
}

ComplexArray ReconModel::jvp(const ComplexArray& x_lin, const ComplexArray& y,
                             const ComplexArray& u) const {
    return linearize(x_lin, y).apply_jvp(u);
}

ComplexArray ReconModel::vjp(const ComplexArray& x_lin, const ComplexArray& y,
                             const ComplexArray& w) const {
    return linearize(x_lin, y).apply_vjp(w);
}

} // namespace varsketch
