#include "varsketch/conv_net.hpp"

#include <cmath>

#include "varsketch/errors.hpp"
#include "varsketch/io.hpp"
#include "varsketch/rng.hpp"

namespace varsketch {

namespace {

// Circular 2-d convolution.  adjoint=false:
//   out(o,r,c) = bias_o + sum_{i,a,b} W(o,i,a,b) in(i, r+a-h, c+b-h)
// adjoint=true applies the conjugate transpose map (channel roles swap,
// offsets negate, kernel conjugates, no bias).
ComplexArray conv_apply(const ConvLayer& layer, const ComplexArray& in, bool adjoint,
                        bool with_bias) {
    const std::size_t out_ch = layer.weights.shape()[0];
    const std::size_t in_ch = layer.weights.shape()[1];
    const std::size_t k = layer.weights.shape()[2];
    const std::ptrdiff_t h = static_cast<std::ptrdiff_t>(k / 2);
    const std::size_t rows = in.shape()[1];
    const std::size_t cols = in.shape()[2];
    const std::size_t src_ch = adjoint ? out_ch : in_ch;
    const std::size_t dst_ch = adjoint ? in_ch : out_ch;
    if (in.shape()[0] != src_ch)
        throw ShapeMismatch("conv_apply: input has " + std::to_string(in.shape()[0]) +
                            " channels, layer expects " + std::to_string(src_ch));

    ComplexArray out({dst_ch, rows, cols});
    for (std::size_t d = 0; d < dst_ch; ++d) {
        const cplx b = (!adjoint && with_bias) ? layer.bias[d] : cplx(0.0, 0.0);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) out.at3(d, r, c) = b;
    }
    for (std::size_t o = 0; o < out_ch; ++o) {
        for (std::size_t i = 0; i < in_ch; ++i) {
            for (std::size_t a = 0; a < k; ++a) {
                for (std::size_t bb = 0; bb < k; ++bb) {
                    const cplx w = adjoint
                                       ? std::conj(layer.weights.at4(o, i, a, bb))
                                       : layer.weights.at4(o, i, a, bb);
                    const std::ptrdiff_t da = static_cast<std::ptrdiff_t>(a) - h;
                    const std::ptrdiff_t db = static_cast<std::ptrdiff_t>(bb) - h;
                    // forward reads from (r+da, c+db); adjoint scatters the
                    // same geometry backwards, i.e. reads from (r-da, c-db)
                    const std::ptrdiff_t sr = adjoint ? -da : da;
                    const std::ptrdiff_t sc = adjoint ? -db : db;
                    const std::size_t src = adjoint ? o : i;
                    const std::size_t dst = adjoint ? i : o;
                    for (std::size_t r = 0; r < rows; ++r) {
                        const std::size_t rr = static_cast<std::size_t>(
                            (static_cast<std::ptrdiff_t>(r + rows) + sr) %
                            static_cast<std::ptrdiff_t>(rows));
                        for (std::size_t c = 0; c < cols; ++c) {
                            const std::size_t cc = static_cast<std::size_t>(
                                (static_cast<std::ptrdiff_t>(c + cols) + sc) %
                                static_cast<std::ptrdiff_t>(cols));
                            out.at3(dst, r, c) += w * in.at3(src, rr, cc);
                        }
                    }
                }
            }
        }
    }
    return out;
}

ComplexArray as_stack(const ComplexArray& img) {
    ComplexArray s({1, img.shape()[0], img.shape()[1]});
    for (std::size_t i = 0; i < img.size(); ++i) s[i] = img[i];
    return s;
}

ComplexArray as_image(const ComplexArray& stack) {
    ComplexArray img({stack.shape()[1], stack.shape()[2]});
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = stack[i];
    return img;
}

} // namespace

SmoothConvNet::SmoothConvNet(std::vector<ConvLayer> layers) : layers_(std::move(layers)) {
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& w = layers_[l].weights;
        w.require_rank(4, "SmoothConvNet layer weights");
        if (w.shape()[2] != w.shape()[3] || w.shape()[2] % 2 == 0)
            throw ShapeMismatch("SmoothConvNet: kernels must be square with odd size");
        if (layers_[l].bias.size() != w.shape()[0])
            throw ShapeMismatch("SmoothConvNet: bias length must equal output channels");
        if (l > 0 && w.shape()[1] != layers_[l - 1].weights.shape()[0])
            throw ShapeMismatch("SmoothConvNet: channel chain broken at layer " +
                                std::to_string(l));
    }
    if (!layers_.empty()) {
        if (layers_.front().weights.shape()[1] != 1 || layers_.back().weights.shape()[0] != 1)
            throw ShapeMismatch("SmoothConvNet: network must map 1 complex channel to 1");
        kernel_size_ = layers_.front().weights.shape()[2];
    }
}

ComplexArray SmoothConvNet::forward(const ComplexArray& x, NetTape* tape) const {
    x.require_rank(2, "SmoothConvNet::forward");
    if (tape) {
        tape->act_deriv.clear();
        tape->act_deriv.reserve(layers_.empty() ? 0 : layers_.size() - 1);
    }
    if (layers_.empty()) return ComplexArray::zeros(x.shape());

    ComplexArray h = as_stack(x);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        h = conv_apply(layers_[l], h, /*adjoint=*/false, /*with_bias=*/true);
        if (l + 1 < layers_.size()) {
            ComplexArray der(h.shape());
            for (std::size_t i = 0; i < h.size(); ++i) {
                der[i] = std::cos(h[i]);
                h[i] = std::sin(h[i]);
            }
            if (tape) tape->act_deriv.push_back(std::move(der));
        }
    }
    return as_image(h);
}

ComplexArray SmoothConvNet::jvp(const NetTape& tape, const ComplexArray& u) const {
    u.require_rank(2, "SmoothConvNet::jvp");
    if (layers_.empty()) return ComplexArray::zeros(u.shape());
    if (tape.act_deriv.size() != layers_.size() - 1)
        throw ShapeMismatch("SmoothConvNet::jvp: tape does not match this network");

    ComplexArray t = as_stack(u);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        t = conv_apply(layers_[l], t, /*adjoint=*/false, /*with_bias=*/false);
        if (l + 1 < layers_.size()) {
            const ComplexArray& der = tape.act_deriv[l];
            for (std::size_t i = 0; i < t.size(); ++i) t[i] *= der[i];
        }
    }
    return as_image(t);
}

ComplexArray SmoothConvNet::vjp(const NetTape& tape, const ComplexArray& w) const {
    w.require_rank(2, "SmoothConvNet::vjp");
    if (layers_.empty()) return ComplexArray::zeros(w.shape());
    if (tape.act_deriv.size() != layers_.size() - 1)
        throw ShapeMismatch("SmoothConvNet::vjp: tape does not match this network");

    ComplexArray s = as_stack(w);
    for (std::size_t l = layers_.size(); l-- > 0;) {
        if (l + 1 < layers_.size()) {
            const ComplexArray& der = tape.act_deriv[l];
            for (std::size_t i = 0; i < s.size(); ++i) s[i] *= std::conj(der[i]);
        }
        s = conv_apply(layers_[l], s, /*adjoint=*/true, /*with_bias=*/false);
    }
    return as_image(s);
}

SmoothConvNet make_conv_net(std::size_t n_layers, std::size_t hidden_channels,
                            std::size_t kernel_size, std::uint64_t weights_seed, double gain) {
    if (n_layers < 1) throw ConfigError("make_conv_net: need at least one layer");
    if (kernel_size % 2 == 0 || kernel_size == 0)
        throw ConfigError("make_conv_net: kernel size must be odd");
    if (n_layers > 1 && hidden_channels == 0)
        throw ConfigError("make_conv_net: hidden channel count must be positive");

    std::vector<ConvLayer> layers;
    layers.reserve(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        const std::size_t in_ch = (l == 0) ? 1 : hidden_channels;
        const std::size_t out_ch = (l + 1 == n_layers) ? 1 : hidden_channels;
        ConvLayer layer;
        layer.weights = ComplexArray({out_ch, in_ch, kernel_size, kernel_size});
        layer.bias = ComplexArray::zeros({out_ch});
        const double scale =
            gain / std::sqrt(static_cast<double>(in_ch * kernel_size * kernel_size));
        CounterRng rng(weights_seed, RngStream::weights, l);
        for (std::size_t i = 0; i < layer.weights.size(); ++i)
            layer.weights[i] = scale * rng.cgauss(i);
        // hidden biases move the activations off the odd-symmetric origin of
        // sin, where the network would behave almost linearly; they scale
        // with gain so a zero-gain network stays identically zero
        if (l + 1 < n_layers)
            for (std::size_t i = 0; i < layer.bias.size(); ++i)
                layer.bias[i] = 3.0 * gain * rng.cgauss(layer.weights.size() + i);
        layers.push_back(std::move(layer));
    }
    return SmoothConvNet(std::move(layers));
}

void write_conv_net(const std::filesystem::path& base, const SmoothConvNet& net,
                    std::uint64_t weights_seed) {
    KvPairs manifest;
    manifest.emplace_back("n_layers", std::to_string(net.n_layers()));
    manifest.emplace_back("activation", "sin");
    manifest.emplace_back("weights_seed", std::to_string(weights_seed));
    for (std::size_t l = 0; l < net.n_layers(); ++l) {
        const auto& w = net.layers()[l].weights;
        manifest.emplace_back("layer" + std::to_string(l),
                              detail::shape_string(w.shape()));
        std::filesystem::path wp = base;
        wp += ".layer" + std::to_string(l) + ".w";
        std::filesystem::path bp = base;
        bp += ".layer" + std::to_string(l) + ".b";
        write_array(wp, w);
        write_array(bp, net.layers()[l].bias);
    }
    std::filesystem::path mp = base;
    mp += ".manifest";
    write_kv(mp, manifest);
}

SmoothConvNet read_conv_net(const std::filesystem::path& base) {
    std::filesystem::path mp = base;
    mp += ".manifest";
    std::size_t n_layers = 0;
    for (const auto& [key, value] : read_kv(mp))
        if (key == "n_layers") n_layers = std::stoull(value);
    if (n_layers == 0) throw IoError("read_conv_net: manifest lacks a layer count: " + mp.string());
    std::vector<ConvLayer> layers;
    layers.reserve(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        std::filesystem::path wp = base;
        wp += ".layer" + std::to_string(l) + ".w";
        std::filesystem::path bp = base;
        bp += ".layer" + std::to_string(l) + ".b";
        layers.push_back({read_complex_array(wp), read_complex_array(bp)});
    }
    return SmoothConvNet(std::move(layers));
}

} // namespace varsketch
