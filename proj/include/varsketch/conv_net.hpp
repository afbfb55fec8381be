#pragma once

// Small complex convolutional network used as the learned regularizer
// inside reconstruction models.
//
// Each layer is a circular (wrap-around) 2-d convolution with complex
// kernels and biases; hidden layers apply an elementwise sin activation.
// A complex channel carries the stacked re/im pair of a field, so the
// input and output are one complex image each.
//
// sin is entire with derivative cos, so every layer map is differentiable
// and, because no conjugation appears anywhere, the network Jacobian is
// complex-linear.  That makes the VJP the true complex adjoint of the JVP
// rather than only a real-linear transpose, which the estimator contracts
// rely on.
//
// Weights are never trained here: they are seeded variance-scaled draws
// (gain / sqrt(fan_in)) or loaded from disk.  Hidden biases are seeded
// gain-scaled draws that keep the activations away from the origin, where
// sin is nearly linear; a zero-gain network is identically zero.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "varsketch/array.hpp"

namespace varsketch {

struct ConvLayer {
    ComplexArray weights; // (out_ch, in_ch, k, k)
    ComplexArray bias;    // (out_ch)
};

// Activation tape captured by a forward pass: cos of every hidden
// pre-activation, one (channels, rows, cols) stack per hidden layer.
// With the tape in hand, jvp and vjp cost one linearized pass each and
// never re-evaluate the network.
struct NetTape {
    std::vector<ComplexArray> act_deriv;
};

class SmoothConvNet {
public:
    SmoothConvNet() = default;
    explicit SmoothConvNet(std::vector<ConvLayer> layers);

    std::size_t n_layers() const { return layers_.size(); }
    std::size_t kernel_size() const { return kernel_size_; }
    const std::vector<ConvLayer>& layers() const { return layers_; }
    bool empty() const { return layers_.empty(); }

    // (rows, cols) complex image -> same shape.  When `tape` is non-null
    // the hidden activation derivatives are recorded into it.
    ComplexArray forward(const ComplexArray& x, NetTape* tape = nullptr) const;

    // Linearized passes at the point recorded in `tape`.
    ComplexArray jvp(const NetTape& tape, const ComplexArray& u) const;
    ComplexArray vjp(const NetTape& tape, const ComplexArray& w) const;

private:
    std::vector<ConvLayer> layers_;
    std::size_t kernel_size_ = 0;
};

// Seeded construction: channel plan 1 -> hidden_channels x (n_layers - 1)
// -> 1, kernels (kernel_size x kernel_size, odd), weights gain/sqrt(fan_in)
// circular complex gaussians, hidden biases 3 * gain draws, last bias zero.
SmoothConvNet make_conv_net(std::size_t n_layers, std::size_t hidden_channels,
                            std::size_t kernel_size, std::uint64_t weights_seed,
                            double gain = 0.5);

// Weight files <base>.layer<i>.{w,b}.{hdr,bin} plus a <base>.manifest
// text file (layer shapes, activation, seed).
void write_conv_net(const std::filesystem::path& base, const SmoothConvNet& net,
                    std::uint64_t weights_seed);
SmoothConvNet read_conv_net(const std::filesystem::path& base);

} // namespace varsketch
