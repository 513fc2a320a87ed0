#pragma once

#include <string>
#include <vector>

namespace tonal::nn {

// Row-major (channels, length) tensor; plain vectors use channels == 1.
// All arithmetic is 64-bit.
struct Tensor {
    int channels = 0;
    int length = 0;
    std::vector<double> data;

    Tensor() = default;
    Tensor(int c, int l) : channels(c), length(l), data(static_cast<std::size_t>(c) * l, 0.0) {}

    static Tensor row(std::vector<double> values) {
        Tensor t;
        t.channels = 1;
        t.length = static_cast<int>(values.size());
        t.data = std::move(values);
        return t;
    }

    double& at(int c, int i) { return data[static_cast<std::size_t>(c) * length + i]; }
    double at(int c, int i) const { return data[static_cast<std::size_t>(c) * length + i]; }
    int size() const { return channels * length; }
};

enum class LayerKind { conv1d, tconv1d, dense };

std::string layer_kind_name(LayerKind kind);
LayerKind layer_kind_from_name(const std::string& name);

// Weight layout:
//   conv1d : weights (out_channels, in_channels*kernel), w[co][ci][j]
//   tconv1d: weights (in_channels, out_channels*kernel), w[ci][co][j]
//   dense  : weights (out_channels, in_channels), out = W x + b
struct LayerParams {
    LayerKind kind = LayerKind::dense;
    int in_channels = 0;
    int out_channels = 0;
    int kernel = 0;
    int stride = 1;
    int output_padding = 0;
    Tensor weights;
    std::vector<double> biases;

    int parameter_count() const { return weights.size() + static_cast<int>(biases.size()); }
};

LayerParams make_conv1d(int in_channels, int out_channels, int kernel);
LayerParams make_tconv1d(int in_channels, int out_channels, int kernel, int stride,
                         int output_padding);
LayerParams make_dense(int in_features, int out_features);

struct LayerGrads {
    Tensor x;
    Tensor w;
    std::vector<double> b;
};

// Valid (unpadded) convolution, stride 1: out (Cout, L-k+1).
Tensor conv1d_forward(const Tensor& x, const LayerParams& p);
LayerGrads conv1d_backward(const Tensor& x, const LayerParams& p, const Tensor& grad_out);

// Non-overlapping window-2 max pooling; a trailing odd element is dropped;
// ties break to the lower index. argmax holds flat indices into x.data.
struct MaxPoolResult {
    Tensor y;
    std::vector<int> argmax;
};
MaxPoolResult maxpool1d_forward(const Tensor& x);
Tensor maxpool1d_backward(const std::vector<int>& argmax, const Tensor& grad_out,
                          int input_length);

Tensor dense_forward(const Tensor& x, const LayerParams& p);
LayerGrads dense_backward(const Tensor& x, const LayerParams& p, const Tensor& grad_out);

// Transposed convolution: out length (L-1)*stride + k + output_padding;
// out[co, stride*t + j] accumulates w[ci][co][j] * x[ci, t], bias everywhere.
Tensor tconv1d_forward(const Tensor& x, const LayerParams& p);
LayerGrads tconv1d_backward(const Tensor& x, const LayerParams& p, const Tensor& grad_out);

Tensor tanh_forward(const Tensor& x);
Tensor tanh_backward(const Tensor& y, const Tensor& grad_out);  // y = tanh_forward(x)
Tensor sigmoid_forward(const Tensor& x);
Tensor sigmoid_backward(const Tensor& y, const Tensor& grad_out);

struct MseResult {
    double loss = 0.0;
    Tensor grad_pred;
};
MseResult mse_loss(const Tensor& pred, const Tensor& target);

struct AdamState {
    double lr = 5e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long step = 0;
    std::vector<double> m;
    std::vector<double> v;
};

// One bias-corrected Adam update over a flat parameter vector. Moment
// buffers are allocated on first use and must keep their size afterwards.
void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state);

}  // namespace tonal::nn
