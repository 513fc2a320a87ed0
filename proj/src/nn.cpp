#include "tonal/nn.hpp"

#include <cmath>

#include "tonal/errors.hpp"

namespace tonal::nn {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ShapeMismatch(what);
}

}  // namespace

std::string layer_kind_name(LayerKind kind) {
    switch (kind) {
        case LayerKind::conv1d: return "conv1d";
        case LayerKind::tconv1d: return "tconv1d";
        case LayerKind::dense: return "dense";
    }
    return "unknown";
}

LayerKind layer_kind_from_name(const std::string& name) {
    if (name == "conv1d") return LayerKind::conv1d;
    if (name == "tconv1d") return LayerKind::tconv1d;
    if (name == "dense") return LayerKind::dense;
    throw DataError("unknown layer kind: " + name);
}

LayerParams make_conv1d(int in_channels, int out_channels, int kernel) {
    LayerParams p;
    p.kind = LayerKind::conv1d;
    p.in_channels = in_channels;
    p.out_channels = out_channels;
    p.kernel = kernel;
    p.stride = 1;
    p.weights = Tensor(out_channels, in_channels * kernel);
    p.biases.assign(out_channels, 0.0);
    return p;
}

LayerParams make_tconv1d(int in_channels, int out_channels, int kernel, int stride,
                         int output_padding) {
    LayerParams p;
    p.kind = LayerKind::tconv1d;
    p.in_channels = in_channels;
    p.out_channels = out_channels;
    p.kernel = kernel;
    p.stride = stride;
    p.output_padding = output_padding;
    p.weights = Tensor(in_channels, out_channels * kernel);
    p.biases.assign(out_channels, 0.0);
    return p;
}

LayerParams make_dense(int in_features, int out_features) {
    LayerParams p;
    p.kind = LayerKind::dense;
    p.in_channels = in_features;
    p.out_channels = out_features;
    p.weights = Tensor(out_features, in_features);
    p.biases.assign(out_features, 0.0);
    return p;
}

Tensor conv1d_forward(const Tensor& x, const LayerParams& p) {
    require(p.kind == LayerKind::conv1d, "conv1d_forward on non-conv layer");
    require(x.channels == p.in_channels, "conv1d input channels");
    require(x.length >= p.kernel, "conv1d input shorter than kernel");
    const int out_len = x.length - p.kernel + 1;
    Tensor out(p.out_channels, out_len);
    for (int co = 0; co < p.out_channels; ++co) {
        for (int i = 0; i < out_len; ++i) {
            double acc = p.biases[co];
            for (int ci = 0; ci < p.in_channels; ++ci) {
                for (int j = 0; j < p.kernel; ++j) {
                    acc += p.weights.at(co, ci * p.kernel + j) * x.at(ci, i + j);
                }
            }
            out.at(co, i) = acc;
        }
    }
    return out;
}

LayerGrads conv1d_backward(const Tensor& x, const LayerParams& p, const Tensor& grad_out) {
    const int out_len = x.length - p.kernel + 1;
    require(grad_out.channels == p.out_channels && grad_out.length == out_len,
            "conv1d grad_out shape");
    LayerGrads g;
    g.x = Tensor(x.channels, x.length);
    g.w = Tensor(p.weights.channels, p.weights.length);
    g.b.assign(p.biases.size(), 0.0);
    for (int co = 0; co < p.out_channels; ++co) {
        for (int i = 0; i < out_len; ++i) {
            const double go = grad_out.at(co, i);
            g.b[co] += go;
            for (int ci = 0; ci < p.in_channels; ++ci) {
                for (int j = 0; j < p.kernel; ++j) {
                    g.w.at(co, ci * p.kernel + j) += go * x.at(ci, i + j);
                    g.x.at(ci, i + j) += go * p.weights.at(co, ci * p.kernel + j);
                }
            }
        }
    }
    return g;
}

MaxPoolResult maxpool1d_forward(const Tensor& x) {
    require(x.length >= 2, "maxpool input length");
    const int out_len = x.length / 2;
    MaxPoolResult r;
    r.y = Tensor(x.channels, out_len);
    r.argmax.resize(static_cast<std::size_t>(x.channels) * out_len);
    for (int c = 0; c < x.channels; ++c) {
        for (int i = 0; i < out_len; ++i) {
            const int base = 2 * i;
            const double a = x.at(c, base);
            const double b = x.at(c, base + 1);
            const int pick = b > a ? base + 1 : base;  // tie -> lower index
            r.y.at(c, i) = x.at(c, pick);
            r.argmax[static_cast<std::size_t>(c) * out_len + i] = c * x.length + pick;
        }
    }
    return r;
}

Tensor maxpool1d_backward(const std::vector<int>& argmax, const Tensor& grad_out,
                          int input_length) {
    require(static_cast<int>(argmax.size()) == grad_out.size(), "maxpool argmax size");
    Tensor g(grad_out.channels, input_length);
    for (std::size_t i = 0; i < argmax.size(); ++i) {
        g.data[argmax[i]] += grad_out.data[i];
    }
    return g;
}

Tensor dense_forward(const Tensor& x, const LayerParams& p) {
    require(p.kind == LayerKind::dense, "dense_forward on non-dense layer");
    require(x.size() == p.in_channels, "dense input size");
    Tensor out(1, p.out_channels);
    for (int i = 0; i < p.out_channels; ++i) {
        double acc = p.biases[i];
        for (int j = 0; j < p.in_channels; ++j) {
            acc += p.weights.at(i, j) * x.data[j];
        }
        out.data[i] = acc;
    }
    return out;
}

LayerGrads dense_backward(const Tensor& x, const LayerParams& p, const Tensor& grad_out) {
    require(grad_out.size() == p.out_channels, "dense grad_out size");
    LayerGrads g;
    g.x = Tensor(x.channels, x.length);
    g.w = Tensor(p.weights.channels, p.weights.length);
    g.b.assign(p.biases.size(), 0.0);
    for (int i = 0; i < p.out_channels; ++i) {
        const double go = grad_out.data[i];
        g.b[i] += go;
        for (int j = 0; j < p.in_channels; ++j) {
            g.w.at(i, j) += go * x.data[j];
            g.x.data[j] += go * p.weights.at(i, j);
        }
    }
    return g;
}

Tensor tconv1d_forward(const Tensor& x, const LayerParams& p) {
    require(p.kind == LayerKind::tconv1d, "tconv1d_forward on non-tconv layer");
    require(x.channels == p.in_channels, "tconv1d input channels");
    const int out_len = (x.length - 1) * p.stride + p.kernel + p.output_padding;
    Tensor out(p.out_channels, out_len);
    for (int co = 0; co < p.out_channels; ++co) {
        for (int i = 0; i < out_len; ++i) out.at(co, i) = p.biases[co];
    }
    for (int ci = 0; ci < p.in_channels; ++ci) {
        for (int t = 0; t < x.length; ++t) {
            const double xv = x.at(ci, t);
            for (int co = 0; co < p.out_channels; ++co) {
                for (int j = 0; j < p.kernel; ++j) {
                    out.at(co, p.stride * t + j) += p.weights.at(ci, co * p.kernel + j) * xv;
                }
            }
        }
    }
    return out;
}

LayerGrads tconv1d_backward(const Tensor& x, const LayerParams& p, const Tensor& grad_out) {
    const int out_len = (x.length - 1) * p.stride + p.kernel + p.output_padding;
    require(grad_out.channels == p.out_channels && grad_out.length == out_len,
            "tconv1d grad_out shape");
    LayerGrads g;
    g.x = Tensor(x.channels, x.length);
    g.w = Tensor(p.weights.channels, p.weights.length);
    g.b.assign(p.biases.size(), 0.0);
    for (int co = 0; co < p.out_channels; ++co) {
        for (int i = 0; i < out_len; ++i) g.b[co] += grad_out.at(co, i);
    }
    for (int ci = 0; ci < p.in_channels; ++ci) {
        for (int t = 0; t < x.length; ++t) {
            double gx = 0.0;
            for (int co = 0; co < p.out_channels; ++co) {
                for (int j = 0; j < p.kernel; ++j) {
                    const double go = grad_out.at(co, p.stride * t + j);
                    g.w.at(ci, co * p.kernel + j) += go * x.at(ci, t);
                    gx += go * p.weights.at(ci, co * p.kernel + j);
                }
            }
            g.x.at(ci, t) = gx;
        }
    }
    return g;
}

Tensor tanh_forward(const Tensor& x) {
    Tensor y(x.channels, x.length);
    for (int i = 0; i < x.size(); ++i) y.data[i] = std::tanh(x.data[i]);
    return y;
}

Tensor tanh_backward(const Tensor& y, const Tensor& grad_out) {
    require(y.size() == grad_out.size(), "tanh_backward size");
    Tensor g(y.channels, y.length);
    for (int i = 0; i < y.size(); ++i) g.data[i] = (1.0 - y.data[i] * y.data[i]) * grad_out.data[i];
    return g;
}

Tensor sigmoid_forward(const Tensor& x) {
    Tensor y(x.channels, x.length);
    for (int i = 0; i < x.size(); ++i) y.data[i] = 1.0 / (1.0 + std::exp(-x.data[i]));
    return y;
}

Tensor sigmoid_backward(const Tensor& y, const Tensor& grad_out) {
    require(y.size() == grad_out.size(), "sigmoid_backward size");
    Tensor g(y.channels, y.length);
    for (int i = 0; i < y.size(); ++i) {
        g.data[i] = y.data[i] * (1.0 - y.data[i]) * grad_out.data[i];
    }
    return g;
}

MseResult mse_loss(const Tensor& pred, const Tensor& target) {
    require(pred.size() == target.size(), "mse_loss size");
    MseResult r;
    r.grad_pred = Tensor(pred.channels, pred.length);
    const double inv_n = 1.0 / pred.size();
    for (int i = 0; i < pred.size(); ++i) {
        const double d = pred.data[i] - target.data[i];
        r.loss += d * d * inv_n;
        r.grad_pred.data[i] = 2.0 * d * inv_n;
    }
    return r;
}

void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state) {
    if (params.size() != grads.size()) throw ShapeMismatch("adam_step params/grads size");
    if (state.m.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
    }
    if (state.m.size() != params.size()) throw ShapeMismatch("adam_step moment buffer size");
    for (double g : grads) {
        if (!std::isfinite(g)) throw NonFiniteGradient("non-finite gradient in adam_step");
    }

    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        params[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
}

}  // namespace tonal::nn
