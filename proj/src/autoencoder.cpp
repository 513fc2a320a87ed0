#include "tonal/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "tonal/errors.hpp"
#include "tonal/rng.hpp"

namespace tonal::ae {

namespace {

Model make_architecture() {
    Model m;
    m.enc_conv1 = nn::make_conv1d(1, 2, 4);
    m.enc_conv2 = nn::make_conv1d(2, 4, 4);
    m.enc_dense = nn::make_dense(28, 2);
    m.dec_dense = nn::make_dense(2, 28);
    m.dec_tconv1 = nn::make_tconv1d(4, 2, 4, 2, 2);
    m.dec_tconv2 = nn::make_tconv1d(2, 1, 4, 2, 2);
    return m;
}

template <typename ModelT, typename Fn>
void for_each_layer(ModelT& m, Fn&& fn) {
    fn("enc_conv1", m.enc_conv1);
    fn("enc_conv2", m.enc_conv2);
    fn("enc_dense", m.enc_dense);
    fn("dec_dense", m.dec_dense);
    fn("dec_tconv1", m.dec_tconv1);
    fn("dec_tconv2", m.dec_tconv2);
}

int layer_fan_in(const nn::LayerParams& p) {
    return p.kind == nn::LayerKind::dense ? p.in_channels : p.in_channels * p.kernel;
}

nn::Tensor reshape(const nn::Tensor& t, int channels, int length) {
    nn::Tensor out(channels, length);
    out.data = t.data;
    return out;
}

nn::Tensor input_tensor(const std::vector<double>& values) {
    if (static_cast<int>(values.size()) != kInputLen) {
        throw ShapeMismatch("autoencoder input must have 40 values");
    }
    nn::Tensor x(1, kInputLen);
    x.data = values;
    return x;
}

}  // namespace

Model build_model(std::uint64_t seed) {
    Model m = make_architecture();
    std::mt19937_64 rng(seed);
    for_each_layer(m, [&rng](const char*, nn::LayerParams& layer) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer_fan_in(layer)));
        for (double& w : layer.weights.data) w = uniform(rng, -bound, bound);
        for (double& b : layer.biases) b = uniform(rng, -bound, bound);
    });
    return m;
}

ForwardCache forward(const Model& model, const std::vector<double>& values) {
    ForwardCache c;
    c.x = input_tensor(values);
    c.c1 = nn::conv1d_forward(c.x, model.enc_conv1);
    c.m1 = nn::maxpool1d_forward(c.c1);
    c.h1 = nn::tanh_forward(c.m1.y);
    c.c2 = nn::conv1d_forward(c.h1, model.enc_conv2);
    c.m2 = nn::maxpool1d_forward(c.c2);
    c.h2 = nn::tanh_forward(c.m2.y);
    c.z = nn::dense_forward(c.h2, model.enc_dense);
    c.d = nn::dense_forward(c.z, model.dec_dense);
    c.hd = nn::tanh_forward(c.d);
    c.t1 = nn::tconv1d_forward(reshape(c.hd, 4, 7), model.dec_tconv1);
    c.u1 = nn::tanh_forward(c.t1);
    c.t2 = nn::tconv1d_forward(c.u1, model.dec_tconv2);
    c.y = nn::sigmoid_forward(c.t2);
    return c;
}

ModelGrads backward(const Model& model, const ForwardCache& c, const nn::Tensor& grad_y) {
    ModelGrads g;
    nn::Tensor g_t2 = nn::sigmoid_backward(c.y, grad_y);
    g.dec_tconv2 = nn::tconv1d_backward(c.u1, model.dec_tconv2, g_t2);
    nn::Tensor g_t1 = nn::tanh_backward(c.u1, g.dec_tconv2.x);
    g.dec_tconv1 = nn::tconv1d_backward(reshape(c.hd, 4, 7), model.dec_tconv1, g_t1);
    nn::Tensor g_d = nn::tanh_backward(c.hd, reshape(g.dec_tconv1.x, 1, 28));
    g.dec_dense = nn::dense_backward(c.z, model.dec_dense, g_d);
    g.enc_dense = nn::dense_backward(c.h2, model.enc_dense, g.dec_dense.x);
    nn::Tensor g_m2 = nn::tanh_backward(c.h2, g.enc_dense.x);
    nn::Tensor g_c2 = nn::maxpool1d_backward(c.m2.argmax, g_m2, c.c2.length);
    g.enc_conv2 = nn::conv1d_backward(c.h1, model.enc_conv2, g_c2);
    nn::Tensor g_m1 = nn::tanh_backward(c.h1, g.enc_conv2.x);
    nn::Tensor g_c1 = nn::maxpool1d_backward(c.m1.argmax, g_m1, c.c1.length);
    g.enc_conv1 = nn::conv1d_backward(c.x, model.enc_conv1, g_c1);
    return g;
}

std::array<double, kLatentDim> encode(const Model& model, const std::vector<double>& values) {
    nn::Tensor x = input_tensor(values);
    nn::Tensor h = nn::tanh_forward(nn::maxpool1d_forward(nn::conv1d_forward(x, model.enc_conv1)).y);
    h = nn::tanh_forward(nn::maxpool1d_forward(nn::conv1d_forward(h, model.enc_conv2)).y);
    nn::Tensor z = nn::dense_forward(h, model.enc_dense);
    return {z.data[0], z.data[1]};
}

std::vector<double> decode(const Model& model, const std::array<double, kLatentDim>& latent) {
    nn::Tensor z(1, kLatentDim);
    z.data = {latent[0], latent[1]};
    nn::Tensor h = nn::tanh_forward(nn::dense_forward(z, model.dec_dense));
    h = nn::tanh_forward(nn::tconv1d_forward(reshape(h, 4, 7), model.dec_tconv1));
    nn::Tensor y = nn::sigmoid_forward(nn::tconv1d_forward(h, model.dec_tconv2));
    return y.data;
}

std::size_t param_count(const Model& model) {
    std::size_t n = 0;
    for_each_layer(model, [&n](const char*, const nn::LayerParams& layer) {
        n += layer.parameter_count();
    });
    return n;
}

std::vector<double> flatten_params(const Model& model) {
    std::vector<double> out;
    out.reserve(param_count(model));
    for_each_layer(model, [&out](const char*, const nn::LayerParams& layer) {
        out.insert(out.end(), layer.weights.data.begin(), layer.weights.data.end());
        out.insert(out.end(), layer.biases.begin(), layer.biases.end());
    });
    return out;
}

void set_params(Model& model, const std::vector<double>& params) {
    if (params.size() != param_count(model)) {
        throw ShapeMismatch("set_params: wrong parameter count");
    }
    std::size_t pos = 0;
    for_each_layer(model, [&params, &pos](const char*, nn::LayerParams& layer) {
        std::copy_n(params.begin() + pos, layer.weights.data.size(), layer.weights.data.begin());
        pos += layer.weights.data.size();
        std::copy_n(params.begin() + pos, layer.biases.size(), layer.biases.begin());
        pos += layer.biases.size();
    });
}

std::vector<double> flatten_grads(const Model& model, const ModelGrads& grads) {
    std::vector<double> out;
    out.reserve(param_count(model));
    auto append = [&out](const nn::LayerGrads& g) {
        out.insert(out.end(), g.w.data.begin(), g.w.data.end());
        out.insert(out.end(), g.b.begin(), g.b.end());
    };
    append(grads.enc_conv1);
    append(grads.enc_conv2);
    append(grads.enc_dense);
    append(grads.dec_dense);
    append(grads.dec_tconv1);
    append(grads.dec_tconv2);
    return out;
}

TrainResult train(Model& model, const std::vector<std::vector<double>>& inputs,
                  const TrainConfig& cfg) {
    if (inputs.empty()) throw DataError("train: empty input set");
    if (cfg.batch_size < 1) throw ConfigError("train: batch_size must be positive");
    if (cfg.epochs < 0) throw ConfigError("train: epochs must be non-negative");

    std::mt19937_64 rng(cfg.seed);
    nn::AdamState adam;
    adam.lr = cfg.lr;
    std::vector<double> params = flatten_params(model);

    std::vector<std::size_t> order(inputs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainResult result;
    result.loss_history.reserve(cfg.epochs);
    std::vector<double> batch_grad(params.size());
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle(order, rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            std::fill(batch_grad.begin(), batch_grad.end(), 0.0);
            for (std::size_t i = start; i < stop; ++i) {
                const std::vector<double>& sample = inputs[order[i]];
                ForwardCache cache = forward(model, sample);
                nn::Tensor target(1, kInputLen);
                target.data = sample;
                nn::MseResult mse = nn::mse_loss(cache.y, target);
                if (!std::isfinite(mse.loss)) {
                    throw NonFiniteLoss(
                        "training loss became non-finite at epoch " + std::to_string(epoch) +
                        ", batch " + std::to_string(start / static_cast<std::size_t>(cfg.batch_size)));
                }
                epoch_loss += mse.loss;
                ModelGrads grads = backward(model, cache, mse.grad_pred);
                std::vector<double> flat = flatten_grads(model, grads);
                for (std::size_t j = 0; j < flat.size(); ++j) batch_grad[j] += flat[j];
            }
            const double inv = 1.0 / static_cast<double>(stop - start);
            for (double& gv : batch_grad) gv *= inv;
            nn::adam_step(params, batch_grad, adam);
            set_params(model, params);
        }
        epoch_loss /= static_cast<double>(inputs.size());
        if (!std::isfinite(epoch_loss)) {
            throw NonFiniteLoss("training loss became non-finite at epoch " +
                                std::to_string(epoch));
        }
        result.loss_history.push_back(epoch_loss);
    }
    return result;
}

void save_checkpoint(const Model& model, const std::filesystem::path& path) {
    nlohmann::ordered_json doc;
    doc["format_version"] = 1;
    doc["layers"] = nlohmann::ordered_json::array();
    for_each_layer(model, [&doc](const char* name, const nn::LayerParams& layer) {
        nlohmann::ordered_json entry;
        entry["name"] = name;
        entry["kind"] = nn::layer_kind_name(layer.kind);
        entry["in_channels"] = layer.in_channels;
        entry["out_channels"] = layer.out_channels;
        entry["kernel"] = layer.kernel;
        entry["stride"] = layer.stride;
        entry["output_padding"] = layer.output_padding;
        entry["weights"] = layer.weights.data;
        entry["biases"] = layer.biases;
        doc["layers"].push_back(std::move(entry));
    });
    std::ofstream out(path);
    if (!out) throw DataError("cannot write checkpoint: " + path.string());
    out << doc.dump(2) << '\n';
}

Model load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile("checkpoint not found: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("checkpoint parse error: " + std::string(e.what()));
    }
    if (!doc.contains("format_version") || doc["format_version"].get<int>() != 1) {
        throw DataError("checkpoint: unsupported format_version");
    }
    Model m = make_architecture();
    if (!doc.contains("layers") || !doc["layers"].is_array() || doc["layers"].size() != 6) {
        throw DataError("checkpoint: expected 6 layers");
    }
    std::size_t idx = 0;
    try {
        for_each_layer(m, [&doc, &idx](const char* name, nn::LayerParams& layer) {
            const nlohmann::json& entry = doc["layers"][idx++];
            if (entry.at("name").get<std::string>() != name ||
                entry.at("kind").get<std::string>() != nn::layer_kind_name(layer.kind) ||
                entry.at("in_channels").get<int>() != layer.in_channels ||
                entry.at("out_channels").get<int>() != layer.out_channels ||
                entry.at("kernel").get<int>() != layer.kernel ||
                entry.at("stride").get<int>() != layer.stride ||
                entry.at("output_padding").get<int>() != layer.output_padding) {
                throw DataError(std::string("checkpoint: layer mismatch at ") + name);
            }
            std::vector<double> w = entry.at("weights").get<std::vector<double>>();
            std::vector<double> b = entry.at("biases").get<std::vector<double>>();
            if (w.size() != layer.weights.data.size() || b.size() != layer.biases.size()) {
                throw DataError(std::string("checkpoint: parameter size mismatch at ") + name);
            }
            layer.weights.data = std::move(w);
            layer.biases = std::move(b);
        });
    } catch (const nlohmann::json::exception& e) {
        throw DataError("checkpoint field error: " + std::string(e.what()));
    }
    return m;
}

}  // namespace tonal::ae
