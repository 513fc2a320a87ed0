#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tonal/nn.hpp"

namespace tonal::ae {

inline constexpr int kInputLen = 40;
inline constexpr int kLatentDim = 2;

// Convolutional autoencoder over a single 40-point contour.
//
// Encoder: conv1d(1->2,k4) -> pool2 -> tanh -> conv1d(2->4,k4) -> pool2 -> tanh
//          -> flatten(28) -> dense(28->2)
// Decoder: dense(2->28) -> tanh -> reshape(4,7) -> tconv1d(4->2,k4,s2,op2) -> tanh
//          -> tconv1d(2->1,k4,s2,op2) -> sigmoid
//
// Shape chain: 40 -> 37 -> 18 -> 15 -> 7 -> (28) -> 2 -> (28) -> 7 -> 18 -> 40.
struct Model {
    nn::LayerParams enc_conv1;
    nn::LayerParams enc_conv2;
    nn::LayerParams enc_dense;
    nn::LayerParams dec_dense;
    nn::LayerParams dec_tconv1;
    nn::LayerParams dec_tconv2;
};

// Fresh model with uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) weights and biases,
// drawn layer by layer in declaration order, weights before biases.
Model build_model(std::uint64_t seed);

// Everything the backward pass needs, kept in forward order.
struct ForwardCache {
    nn::Tensor x;        // 1x40 input
    nn::Tensor c1;       // 2x37
    nn::MaxPoolResult m1;  // 2x18
    nn::Tensor h1;       // 2x18
    nn::Tensor c2;       // 4x15
    nn::MaxPoolResult m2;  // 4x7
    nn::Tensor h2;       // 4x7
    nn::Tensor z;        // 1x2 latent
    nn::Tensor d;        // 1x28
    nn::Tensor hd;       // 1x28
    nn::Tensor t1;       // 2x18
    nn::Tensor u1;       // 2x18
    nn::Tensor t2;       // 1x40
    nn::Tensor y;        // 1x40 reconstruction
};

ForwardCache forward(const Model& model, const std::vector<double>& values);

struct ModelGrads {
    nn::LayerGrads enc_conv1;
    nn::LayerGrads enc_conv2;
    nn::LayerGrads enc_dense;
    nn::LayerGrads dec_dense;
    nn::LayerGrads dec_tconv1;
    nn::LayerGrads dec_tconv2;
};

// Backpropagate d(loss)/d(y) through the whole model.
ModelGrads backward(const Model& model, const ForwardCache& cache, const nn::Tensor& grad_y);

std::array<double, kLatentDim> encode(const Model& model, const std::vector<double>& values);
std::vector<double> decode(const Model& model, const std::array<double, kLatentDim>& latent);

// Parameter vector in declaration order, weights before biases within a layer.
std::size_t param_count(const Model& model);
std::vector<double> flatten_params(const Model& model);
void set_params(Model& model, const std::vector<double>& params);
std::vector<double> flatten_grads(const Model& model, const ModelGrads& grads);

struct TrainConfig {
    int epochs = 500;
    int batch_size = 60;
    double lr = 5e-4;
    std::uint64_t seed = 0;
};

struct TrainResult {
    std::vector<double> loss_history;  // one mean-per-sample MSE per epoch
};

// Mini-batch Adam on mean reconstruction MSE. Shuffles each epoch with a
// generator seeded from cfg.seed; gradients are averaged over the batch.
TrainResult train(Model& model, const std::vector<std::vector<double>>& inputs,
                  const TrainConfig& cfg);

void save_checkpoint(const Model& model, const std::filesystem::path& path);
Model load_checkpoint(const std::filesystem::path& path);

}  // namespace tonal::ae
