// Copyright 2026 The LPIC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LPIC_MODEL_H_
#define LPIC_MODEL_H_

#include <cstdint>
#include <random>
#include <vector>

#include "lpic/image.h"

namespace lpic {

enum class Distribution : uint8_t { kGaussian = 0, kLogistic = 1 };

// Architecture hyper-parameters of the masked-convolution network.
//
// Layer 1 is a masked (2h+1)x(2h+1) convolution over the causal taps only,
// layers 2..L-1 are 1x1 C->C convolutions and layer L is a 1x1 C->12K
// convolution. LeakyReLU follows every layer except the last.
struct ModelConfig {
  int mixtures = 3;      // K
  int filters = 128;     // C
  int layers = 5;        // L, total conv layers
  int kernel_half = 2;   // h
  Distribution distribution = Distribution::kGaussian;

  // Raw parameters per pixel: 3 sub-pixels x (weight, mean, scale) x K plus
  // K each of the alpha, beta, gamma cross-channel coefficients.
  int outputs() const { return 12 * mixtures; }
  int taps() const { return (2 * kernel_half + 1) * kernel_half + kernel_half; }
  int context_size() const { return 3 * taps(); }
  int hidden_layers() const { return layers - 2; }

  bool operator==(const ModelConfig&) const = default;
};

ModelConfig ReferenceConfig();

// Throws DimensionError when a field is out of range.
void ValidateConfig(const ModelConfig& cfg);

// A causal tap as an offset from the current pixel.
struct TapOffset {
  int dy;
  int dx;
};

// Canonical tap order: rows -h..-1 with columns -h..h, then row 0 with
// columns -h..-1. Every evaluation path indexes taps in this order.
std::vector<TapOffset> CausalTaps(int kernel_half);

// Dense layer, weights row-major [out][in]. The masked layer is stored as a
// dense layer over the flattened causal context (in = 3 * taps, tap-major,
// channel-minor), so no center or future positions exist as parameters.
struct DenseLayer {
  int in = 0;
  int out = 0;
  std::vector<float> weights;
  std::vector<float> bias;

  DenseLayer() = default;
  DenseLayer(int in_size, int out_size)
      : in(in_size),
        out(out_size),
        weights(size_t(in_size) * out_size, 0.0f),
        bias(out_size, 0.0f) {}

  float& w(int o, int i) { return weights[size_t(o) * in + i]; }
  float w(int o, int i) const { return weights[size_t(o) * in + i]; }
  size_t num_parameters() const { return weights.size() + bias.size(); }
  bool operator==(const DenseLayer&) const = default;
};

struct Weights {
  ModelConfig config;
  // layers[0] is the masked layer, layers.back() the output layer.
  std::vector<DenseLayer> layers;

  size_t num_parameters() const;
  bool operator==(const Weights&) const = default;
};

// All-zero weights with shapes matching cfg.
Weights ZeroWeights(const ModelConfig& cfg);

// Zero-mean uniform kernels with bound sqrt(6 / (fan_in + fan_out)), zero
// biases.
Weights InitializeWeights(const ModelConfig& cfg, std::mt19937_64& rng);

// Throws DimensionError if any tensor disagrees with w.config.
void ValidateWeights(const Weights& w);

// 12*3*C + C + (L-2)*(C^2 + C) + (C*12K + 12K) for h = 2; the general form
// uses 3 * taps in place of 36.
int64_t CountParameters(const ModelConfig& cfg);

// Multiply-accumulates per pixel, counting the masked layer at its causal
// tap count and excluding biases and activations.
int64_t MacsPerPixel(const ModelConfig& cfg);
int64_t EstimateMacs(const ModelConfig& cfg, int height, int width);

inline constexpr float kLeakySlope = 0.01f;

inline float LeakyRelu(float x) { return x >= 0.0f ? x : kLeakySlope * x; }

// Maps intensity 0..255 to [-1, 1]. Out-of-image context reads as 0.
inline float NormalizeIntensity(uint8_t v) {
  return static_cast<float>(v) / 127.5f - 1.0f;
}
FeaturePlane Normalize(const Image& img);

}  // namespace lpic

#endif  // LPIC_MODEL_H_
