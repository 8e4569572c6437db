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

#include "lpic/model.h"

#include <cmath>
#include <string>

#include "lpic/errors.h"

namespace lpic {

bool IsWellFormed(const Image& img) {
  return img.height > 0 && img.width > 0 &&
         img.pixels.size() == img.num_pixels() * 3;
}

ModelConfig ReferenceConfig() { return ModelConfig{}; }

void ValidateConfig(const ModelConfig& cfg) {
  if (cfg.mixtures < 1 || cfg.mixtures > 21) {
    throw DimensionError("mixtures must be in 1..21, got " +
                         std::to_string(cfg.mixtures));
  }
  if (cfg.filters < 1 || cfg.filters > 255) {
    throw DimensionError("filters must be in 1..255, got " +
                         std::to_string(cfg.filters));
  }
  if (cfg.layers < 3 || cfg.layers > 255) {
    throw DimensionError("layers must be >= 3, got " +
                         std::to_string(cfg.layers));
  }
  if (cfg.kernel_half < 1 || cfg.kernel_half > 16) {
    throw DimensionError("kernel_half must be in 1..16, got " +
                         std::to_string(cfg.kernel_half));
  }
  if (cfg.distribution != Distribution::kGaussian &&
      cfg.distribution != Distribution::kLogistic) {
    throw DimensionError("unknown distribution");
  }
}

std::vector<TapOffset> CausalTaps(int kernel_half) {
  std::vector<TapOffset> taps;
  for (int dy = -kernel_half; dy < 0; ++dy) {
    for (int dx = -kernel_half; dx <= kernel_half; ++dx) taps.push_back({dy, dx});
  }
  for (int dx = -kernel_half; dx < 0; ++dx) taps.push_back({0, dx});
  return taps;
}

size_t Weights::num_parameters() const {
  size_t n = 0;
  for (const DenseLayer& l : layers) n += l.num_parameters();
  return n;
}

Weights ZeroWeights(const ModelConfig& cfg) {
  ValidateConfig(cfg);
  Weights w;
  w.config = cfg;
  w.layers.emplace_back(cfg.context_size(), cfg.filters);
  for (int i = 0; i < cfg.hidden_layers(); ++i) {
    w.layers.emplace_back(cfg.filters, cfg.filters);
  }
  w.layers.emplace_back(cfg.filters, cfg.outputs());
  return w;
}

Weights InitializeWeights(const ModelConfig& cfg, std::mt19937_64& rng) {
  Weights w = ZeroWeights(cfg);
  for (DenseLayer& l : w.layers) {
    const float bound = std::sqrt(6.0f / float(l.in + l.out));
    std::uniform_real_distribution<float> dist(-bound, bound);
    for (float& v : l.weights) v = dist(rng);
  }
  return w;
}

void ValidateWeights(const Weights& w) {
  ValidateConfig(w.config);
  const ModelConfig& cfg = w.config;
  if (int(w.layers.size()) != cfg.layers) {
    throw DimensionError("expected " + std::to_string(cfg.layers) +
                         " layers, got " + std::to_string(w.layers.size()));
  }
  for (size_t i = 0; i < w.layers.size(); ++i) {
    const DenseLayer& l = w.layers[i];
    const int want_in = i == 0 ? cfg.context_size() : cfg.filters;
    const int want_out = i + 1 == w.layers.size() ? cfg.outputs() : cfg.filters;
    if (l.in != want_in || l.out != want_out ||
        l.weights.size() != size_t(l.in) * l.out || int(l.bias.size()) != l.out) {
      throw DimensionError("layer " + std::to_string(i) + " has shape " +
                           std::to_string(l.out) + "x" + std::to_string(l.in) +
                           ", expected " + std::to_string(want_out) + "x" +
                           std::to_string(want_in));
    }
  }
}

int64_t CountParameters(const ModelConfig& cfg) {
  const int64_t c = cfg.filters;
  const int64_t m = cfg.outputs();
  const int64_t masked = int64_t(cfg.context_size()) * c + c;
  const int64_t hidden = int64_t(cfg.hidden_layers()) * (c * c + c);
  return masked + hidden + (c * m + m);
}

int64_t MacsPerPixel(const ModelConfig& cfg) {
  const int64_t c = cfg.filters;
  return int64_t(cfg.context_size()) * c +
         int64_t(cfg.hidden_layers()) * c * c + c * cfg.outputs();
}

int64_t EstimateMacs(const ModelConfig& cfg, int height, int width) {
  return MacsPerPixel(cfg) * int64_t(height) * width;
}

FeaturePlane Normalize(const Image& img) {
  FeaturePlane out(img.height, img.width, 3);
  for (size_t i = 0; i < img.pixels.size(); ++i) {
    out.values[i] = NormalizeIntensity(img.pixels[i]);
  }
  return out;
}

}  // namespace lpic
