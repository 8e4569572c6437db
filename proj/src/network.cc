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

#include "lpic/network.h"

#include <algorithm>
#include <string>

#include "lpic/errors.h"

namespace lpic {

namespace {

constexpr size_t kBlock = 8;

// Scalar canonical dense layer.
void DenseSerial(const DenseLayer& l, const float* in, float* out,
                 bool activate) {
  for (int o = 0; o < l.out; ++o) {
    const float* row = l.weights.data() + size_t(o) * l.in;
    float acc = 0.0f;
    for (int i = 0; i < l.in; ++i) acc += row[i] * in[i];
    acc += l.bias[o];
    out[o] = activate ? LeakyRelu(acc) : acc;
  }
}

// n <= kBlock inputs of width l.in against [in][out] weights. The inner loop
// runs over outputs so each accumulator still sees inputs in order.
void DenseBlock(const DenseLayer& l, const float* __restrict wt,
                const float* __restrict in, size_t n, float* __restrict out,
                bool activate) {
  const int width = l.out;
  std::fill(out, out + n * width, 0.0f);
  for (int i = 0; i < l.in; ++i) {
    const float* __restrict wrow = wt + size_t(i) * width;
    for (size_t p = 0; p < n; ++p) {
      const float x = in[p * l.in + i];
      float* __restrict acc = out + p * width;
      for (int o = 0; o < width; ++o) acc[o] += wrow[o] * x;
    }
  }
  const float* __restrict bias = l.bias.data();
  for (size_t p = 0; p < n; ++p) {
    float* __restrict acc = out + p * width;
    for (int o = 0; o < width; ++o) {
      const float v = acc[o] + bias[o];
      acc[o] = activate ? (v >= 0.0f ? v : kLeakySlope * v) : v;
    }
  }
}

}  // namespace

Network::Network(Weights weights) : weights_(std::move(weights)) {
  ValidateWeights(weights_);
  taps_ = CausalTaps(weights_.config.kernel_half);
  for (const DenseLayer& l : weights_.layers) {
    std::vector<float> t(l.weights.size());
    for (int o = 0; o < l.out; ++o) {
      for (int i = 0; i < l.in; ++i) t[size_t(i) * l.out + o] = l.w(o, i);
    }
    transposed_.push_back(std::move(t));
  }
}

void Network::ForwardFc(std::span<const float> context,
                        std::span<float> out) const {
  const ModelConfig& cfg = config();
  if (int(context.size()) != cfg.context_size()) {
    throw DimensionError("context has " + std::to_string(context.size()) +
                         " values, expected " +
                         std::to_string(cfg.context_size()));
  }
  if (int(out.size()) != cfg.outputs()) {
    throw DimensionError("output span has wrong length");
  }
  std::vector<float> a(cfg.filters), b(cfg.filters);
  const auto& layers = weights_.layers;
  DenseSerial(layers[0], context.data(), a.data(), true);
  for (size_t k = 1; k + 1 < layers.size(); ++k) {
    DenseSerial(layers[k], a.data(), b.data(), true);
    std::swap(a, b);
  }
  DenseSerial(layers.back(), a.data(), out.data(), false);
}

void Network::ForwardPatch(const FeaturePlane& patch,
                           std::span<float> out) const {
  const ModelConfig& cfg = config();
  const int side = 2 * cfg.kernel_half + 1;
  if (patch.height != side || patch.width != side || patch.channels != 3) {
    throw DimensionError("patch must be " + std::to_string(side) + "x" +
                         std::to_string(side) + "x3");
  }
  if (int(out.size()) != cfg.outputs()) {
    throw DimensionError("output span has wrong length");
  }
  // Masked convolution evaluated directly on the patch: walk the kernel in
  // raster order and stop at the center.
  const DenseLayer& masked = weights_.layers[0];
  const int h = cfg.kernel_half;
  std::vector<float> a(cfg.filters), b(cfg.filters);
  for (int f = 0; f < masked.out; ++f) {
    const float* row = masked.weights.data() + size_t(f) * masked.in;
    float acc = 0.0f;
    int tap = 0;
    for (int ky = 0; ky <= h; ++ky) {
      const int kx_end = ky < h ? side : h;
      for (int kx = 0; kx < kx_end; ++kx, ++tap) {
        const float* px = patch.pixel(ky, kx);
        for (int c = 0; c < 3; ++c) acc += row[tap * 3 + c] * px[c];
      }
    }
    acc += masked.bias[f];
    a[f] = LeakyRelu(acc);
  }
  const auto& layers = weights_.layers;
  for (size_t k = 1; k + 1 < layers.size(); ++k) {
    DenseSerial(layers[k], a.data(), b.data(), true);
    std::swap(a, b);
  }
  DenseSerial(layers.back(), a.data(), out.data(), false);
}

void Network::EvaluateBlock(const float* contexts, size_t n, float* out,
                            std::vector<float>& scratch) const {
  const auto& layers = weights_.layers;
  const size_t width = size_t(config().filters);
  scratch.resize(2 * kBlock * width);
  float* a = scratch.data();
  float* b = scratch.data() + kBlock * width;
  DenseBlock(layers[0], transposed_[0].data(), contexts, n, a, true);
  for (size_t k = 1; k + 1 < layers.size(); ++k) {
    DenseBlock(layers[k], transposed_[k].data(), a, n, b, true);
    std::swap(a, b);
  }
  DenseBlock(layers.back(), transposed_.back().data(), a, n, out, false);
}

void Network::EvaluateContexts(std::span<const float> contexts, size_t n,
                               std::span<float> out) const {
  const ModelConfig& cfg = config();
  if (contexts.size() != n * cfg.context_size() ||
      out.size() != n * cfg.outputs()) {
    throw DimensionError("context batch has inconsistent size");
  }
  const size_t in = cfg.context_size();
  const size_t m = cfg.outputs();
  const long blocks = long((n + kBlock - 1) / kBlock);
#pragma omp parallel if (blocks > 1)
  {
    std::vector<float> scratch;
#pragma omp for schedule(static)
    for (long blk = 0; blk < blocks; ++blk) {
      const size_t start = size_t(blk) * kBlock;
      const size_t count = std::min(kBlock, n - start);
      EvaluateBlock(contexts.data() + start * in, count,
                    out.data() + start * m, scratch);
    }
  }
}

void Network::EvaluateContextsSerial(std::span<const float> contexts, size_t n,
                                     std::span<float> out) const {
  const ModelConfig& cfg = config();
  if (contexts.size() != n * cfg.context_size() ||
      out.size() != n * cfg.outputs()) {
    throw DimensionError("context batch has inconsistent size");
  }
  std::vector<float> scratch;
  for (size_t start = 0; start < n; start += kBlock) {
    const size_t count = std::min(kBlock, n - start);
    EvaluateBlock(contexts.data() + start * cfg.context_size(), count,
                  out.data() + start * cfg.outputs(), scratch);
  }
}

FeaturePlane Network::ForwardFull(const FeaturePlane& image_n) const {
  if (image_n.channels != 3) throw DimensionError("image must have 3 channels");
  const ModelConfig& cfg = config();
  FeaturePlane out(image_n.height, image_n.width, cfg.outputs());
  const size_t in = cfg.context_size();
  const size_t m = cfg.outputs();
#pragma omp parallel if (image_n.height > 1)
  {
    std::vector<float> contexts(kBlock * in);
    std::vector<float> scratch;
#pragma omp for schedule(static)
    for (int row = 0; row < image_n.height; ++row) {
      for (int col = 0; col < image_n.width; col += int(kBlock)) {
        const size_t count = std::min(kBlock, size_t(image_n.width - col));
        for (size_t p = 0; p < count; ++p) {
          GatherContext(image_n, row, col + int(p), taps_,
                        contexts.data() + p * in);
        }
        EvaluateBlock(contexts.data(), count,
                      out.values.data() + (size_t(row) * out.width + col) * m,
                      scratch);
      }
    }
  }
  return out;
}

FeaturePlane Network::ForwardFullSerial(const FeaturePlane& image_n) const {
  if (image_n.channels != 3) throw DimensionError("image must have 3 channels");
  const ModelConfig& cfg = config();
  FeaturePlane out(image_n.height, image_n.width, cfg.outputs());
  std::vector<float> context(cfg.context_size());
  for (int row = 0; row < image_n.height; ++row) {
    for (int col = 0; col < image_n.width; ++col) {
      GatherContext(image_n, row, col, taps_, context.data());
      ForwardFc(context, std::span<float>(out.pixel(row, col), cfg.outputs()));
    }
  }
  return out;
}

void GatherContext(const FeaturePlane& image_n, int row, int col,
                   std::span<const TapOffset> taps, float* out) {
  for (const TapOffset& t : taps) {
    const int r = row + t.dy;
    const int c = col + t.dx;
    if (r >= 0 && c >= 0 && c < image_n.width) {
      const float* px = image_n.pixel(r, c);
      out[0] = px[0];
      out[1] = px[1];
      out[2] = px[2];
    } else {
      out[0] = out[1] = out[2] = 0.0f;
    }
    out += 3;
  }
}

FeaturePlane ExtractPatch(const FeaturePlane& image_n, int row, int col,
                          int kernel_half) {
  const int side = 2 * kernel_half + 1;
  FeaturePlane patch(side, side, 3);
  for (int ky = 0; ky < side; ++ky) {
    for (int kx = 0; kx < side; ++kx) {
      const int r = row + ky - kernel_half;
      const int c = col + kx - kernel_half;
      if (r < 0 || c < 0 || r >= image_n.height || c >= image_n.width) continue;
      std::copy_n(image_n.pixel(r, c), 3, patch.pixel(ky, kx));
    }
  }
  return patch;
}

FeaturePlane ForwardFull(const FeaturePlane& image_n, const Weights& w) {
  return Network(w).ForwardFull(image_n);
}

std::vector<float> ForwardPatch(const FeaturePlane& patch, const Weights& w) {
  std::vector<float> out(w.config.outputs());
  Network(w).ForwardPatch(patch, out);
  return out;
}

std::vector<float> ForwardFc(std::span<const float> context, const Weights& w) {
  std::vector<float> out(w.config.outputs());
  Network(w).ForwardFc(context, out);
  return out;
}

}  // namespace lpic
