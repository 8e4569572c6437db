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

#ifndef LPIC_NETWORK_H_
#define LPIC_NETWORK_H_

#include <cstddef>
#include <span>
#include <vector>

#include "lpic/image.h"
#include "lpic/model.h"

namespace lpic {

// Inference engine over immutable weights. Safe for concurrent use.
//
// Every evaluation path accumulates each output as
//   acc = 0; for tap, for channel: acc += w * x; acc += bias
// in 32-bit floats, in canonical tap order. The batched kernels vectorize
// across outputs and parallelize across pixels, which leaves that per-output
// order intact, so all paths agree bit for bit.
class Network {
 public:
  explicit Network(Weights weights);

  const ModelConfig& config() const { return weights_.config; }
  const Weights& weights() const { return weights_; }
  const std::vector<TapOffset>& taps() const { return taps_; }

  // Fully-connected view: the flattened causal context in tap order.
  void ForwardFc(std::span<const float> context, std::span<float> out) const;

  // (2h+1)x(2h+1)x3 patch centred on the pixel; center and later positions
  // are never read.
  void ForwardPatch(const FeaturePlane& patch, std::span<float> out) const;

  // n contexts laid out back to back; out receives n * outputs() values.
  // Parallel over pixel blocks.
  void EvaluateContexts(std::span<const float> contexts, size_t n,
                        std::span<float> out) const;
  // Single-threaded variant of EvaluateContexts with identical results.
  void EvaluateContextsSerial(std::span<const float> contexts, size_t n,
                              std::span<float> out) const;

  // One pass over a normalized image; output is H x W x outputs().
  FeaturePlane ForwardFull(const FeaturePlane& image_n) const;
  // Reference implementation: ForwardFc at every pixel, one at a time.
  FeaturePlane ForwardFullSerial(const FeaturePlane& image_n) const;

 private:
  void EvaluateBlock(const float* contexts, size_t n, float* out,
                     std::vector<float>& scratch) const;

  Weights weights_;
  std::vector<TapOffset> taps_;
  // Per layer, weights transposed to [in][out].
  std::vector<std::vector<float>> transposed_;
};

// Causal context of (row, col) in tap order; out-of-image taps read 0.
void GatherContext(const FeaturePlane& image_n, int row, int col,
                   std::span<const TapOffset> taps, float* out);

// Zero-padded (2h+1)x(2h+1) patch centred on (row, col).
FeaturePlane ExtractPatch(const FeaturePlane& image_n, int row, int col,
                          int kernel_half);

FeaturePlane ForwardFull(const FeaturePlane& image_n, const Weights& w);
std::vector<float> ForwardPatch(const FeaturePlane& patch, const Weights& w);
std::vector<float> ForwardFc(std::span<const float> context, const Weights& w);

}  // namespace lpic

#endif  // LPIC_NETWORK_H_
