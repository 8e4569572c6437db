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

#ifndef LPIC_CODEC_H_
#define LPIC_CODEC_H_

#include <cstdint>
#include <span>
#include <vector>

#include "lpic/image.h"
#include "lpic/mixture.h"
#include "lpic/model.h"
#include "lpic/network.h"
#include "lpic/schedule.h"

namespace lpic {

inline constexpr uint8_t kContainerVersion = 1;

// Compressed image. On disk (little-endian): "LPIC", version u8, mode u8,
// K u8, distribution u8, width u32, height u32, weight fingerprint u64,
// payload length u64, payload.
struct Container {
  ScheduleMode mode = ScheduleMode::kSequential;
  uint8_t mixtures = 0;
  Distribution distribution = Distribution::kGaussian;
  uint32_t width = 0;
  uint32_t height = 0;
  uint64_t fingerprint = 0;
  std::vector<uint8_t> payload;

  bool operator==(const Container&) const = default;
};

std::vector<uint8_t> SerializeContainer(const Container& c);
Container ParseContainer(std::span<const uint8_t> bytes);

// Optional instrumentation filled by Encode/Decode.
struct CodecTrace {
  // Raw network output per pixel, indexed by flat pixel index.
  std::vector<float> raw;
  // Network evaluations: 1 for a full-image encode pass, one per schedule
  // step when decoding.
  int64_t network_passes = 0;
  // Sum of -log2 p over all coded sub-pixels under the unquantized pmfs.
  double ideal_bits = 0.0;
};

// Binds weights to the coding pipeline. Immutable after construction.
class Codec {
 public:
  explicit Codec(Weights weights);

  const Network& network() const { return net_; }
  const ModelConfig& config() const { return net_.config(); }
  uint64_t fingerprint() const { return fingerprint_; }

  // One network pass over the image (batched across pixels), then symbols
  // coded in schedule order: steps in order, raster within a step, r, g, b
  // within a pixel.
  Container Encode(const Image& img, ScheduleMode mode,
                   CodecTrace* trace = nullptr) const;

  // Throws FingerprintError when the container was made with other weights
  // and CorruptStreamError on a damaged payload.
  Image Decode(const Container& c, CodecTrace* trace = nullptr) const;

  // Mean -log2 P per sub-pixel with the contexts `mode` would use.
  double TheoreticalBpsp(const Image& img,
                         ScheduleMode mode = ScheduleMode::kSequential) const;

  // Raw parameters for every pixel as the decoder will see them.
  std::vector<float> RawParameters(const Image& img, ScheduleMode mode) const;

 private:
  Network net_;
  uint64_t fingerprint_;
};

Container Encode(const Image& img, const Weights& w, ScheduleMode mode);
Image Decode(const Container& c, const Weights& w);
double TheoreticalBpsp(const Image& img, const Weights& w,
                       ScheduleMode mode = ScheduleMode::kSequential);

// 8 * payload bytes / (3 * H * W).
double Bpsp(const Container& c);

// Context of one pixel as the decoder builds it: taps from the decoded
// plane, substituted taps from their source pixel, padding as 0.
void BuildContext(const FeaturePlane& image_n, int row, int col,
                  std::span<const TapOffset> taps,
                  std::span<const Substitution> subs, float* out);

}  // namespace lpic

#endif  // LPIC_CODEC_H_
