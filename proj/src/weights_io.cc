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

#include "lpic/weights_io.h"

#include <string>

#include "lpic/byte_io.h"
#include "lpic/errors.h"

namespace lpic {

std::vector<uint8_t> SerializeWeights(const Weights& w) {
  ValidateWeights(w);
  const ModelConfig& cfg = w.config;
  ByteWriter out;
  out.Tag("LPWT");
  out.U8(kWeightFormatVersion);
  out.U8(uint8_t(cfg.mixtures));
  out.U8(uint8_t(cfg.filters));
  out.U8(uint8_t(cfg.layers));
  out.U8(uint8_t(cfg.kernel_half));
  out.U8(uint8_t(cfg.distribution));
  for (const DenseLayer& l : w.layers) {
    for (float v : l.weights) out.F32(v);
    for (float v : l.bias) out.F32(v);
  }
  out.U64(Fnv1a64(out.bytes()));
  return out.Take();
}

Weights ParseWeights(std::span<const uint8_t> bytes) {
  ByteReader in(bytes, "weight file");
  in.ExpectTag("LPWT");
  const uint8_t version = in.U8();
  if (version != kWeightFormatVersion) {
    throw FormatError("weight file: unsupported version " + std::to_string(version));
  }
  ModelConfig cfg;
  cfg.mixtures = in.U8();
  cfg.filters = in.U8();
  cfg.layers = in.U8();
  cfg.kernel_half = in.U8();
  const uint8_t dist = in.U8();
  if (dist > 1) throw FormatError("weight file: unknown distribution " + std::to_string(dist));
  cfg.distribution = Distribution(dist);
  try {
    ValidateConfig(cfg);
  } catch (const DimensionError& e) {
    throw FormatError(std::string("weight file: ") + e.what());
  }
  Weights w = ZeroWeights(cfg);
  for (DenseLayer& l : w.layers) {
    for (float& v : l.weights) v = in.F32();
    for (float& v : l.bias) v = in.F32();
  }
  const size_t payload_end = in.position();
  const uint64_t stored = in.U64();
  if (in.remaining() != 0) throw FormatError("weight file: trailing bytes");
  if (Fnv1a64(bytes.first(payload_end)) != stored) {
    throw FingerprintError("weight file: fingerprint mismatch (file is corrupt)");
  }
  return w;
}

void SaveWeights(const std::string& path, const Weights& w) {
  WriteFileBytes(path, SerializeWeights(w));
}

Weights LoadWeights(const std::string& path) {
  return ParseWeights(ReadFileBytes(path));
}

uint64_t WeightFingerprint(const Weights& w) {
  const std::vector<uint8_t> bytes = SerializeWeights(w);
  return Fnv1a64(std::span<const uint8_t>(bytes).first(bytes.size() - 8));
}

}  // namespace lpic
