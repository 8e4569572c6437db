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

#ifndef LPIC_WEIGHTS_IO_H_
#define LPIC_WEIGHTS_IO_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lpic/model.h"

namespace lpic {

inline constexpr uint8_t kWeightFormatVersion = 1;

// Layout: "LPWT", version u8, K u8, C u8, L u8, h u8, distribution u8, then
// every layer's kernel (row-major out x in) followed by its bias as
// little-endian f32, then the FNV-1a 64 of all preceding bytes.
std::vector<uint8_t> SerializeWeights(const Weights& w);

// Throws FormatError on bad magic, version, truncation, trailing data or a
// fingerprint mismatch.
Weights ParseWeights(std::span<const uint8_t> bytes);

void SaveWeights(const std::string& path, const Weights& w);
Weights LoadWeights(const std::string& path);

// The trailing fingerprint SerializeWeights would write.
uint64_t WeightFingerprint(const Weights& w);

}  // namespace lpic

#endif  // LPIC_WEIGHTS_IO_H_
