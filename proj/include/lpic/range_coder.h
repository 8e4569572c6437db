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

#ifndef LPIC_RANGE_CODER_H_
#define LPIC_RANGE_CODER_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lpic/mixture.h"

namespace lpic {

// 32-bit range coder with byte renormalization and a 64-bit low register for
// carry propagation (cache + run of 0xFF bytes). Frequencies are 16-bit; the
// symbol whose interval ends at the total takes the rounding slack.
class RangeEncoder {
 public:
  RangeEncoder() = default;

  void Encode(uint32_t cum_low, uint32_t cum_high);
  void EncodeSymbol(int sym, const QuantizedCdf& cdf) {
    Encode(cdf.low(sym), cdf.high(sym));
  }

  // Flushes the coder state and returns the stream. The encoder must not be
  // used afterwards.
  std::vector<uint8_t> Finish();

 private:
  void ShiftLow();

  uint64_t low_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  uint8_t cache_ = 0;
  uint64_t cache_size_ = 1;
  bool leading_ = true;  // the first emitted byte is always zero; dropped
  std::vector<uint8_t> out_;
};

class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const uint8_t> stream);

  // Throws CorruptStreamError when the stream runs out or is inconsistent.
  int DecodeSymbol(const QuantizedCdf& cdf);

  size_t bytes_consumed() const { return pos_; }

 private:
  uint8_t NextByte();

  std::span<const uint8_t> stream_;
  size_t pos_ = 0;
  uint32_t code_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
};

// Probabilities below this count as this; the training loss uses the same
// floor, and it lies far below the smallest quantized mass 2^-16.
inline constexpr double kProbabilityFloor = 1e-12;

// Ideal code length of sym under pmf, in bits.
double RateOf(const Pmf& pmf, int sym);
// Ideal code length under a quantized table.
double RateOf(const QuantizedCdf& cdf, int sym);

}  // namespace lpic

#endif  // LPIC_RANGE_CODER_H_
