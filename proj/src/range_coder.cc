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

#include "lpic/range_coder.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lpic/errors.h"

namespace lpic {

namespace {
constexpr uint32_t kTop = 1u << 24;
}  // namespace

void RangeEncoder::Encode(uint32_t cum_low, uint32_t cum_high) {
  const uint32_t r = range_ >> kCdfBits;
  low_ += uint64_t(r) * cum_low;
  if (cum_high == kCdfTotal) {
    range_ -= r * cum_low;
  } else {
    range_ = r * (cum_high - cum_low);
  }
  while (range_ < kTop) {
    range_ <<= 8;
    ShiftLow();
  }
}

void RangeEncoder::ShiftLow() {
  if (uint32_t(low_) < 0xFF000000u || (low_ >> 32) != 0) {
    const uint8_t carry = uint8_t(low_ >> 32);
    uint8_t temp = cache_;
    do {
      if (leading_) {
        leading_ = false;
      } else {
        out_.push_back(uint8_t(temp + carry));
      }
      temp = 0xFF;
    } while (--cache_size_ != 0);
    cache_ = uint8_t(low_ >> 24);
  }
  ++cache_size_;
  low_ = (low_ & 0x00FFFFFFu) << 8;
}

std::vector<uint8_t> RangeEncoder::Finish() {
  for (int i = 0; i < 5; ++i) ShiftLow();
  return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const uint8_t> stream) : stream_(stream) {
  for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | NextByte();
}

uint8_t RangeDecoder::NextByte() {
  if (pos_ >= stream_.size()) {
    throw CorruptStreamError("range decoder ran past the end of the stream");
  }
  return stream_[pos_++];
}

int RangeDecoder::DecodeSymbol(const QuantizedCdf& cdf) {
  const uint32_t r = range_ >> kCdfBits;
  uint32_t value = code_ / r;
  if (value >= kCdfTotal) value = kCdfTotal - 1;
  // Largest sym with cumulative[sym] <= value.
  int lo = 0, hi = 256;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (cdf.cumulative[mid] <= value) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const int sym = lo;
  const uint32_t offset = r * cdf.low(sym);
  if (offset > code_) throw CorruptStreamError("inconsistent range state");
  code_ -= offset;
  if (cdf.high(sym) == kCdfTotal) {
    range_ -= offset;
  } else {
    range_ = r * cdf.mass(sym);
  }
  if (code_ >= range_) throw CorruptStreamError("code value outside range");
  while (range_ < kTop) {
    range_ <<= 8;
    code_ = (code_ << 8) | NextByte();
  }
  return sym;
}

double RateOf(const Pmf& pmf, int sym) {
  return -std::log2(std::max(pmf[sym], kProbabilityFloor));
}

double RateOf(const QuantizedCdf& cdf, int sym) {
  return double(kCdfBits) - std::log2(double(cdf.mass(sym)));
}

}  // namespace lpic
