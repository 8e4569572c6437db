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

#ifndef LPIC_BYTE_IO_H_
#define LPIC_BYTE_IO_H_

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "lpic/errors.h"

namespace lpic {

// 64-bit FNV-1a.
uint64_t Fnv1a64(std::span<const uint8_t> bytes);

// Little-endian append-only writer.
class ByteWriter {
 public:
  void U8(uint8_t v) { buf_.push_back(v); }
  void U32(uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(uint8_t(v >> (8 * i)));
  }
  void U64(uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(uint8_t(v >> (8 * i)));
  }
  void F32(float f) {
    uint32_t bits;
    std::memcpy(&bits, &f, 4);
    U32(bits);
  }
  void Bytes(std::span<const uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  void Tag(const char (&tag)[5]) {
    for (int i = 0; i < 4; ++i) buf_.push_back(uint8_t(tag[i]));
  }

  const std::vector<uint8_t>& bytes() const { return buf_; }
  std::vector<uint8_t> Take() { return std::move(buf_); }

 private:
  std::vector<uint8_t> buf_;
};

// Bounds-checked little-endian reader; throws FormatError on truncation.
class ByteReader {
 public:
  ByteReader(std::span<const uint8_t> data, std::string what)
      : data_(data), what_(std::move(what)) {}

  uint8_t U8() { return Need(1)[0]; }
  uint32_t U32() {
    const uint8_t* p = Need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(p[i]) << (8 * i);
    return v;
  }
  uint64_t U64() {
    const uint8_t* p = Need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(p[i]) << (8 * i);
    return v;
  }
  float F32() {
    const uint32_t bits = U32();
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
  }
  std::span<const uint8_t> Bytes(size_t n) { return {Need(n), n}; }
  void ExpectTag(const char (&tag)[5]) {
    const uint8_t* p = Need(4);
    if (std::memcmp(p, tag, 4) != 0) {
      throw FormatError(what_ + ": bad magic, expected '" + std::string(tag) + "'");
    }
  }

  size_t position() const { return pos_; }
  size_t remaining() const { return data_.size() - pos_; }

 private:
  const uint8_t* Need(size_t n) {
    if (remaining() < n) throw FormatError(what_ + ": truncated");
    const uint8_t* p = data_.data() + pos_;
    pos_ += n;
    return p;
  }

  std::span<const uint8_t> data_;
  std::string what_;
  size_t pos_ = 0;
};

std::vector<uint8_t> ReadFileBytes(const std::string& path);
void WriteFileBytes(const std::string& path, std::span<const uint8_t> bytes);

}  // namespace lpic

#endif  // LPIC_BYTE_IO_H_
