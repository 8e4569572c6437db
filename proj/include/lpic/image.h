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

#ifndef LPIC_IMAGE_H_
#define LPIC_IMAGE_H_

#include <cstddef>
#include <cstdint>
#include <vector>

namespace lpic {

// Dense 8-bit RGB image, interleaved row-major (r, g, b per pixel).
struct Image {
  int height = 0;
  int width = 0;
  std::vector<uint8_t> pixels;

  Image() = default;
  Image(int h, int w) : height(h), width(w), pixels(size_t(h) * w * 3, 0) {}

  size_t num_pixels() const { return size_t(height) * width; }
  uint8_t& at(int row, int col, int ch) {
    return pixels[(size_t(row) * width + col) * 3 + ch];
  }
  uint8_t at(int row, int col, int ch) const {
    return pixels[(size_t(row) * width + col) * 3 + ch];
  }
  bool operator==(const Image& other) const = default;
};

// Float plane, interleaved row-major. Used for normalized images and for the
// network's raw parameter output.
struct FeaturePlane {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<float> values;

  FeaturePlane() = default;
  FeaturePlane(int h, int w, int c)
      : height(h), width(w), channels(c), values(size_t(h) * w * c, 0.0f) {}

  float* pixel(int row, int col) {
    return values.data() + (size_t(row) * width + col) * channels;
  }
  const float* pixel(int row, int col) const {
    return values.data() + (size_t(row) * width + col) * channels;
  }
};

// Checks that every pixel of an image is present and the buffer is dense.
bool IsWellFormed(const Image& img);

}  // namespace lpic

#endif  // LPIC_IMAGE_H_
