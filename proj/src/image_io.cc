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

#include "lpic/image_io.h"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <iostream>

#include "lpic/byte_io.h"
#include "lpic/errors.h"

namespace lpic {

namespace {

class PpmTokenizer {
 public:
  explicit PpmTokenizer(std::span<const uint8_t> b) : b_(b) {}

  // Next whitespace-delimited header integer, skipping '#' comments.
  int Int() {
    SkipSpace();
    if (pos_ >= b_.size() || !std::isdigit(b_[pos_])) {
      throw FormatError("PPM: malformed header");
    }
    long v = 0;
    while (pos_ < b_.size() && std::isdigit(b_[pos_])) {
      v = v * 10 + (b_[pos_++] - '0');
      if (v > (1 << 24)) throw FormatError("PPM: header value too large");
    }
    return int(v);
  }
  // Exactly one whitespace byte separates maxval from the raster.
  size_t RasterStart() {
    if (pos_ >= b_.size() || !std::isspace(b_[pos_])) {
      throw FormatError("PPM: malformed header");
    }
    return pos_ + 1;
  }
  size_t pos_ = 2;

 private:
  void SkipSpace() {
    while (pos_ < b_.size()) {
      if (std::isspace(b_[pos_])) {
        ++pos_;
      } else if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }
  std::span<const uint8_t> b_;
};

struct PngReadState {
  std::span<const uint8_t> data;
  size_t pos = 0;
};

void PngRead(png_structp png, png_bytep out, png_size_t n) {
  auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (st->data.size() - st->pos < n) png_error(png, "PNG: truncated file");
  std::memcpy(out, st->data.data() + st->pos, n);
  st->pos += n;
}

void PngWrite(png_structp png, png_bytep in, png_size_t n) {
  auto* out = static_cast<std::vector<uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), in, in + n);
}

void PngFlush(png_structp) {}

[[noreturn]] void PngError(png_structp, png_const_charp msg) { throw FormatError(msg); }
void PngWarning(png_structp, png_const_charp) {}

}  // namespace

Image DecodePpm(std::span<const uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') throw FormatError("PPM: bad magic");
  if (bytes[1] != '6') throw UnsupportedError("PPM: only binary P6 is supported");
  PpmTokenizer tok(bytes);
  const int width = tok.Int();
  const int height = tok.Int();
  const int maxval = tok.Int();
  if (width < 1 || height < 1) throw FormatError("PPM: empty image");
  if (maxval != 255) throw UnsupportedError("PPM: only maxval 255 is supported");
  const size_t start = tok.RasterStart();
  Image img(height, width);
  if (bytes.size() - start < img.pixels.size()) throw FormatError("PPM: truncated raster");
  std::copy_n(bytes.data() + start, img.pixels.size(), img.pixels.data());
  return img;
}

std::vector<uint8_t> EncodePpm(const Image& img) {
  if (!IsWellFormed(img)) throw DimensionError("cannot write malformed image");
  const std::string header = "P6\n" + std::to_string(img.width) + " " +
                             std::to_string(img.height) + "\n255\n";
  std::vector<uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  return out;
}

Image DecodePng(std::span<const uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw FormatError("PNG: bad signature");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                           PngError, PngWarning);
  if (png == nullptr) throw Error("PNG: out of memory");
  png_infop info = png_create_info_struct(png);
  PngReadState st{bytes, 0};
  Image img;
  try {
    png_set_read_fn(png, &st, PngRead);
    png_read_info(png, info);
    const int depth = png_get_bit_depth(png, info);
    const int type = png_get_color_type(png, info);
    if (type == PNG_COLOR_TYPE_PALETTE) {
      png_set_palette_to_rgb(png);
    } else {
      if (depth != 8) {
        throw UnsupportedError("PNG: unsupported bit depth " + std::to_string(depth));
      }
      if (type != PNG_COLOR_TYPE_RGB && type != PNG_COLOR_TYPE_RGB_ALPHA) {
        throw UnsupportedError("PNG: unsupported colour type (need RGB)");
      }
    }
    if (type & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS)) {
      std::cerr << "warning: PNG alpha channel dropped\n";
      png_set_strip_alpha(png);
    }
    png_set_interlace_handling(png);
    png_read_update_info(png, info);
    if (png_get_channels(png, info) != 3 || png_get_bit_depth(png, info) != 8) {
      throw UnsupportedError("PNG: cannot convert to 8-bit RGB");
    }
    const int width = int(png_get_image_width(png, info));
    const int height = int(png_get_image_height(png, info));
    img = Image(height, width);
    std::vector<png_bytep> rows(height);
    for (int r = 0; r < height; ++r) rows[r] = img.pixels.data() + size_t(r) * width * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  } catch (...) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw;
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

std::vector<uint8_t> EncodePng(const Image& img) {
  if (!IsWellFormed(img)) throw DimensionError("cannot write malformed image");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                            PngError, PngWarning);
  if (png == nullptr) throw Error("PNG: out of memory");
  png_infop info = png_create_info_struct(png);
  std::vector<uint8_t> out;
  try {
    png_set_write_fn(png, &out, PngWrite, PngFlush);
    png_set_IHDR(png, info, uint32_t(img.width), uint32_t(img.height), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int r = 0; r < img.height; ++r) {
      png_write_row(png, img.pixels.data() + size_t(r) * img.width * 3);
    }
    png_write_end(png, nullptr);
  } catch (...) {
    png_destroy_write_struct(&png, &info);
    throw;
  }
  png_destroy_write_struct(&png, &info);
  return out;
}

Image LoadImage(const std::string& path) {
  const std::vector<uint8_t> bytes = ReadFileBytes(path);
  if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0) return DecodePng(bytes);
  if (bytes.size() >= 2 && bytes[0] == 'P') return DecodePpm(bytes);
  throw UnsupportedError("'" + path + "' is neither PPM nor PNG");
}

void SaveImage(const std::string& path, const Image& img) {
  std::string lower = path;
  std::transform(lower.begin(), lower.end(), lower.begin(), ::tolower);
  const bool png = lower.size() >= 4 && lower.compare(lower.size() - 4, 4, ".png") == 0;
  WriteFileBytes(path, png ? EncodePng(img) : EncodePpm(img));
}

}  // namespace lpic
