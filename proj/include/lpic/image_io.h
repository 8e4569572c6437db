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

#ifndef LPIC_IMAGE_IO_H_
#define LPIC_IMAGE_IO_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lpic/image.h"

namespace lpic {

// Binary PPM (P6, maxval 255).
Image DecodePpm(std::span<const uint8_t> bytes);
std::vector<uint8_t> EncodePpm(const Image& img);

// 8-bit RGB or RGBA PNG (alpha is dropped with a warning on stderr; palette
// images are expanded). Other depths and colour types are rejected.
Image DecodePng(std::span<const uint8_t> bytes);
std::vector<uint8_t> EncodePng(const Image& img);

// Picks the format from the file signature.
Image LoadImage(const std::string& path);
// Picks the format from the extension (.png, otherwise PPM).
void SaveImage(const std::string& path, const Image& img);

}  // namespace lpic

#endif  // LPIC_IMAGE_IO_H_
