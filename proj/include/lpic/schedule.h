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

#ifndef LPIC_SCHEDULE_H_
#define LPIC_SCHEDULE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lpic/model.h"

namespace lpic {

enum class ScheduleMode : uint8_t {
  kSequential = 0,
  kWavefront = 1,
  kDiagonal = 2,
};

const char* ModeName(ScheduleMode mode);
// Accepts "seq", "wave", "diag" and the full names.
ScheduleMode ParseMode(const std::string& name);

// A causal tap of `pixel` that is read from `source` instead of its own
// position. source == -1 means padding (0 in the normalized domain).
struct Substitution {
  int64_t pixel;
  int tap;
  int64_t source;
};

// Decoding order: steps of co-decodable pixels, each step in raster order.
// Pixels are flat indices row * width + col.
class Schedule {
 public:
  Schedule(ScheduleMode mode, int height, int width, int kernel_half,
           std::vector<int64_t> step_offsets, std::vector<int64_t> pixels,
           std::vector<Substitution> substitutions);

  ScheduleMode mode() const { return mode_; }
  int height() const { return height_; }
  int width() const { return width_; }
  int kernel_half() const { return kernel_half_; }

  size_t num_steps() const { return step_offsets_.size() - 1; }
  std::span<const int64_t> step(size_t s) const {
    return {pixels_.data() + step_offsets_[s],
            size_t(step_offsets_[s + 1] - step_offsets_[s])};
  }
  // Pixels in coding order (steps concatenated).
  std::span<const int64_t> order() const { return pixels_; }

  std::span<const Substitution> substitutions() const { return subs_; }
  // Substitutions of one pixel, sorted by tap.
  std::span<const Substitution> substitutions_for(int64_t pixel) const;
  void clear_substitutions();

 private:
  ScheduleMode mode_;
  int height_;
  int width_;
  int kernel_half_;
  std::vector<int64_t> step_offsets_;
  std::vector<int64_t> pixels_;
  std::vector<Substitution> subs_;  // sorted by (pixel, tap)
  std::vector<int64_t> sub_offsets_;  // per pixel, into subs_
};

// One pixel per step, raster order.
Schedule SequentialSchedule(int height, int width);

// Pixel (i, j) at step (h + 1) * i + j; W + (H - 1)(h + 1) steps.
Schedule WavefrontSchedule(int height, int width, int kernel_half);

// Pixel (i, j) at step i + j; H + W - 1 steps. Only h = 2 is supported.
// Taps (i-1, j+1), (i-1, j+2), (i-2, j+2) are not decoded yet and are read
// from (i-2, j+1); when that lies outside the image the closest earlier
// available tap in tap order is used, else padding.
Schedule DiagonalSchedule(int height, int width, int kernel_half);

Schedule MakeSchedule(ScheduleMode mode, int height, int width,
                      int kernel_half);

// Step index of every pixel.
std::vector<int64_t> StepIndex(const Schedule& s);

// Closed-form step counts.
int64_t WavefrontSteps(int height, int width, int kernel_half);
int64_t DiagonalSteps(int height, int width);

struct Violation {
  int64_t pixel;   // -1 for whole-schedule problems
  int tap;         // -1 when not tap related
  std::string message;
};

// Empty on success.
std::vector<Violation> Validate(const Schedule& s, int kernel_half);

}  // namespace lpic

#endif  // LPIC_SCHEDULE_H_
