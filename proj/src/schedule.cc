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

#include "lpic/schedule.h"

#include <algorithm>

#include "lpic/errors.h"

namespace lpic {

namespace {

void CheckDims(int height, int width) {
  if (height < 1 || width < 1) {
    throw DimensionError("schedule dimensions must be positive");
  }
}

// Buckets pixels by step; raster traversal keeps each bucket in raster order.
Schedule FromStepFunction(ScheduleMode mode, int height, int width,
                          int kernel_half, int64_t num_steps,
                          const std::vector<int64_t>& step_of,
                          std::vector<Substitution> subs) {
  std::vector<int64_t> offsets(num_steps + 1, 0);
  for (int64_t s : step_of) ++offsets[s + 1];
  for (int64_t s = 0; s < num_steps; ++s) offsets[s + 1] += offsets[s];
  std::vector<int64_t> pixels(step_of.size());
  std::vector<int64_t> fill(offsets.begin(), offsets.end() - 1);
  for (int64_t p = 0; p < int64_t(step_of.size()); ++p) {
    pixels[fill[step_of[p]]++] = p;
  }
  return Schedule(mode, height, width, kernel_half, std::move(offsets),
                  std::move(pixels), std::move(subs));
}

}  // namespace

const char* ModeName(ScheduleMode mode) {
  switch (mode) {
    case ScheduleMode::kSequential:
      return "sequential";
    case ScheduleMode::kWavefront:
      return "wavefront";
    case ScheduleMode::kDiagonal:
      return "diagonal";
  }
  return "unknown";
}

ScheduleMode ParseMode(const std::string& name) {
  if (name == "seq" || name == "sequential") return ScheduleMode::kSequential;
  if (name == "wave" || name == "wavefront") return ScheduleMode::kWavefront;
  if (name == "diag" || name == "diagonal") return ScheduleMode::kDiagonal;
  throw UnsupportedError("unknown schedule mode '" + name + "'");
}

Schedule::Schedule(ScheduleMode mode, int height, int width, int kernel_half,
                   std::vector<int64_t> step_offsets,
                   std::vector<int64_t> pixels,
                   std::vector<Substitution> substitutions)
    : mode_(mode),
      height_(height),
      width_(width),
      kernel_half_(kernel_half),
      step_offsets_(std::move(step_offsets)),
      pixels_(std::move(pixels)),
      subs_(std::move(substitutions)) {
  std::sort(subs_.begin(), subs_.end(),
            [](const Substitution& a, const Substitution& b) {
              return a.pixel != b.pixel ? a.pixel < b.pixel : a.tap < b.tap;
            });
  sub_offsets_.assign(size_t(height_) * width_ + 1, 0);
  for (const Substitution& s : subs_) ++sub_offsets_[s.pixel + 1];
  for (size_t p = 0; p + 1 < sub_offsets_.size(); ++p) {
    sub_offsets_[p + 1] += sub_offsets_[p];
  }
}

std::span<const Substitution> Schedule::substitutions_for(int64_t pixel) const {
  return {subs_.data() + sub_offsets_[pixel],
          size_t(sub_offsets_[pixel + 1] - sub_offsets_[pixel])};
}

void Schedule::clear_substitutions() {
  subs_.clear();
  std::fill(sub_offsets_.begin(), sub_offsets_.end(), 0);
}

Schedule SequentialSchedule(int height, int width) {
  CheckDims(height, width);
  const int64_t n = int64_t(height) * width;
  std::vector<int64_t> step_of(n);
  for (int64_t p = 0; p < n; ++p) step_of[p] = p;
  return FromStepFunction(ScheduleMode::kSequential, height, width, 0, n,
                          step_of, {});
}

int64_t WavefrontSteps(int height, int width, int kernel_half) {
  return int64_t(width) + int64_t(height - 1) * (kernel_half + 1);
}

int64_t DiagonalSteps(int height, int width) {
  return int64_t(height) + width - 1;
}

Schedule WavefrontSchedule(int height, int width, int kernel_half) {
  CheckDims(height, width);
  if (kernel_half < 1) throw DimensionError("kernel_half must be >= 1");
  std::vector<int64_t> step_of(size_t(height) * width);
  for (int i = 0; i < height; ++i) {
    for (int j = 0; j < width; ++j) {
      step_of[size_t(i) * width + j] = int64_t(kernel_half + 1) * i + j;
    }
  }
  return FromStepFunction(ScheduleMode::kWavefront, height, width, kernel_half,
                          WavefrontSteps(height, width, kernel_half), step_of,
                          {});
}

Schedule DiagonalSchedule(int height, int width, int kernel_half) {
  CheckDims(height, width);
  if (kernel_half != 2) {
    throw UnsupportedError("diagonal decoding is defined for the 5x5 kernel only");
  }
  const std::vector<TapOffset> taps = CausalTaps(kernel_half);
  std::vector<int64_t> step_of(size_t(height) * width);
  for (int i = 0; i < height; ++i) {
    for (int j = 0; j < width; ++j) step_of[size_t(i) * width + j] = i + j;
  }
  auto in_bounds = [&](int r, int c) {
    return r >= 0 && c >= 0 && r < height && c < width;
  };
  std::vector<Substitution> subs;
  for (int i = 0; i < height; ++i) {
    for (int j = 0; j < width; ++j) {
      const int64_t pixel = int64_t(i) * width + j;
      const int64_t step = i + j;
      auto available = [&](int t) {
        const int r = i + taps[t].dy, c = j + taps[t].dx;
        return in_bounds(r, c) && r + c < step;
      };
      for (int t = 0; t < int(taps.size()); ++t) {
        const int r = i + taps[t].dy, c = j + taps[t].dx;
        if (!in_bounds(r, c) || r + c < step) continue;
        int64_t source = -1;
        if (in_bounds(i - 2, j + 1)) {
          source = int64_t(i - 2) * width + (j + 1);
        } else {
          for (int q = t - 1; q >= 0; --q) {
            if (available(q)) {
              source = int64_t(i + taps[q].dy) * width + (j + taps[q].dx);
              break;
            }
          }
        }
        subs.push_back({pixel, t, source});
      }
    }
  }
  return FromStepFunction(ScheduleMode::kDiagonal, height, width, kernel_half,
                          DiagonalSteps(height, width), step_of,
                          std::move(subs));
}

Schedule MakeSchedule(ScheduleMode mode, int height, int width,
                      int kernel_half) {
  switch (mode) {
    case ScheduleMode::kSequential:
      return SequentialSchedule(height, width);
    case ScheduleMode::kWavefront:
      return WavefrontSchedule(height, width, kernel_half);
    case ScheduleMode::kDiagonal:
      return DiagonalSchedule(height, width, kernel_half);
  }
  throw UnsupportedError("unknown schedule mode");
}

std::vector<int64_t> StepIndex(const Schedule& s) {
  std::vector<int64_t> index(size_t(s.height()) * s.width(), -1);
  for (size_t st = 0; st < s.num_steps(); ++st) {
    for (int64_t p : s.step(st)) {
      if (p >= 0 && p < int64_t(index.size())) index[p] = int64_t(st);
    }
  }
  return index;
}

std::vector<Violation> Validate(const Schedule& s, int kernel_half) {
  std::vector<Violation> out;
  const int height = s.height(), width = s.width();
  const int64_t n = int64_t(height) * width;
  std::vector<int64_t> step_of(n, -1);
  for (size_t st = 0; st < s.num_steps(); ++st) {
    int64_t prev = -1;
    for (int64_t p : s.step(st)) {
      if (p < 0 || p >= n) {
        out.push_back({p, -1, "pixel index out of range"});
        continue;
      }
      if (step_of[p] != -1) out.push_back({p, -1, "pixel appears in two steps"});
      step_of[p] = int64_t(st);
      if (p <= prev) out.push_back({p, -1, "step is not in raster order"});
      prev = p;
    }
  }
  for (int64_t p = 0; p < n; ++p) {
    if (step_of[p] == -1) out.push_back({p, -1, "pixel missing from schedule"});
  }
  if (!out.empty()) return out;

  const std::vector<TapOffset> taps = CausalTaps(kernel_half);
  for (int i = 0; i < height; ++i) {
    for (int j = 0; j < width; ++j) {
      const int64_t p = int64_t(i) * width + j;
      const auto subs = s.substitutions_for(p);
      for (int t = 0; t < int(taps.size()); ++t) {
        const int r = i + taps[t].dy, c = j + taps[t].dx;
        if (r < 0 || c < 0 || r >= height || c >= width) continue;
        const int64_t q = int64_t(r) * width + c;
        if (step_of[q] < step_of[p]) continue;
        auto it = std::find_if(subs.begin(), subs.end(),
                               [t](const Substitution& x) { return x.tap == t; });
        if (it == subs.end()) {
          out.push_back({p, t, "tap not decoded and not substituted"});
        } else if (it->source >= 0 && step_of[it->source] >= step_of[p]) {
          out.push_back({p, t, "substitution source not decoded yet"});
        }
      }
    }
  }
  return out;
}

}  // namespace lpic
