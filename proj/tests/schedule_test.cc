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

#include <gtest/gtest.h>

#include <set>

#include "lpic/errors.h"
#include "lpic/schedule.h"

namespace lpic {
namespace {

std::vector<int64_t> Flatten(const Schedule& s) {
  return {s.order().begin(), s.order().end()};
}

TEST(ScheduleTest, SequentialIsRasterOrder) {
  const Schedule s = SequentialSchedule(2, 2);
  EXPECT_EQ(s.num_steps(), 4u);
  const Schedule row = SequentialSchedule(1, 5);
  ASSERT_EQ(row.num_steps(), 5u);
  for (size_t t = 0; t < 5; ++t) {
    ASSERT_EQ(row.step(t).size(), 1u);
    EXPECT_EQ(row.step(t)[0], int64_t(t));
  }
  for (int d = 1; d <= 20; ++d) EXPECT_EQ(SequentialSchedule(d, d).num_steps(), size_t(d * d));
  EXPECT_TRUE(Validate(SequentialSchedule(7, 9), 2).empty());
}

TEST(ScheduleTest, WavefrontCounts) {
  EXPECT_EQ(WavefrontSchedule(4, 4, 2).num_steps(), 13u);
  EXPECT_EQ(WavefrontSchedule(512, 512, 2).num_steps(), 2045u);
  for (int d = 1; d <= 64; ++d) {
    EXPECT_EQ(WavefrontSchedule(d, d, 2).num_steps(), size_t(d + (d - 1) * 3));
    EXPECT_EQ(WavefrontSteps(d, d, 2), d + (d - 1) * 3);
  }
  EXPECT_EQ(WavefrontSchedule(3, 10, 1).num_steps(), size_t(10 + 2 * 2));
}

TEST(ScheduleTest, WavefrontStepAssignment) {
  const Schedule s = WavefrontSchedule(5, 5, 2);
  const auto idx = StepIndex(s);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) EXPECT_EQ(idx[i * 5 + j], 3 * i + j);
  }
  EXPECT_EQ(idx[1 * 5 + 0], 3);
  EXPECT_EQ(idx[0 * 5 + 3], 3);
  // Within a step, pixels are in raster order.
  const auto step3 = s.step(3);
  ASSERT_EQ(step3.size(), 2u);
  EXPECT_EQ(step3[0], 3);
  EXPECT_EQ(step3[1], 5);
}

TEST(ScheduleTest, WavefrontValidForSweep) {
  for (int h : {1, 2, 3}) {
    for (int rows = 1; rows <= 32; ++rows) {
      for (int cols = 1; cols <= 32; ++cols) {
        const Schedule s = WavefrontSchedule(rows, cols, h);
        ASSERT_TRUE(Validate(s, h).empty()) << rows << "x" << cols << " h=" << h;
        ASSERT_TRUE(s.substitutions().empty());
      }
    }
  }
}

TEST(ScheduleTest, DiagonalCounts) {
  EXPECT_EQ(DiagonalSchedule(4, 4, 2).num_steps(), 7u);
  EXPECT_EQ(DiagonalSchedule(512, 512, 2).num_steps(), 1023u);
  for (int d = 1; d <= 64; ++d) {
    EXPECT_EQ(DiagonalSchedule(d, d, 2).num_steps(), size_t(2 * d - 1));
    EXPECT_EQ(DiagonalSteps(d, d), 2 * d - 1);
  }
  EXPECT_EQ(DiagonalSchedule(3, 8, 2).num_steps(), 10u);
  EXPECT_THROW(DiagonalSchedule(4, 4, 3), UnsupportedError);
}

TEST(ScheduleTest, DiagonalInteriorSubstitutions) {
  const Schedule s = DiagonalSchedule(12, 12, 2);
  const auto idx = StepIndex(s);
  EXPECT_EQ(idx[5 * 12 + 5], 10);
  const auto taps = CausalTaps(2);
  std::set<std::pair<int, int>> unavailable;
  for (const TapOffset& t : taps) {
    const int r = 5 + t.dy, c = 5 + t.dx;
    if (idx[r * 12 + c] >= 10) unavailable.insert({r, c});
  }
  EXPECT_EQ(unavailable, (std::set<std::pair<int, int>>{{4, 6}, {4, 7}, {3, 7}}));
  const auto subs = s.substitutions_for(5 * 12 + 5);
  ASSERT_EQ(subs.size(), 3u);
  std::set<std::pair<int, int>> substituted;
  for (const Substitution& sub : subs) {
    substituted.insert({5 + taps[sub.tap].dy, 5 + taps[sub.tap].dx});
    EXPECT_EQ(sub.source, 3 * 12 + 6);  // (i-2, j+1)
  }
  EXPECT_EQ(substituted, unavailable);
}

TEST(ScheduleTest, DiagonalEdgeFallbacks) {
  // Row 1: source (i-2, j+1) is outside, so the nearest earlier available
  // tap in tap order is used: (0, j) for both row-0 taps.
  const int w = 6;
  const Schedule s = DiagonalSchedule(4, w, 2);
  const auto subs = s.substitutions_for(1 * w + 2);
  ASSERT_EQ(subs.size(), 2u);
  for (const Substitution& sub : subs) EXPECT_EQ(sub.source, 0 * w + 2);
  // Right border: only in-image undecoded taps are substituted.
  EXPECT_EQ(s.substitutions_for(3 * w + 5).size(), 0u);
  const auto near_edge = s.substitutions_for(3 * w + 4);
  ASSERT_EQ(near_edge.size(), 1u);
  EXPECT_EQ(near_edge[0].source, 1 * w + 5);
  EXPECT_EQ(s.substitutions_for(0).size(), 0u);
}

TEST(ScheduleTest, DiagonalValidForSweep) {
  for (int rows = 1; rows <= 24; ++rows) {
    for (int cols = 1; cols <= 24; ++cols) {
      ASSERT_TRUE(Validate(DiagonalSchedule(rows, cols, 2), 2).empty())
          << rows << "x" << cols;
    }
  }
}

TEST(ScheduleTest, DiagonalWithoutSubstitutionsReportsMissingTaps) {
  const int h = 10, w = 11;
  Schedule s = DiagonalSchedule(h, w, 2);
  s.clear_substitutions();
  const auto violations = Validate(s, 2);
  std::vector<int> per_pixel(h * w, 0);
  for (const Violation& v : violations) {
    ASSERT_GE(v.pixel, 0);
    ++per_pixel[v.pixel];
  }
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      int expected = 0;
      if (i >= 1 && j + 1 < w) ++expected;
      if (i >= 1 && j + 2 < w) ++expected;
      if (i >= 2 && j + 2 < w) ++expected;
      EXPECT_EQ(per_pixel[i * w + j], expected) << i << "," << j;
      if (i >= 2 && j + 2 < w) {
        EXPECT_EQ(per_pixel[i * w + j], 3);
      }
    }
  }
}

TEST(ScheduleTest, EveryPixelExactlyOnceInAllModes) {
  for (ScheduleMode mode :
       {ScheduleMode::kSequential, ScheduleMode::kWavefront, ScheduleMode::kDiagonal}) {
    const Schedule s = MakeSchedule(mode, 9, 14, 2);
    std::vector<int64_t> flat = Flatten(s);
    std::sort(flat.begin(), flat.end());
    ASSERT_EQ(flat.size(), size_t(9 * 14));
    for (size_t p = 0; p < flat.size(); ++p) EXPECT_EQ(flat[p], int64_t(p));
    for (size_t t = 0; t < s.num_steps(); ++t) {
      const auto step = s.step(t);
      EXPECT_TRUE(std::is_sorted(step.begin(), step.end()));
    }
  }
}

TEST(ScheduleTest, ValidateCatchesBrokenOrders) {
  // Two pixels in swapped steps on a 1x2 image: pixel 1 reads pixel 0 first.
  Schedule swapped(ScheduleMode::kSequential, 1, 2, 2, {0, 1, 2}, {1, 0}, {});
  EXPECT_FALSE(Validate(swapped, 2).empty());
  Schedule missing(ScheduleMode::kSequential, 1, 2, 2, {0, 1}, {0}, {});
  EXPECT_FALSE(Validate(missing, 2).empty());
  Schedule duplicate(ScheduleMode::kSequential, 1, 2, 2, {0, 1, 2, 3}, {0, 1, 1}, {});
  EXPECT_FALSE(Validate(duplicate, 2).empty());
  Schedule unsorted(ScheduleMode::kWavefront, 2, 1, 2, {0, 2}, {1, 0}, {});
  EXPECT_FALSE(Validate(unsorted, 2).empty());
}

TEST(ScheduleTest, ModeNamesRoundTrip) {
  for (ScheduleMode mode :
       {ScheduleMode::kSequential, ScheduleMode::kWavefront, ScheduleMode::kDiagonal}) {
    EXPECT_EQ(ParseMode(ModeName(mode)), mode);
  }
  EXPECT_EQ(ParseMode("seq"), ScheduleMode::kSequential);
  EXPECT_EQ(ParseMode("wave"), ScheduleMode::kWavefront);
  EXPECT_EQ(ParseMode("diag"), ScheduleMode::kDiagonal);
  EXPECT_THROW(ParseMode("zigzag"), Error);
}

}  // namespace
}  // namespace lpic
