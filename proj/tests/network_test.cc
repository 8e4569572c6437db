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

#include <cstring>
#include <random>

#include "lpic/network.h"
#include "lpic/parallel.h"
#include "lpic/tools.h"

namespace lpic {
namespace {

ModelConfig Small(int k = 2, int c = 16, int l = 4) {
  ModelConfig cfg = ReferenceConfig();
  cfg.mixtures = k;
  cfg.filters = c;
  cfg.layers = l;
  return cfg;
}

bool BitEqual(const float* a, const float* b, size_t n) {
  return std::memcmp(a, b, n * sizeof(float)) == 0;
}

// Double-precision masked convolution written from the kernel geometry: each
// first-layer weight is looked up by its (dy, dx, channel) position.
std::vector<double> OracleForward(const Weights& w, const FeaturePlane& x, int row,
                                  int col) {
  const int h = w.config.kernel_half;
  const DenseLayer& first = w.layers[0];
  std::vector<double> act(first.out);
  for (int o = 0; o < first.out; ++o) {
    double acc = first.bias[o];
    int tap = 0;
    for (int dy = -h; dy <= 0; ++dy) {
      for (int dx = -h; dx <= h; ++dx) {
        if (dy == 0 && dx >= 0) break;
        for (int ch = 0; ch < 3; ++ch) {
          const int r = row + dy, c = col + dx;
          const bool in = r >= 0 && c >= 0 && c < x.width;
          acc += first.w(o, tap * 3 + ch) * (in ? double(x.pixel(r, c)[ch]) : 0.0);
        }
        ++tap;
      }
    }
    act[o] = acc >= 0 ? acc : 0.01 * acc;
  }
  for (size_t l = 1; l < w.layers.size(); ++l) {
    const DenseLayer& layer = w.layers[l];
    std::vector<double> next(layer.out);
    for (int o = 0; o < layer.out; ++o) {
      double acc = layer.bias[o];
      for (int i = 0; i < layer.in; ++i) acc += layer.w(o, i) * act[i];
      next[o] = (l + 1 == w.layers.size() || acc >= 0) ? acc : 0.01 * acc;
    }
    act = std::move(next);
  }
  return act;
}

TEST(NetworkTest, ZeroWeightsZeroImageGiveZeros) {
  const Network net(ZeroWeights(Small()));
  const FeaturePlane out = net.ForwardFull(FeaturePlane(5, 7, 3));
  EXPECT_EQ(out.channels, 24);
  for (float v : out.values) EXPECT_EQ(v, 0.0f);
}

TEST(NetworkTest, ZeroPatchPropagatesBiases) {
  Weights w = ZeroWeights(Small(1, 3, 3));
  w.layers[0].bias = {1.0f, -2.0f, 0.5f};
  for (int i = 0; i < 3; ++i) w.layers[1].w(i, i) = 1.0f;
  w.layers[2].w(0, 0) = 1.0f;
  w.layers[2].w(0, 1) = 1.0f;
  w.layers[2].bias[0] = -0.25f;
  w.layers[2].bias[1] = 3.0f;
  // Masked layer (1, -0.02, 0.5), identity hidden layer (1, -0.0002, 0.5),
  // output 0 = 1 - 0.0002 - 0.25 with no activation.
  const std::vector<float> out = ForwardPatch(FeaturePlane(5, 5, 3), w);
  EXPECT_FLOAT_EQ(out[0], 0.7498f);
  EXPECT_FLOAT_EQ(out[1], 3.0f);
  EXPECT_EQ(out[2], 0.0f);
}

TEST(NetworkTest, MatchesDoubleOracle) {
  std::mt19937_64 rng(5);
  const Weights w = InitializeWeights(Small(3, 24, 5), rng);
  const Network net(w);
  const FeaturePlane x = Normalize(RandomImage(9, 11, rng));
  const FeaturePlane out = net.ForwardFull(x);
  for (int r = 0; r < x.height; ++r) {
    for (int c = 0; c < x.width; ++c) {
      const auto ref = OracleForward(w, x, r, c);
      for (int m = 0; m < out.channels; ++m) {
        EXPECT_NEAR(out.pixel(r, c)[m], ref[m], 1e-5 * (1.0 + std::abs(ref[m])));
      }
    }
  }
}

TEST(NetworkTest, AllPathsBitIdentical) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 3; ++trial) {
    const Weights w = InitializeWeights(Small(3, 32, 4 + trial), rng);
    const Network net(w);
    const FeaturePlane x = Normalize(RandomImage(7 + trial, 13, rng));
    const FeaturePlane full = net.ForwardFull(x);
    const FeaturePlane serial = net.ForwardFullSerial(x);
    ASSERT_TRUE(BitEqual(full.values.data(), serial.values.data(), full.values.size()));
    const int m = w.config.outputs();
    std::vector<float> ctx(w.config.context_size()), out(m);
    for (int r = 0; r < x.height; ++r) {
      for (int c = 0; c < x.width; ++c) {
        const std::vector<float> patch = ForwardPatch(ExtractPatch(x, r, c, 2), w);
        EXPECT_TRUE(BitEqual(patch.data(), full.pixel(r, c), m));
        GatherContext(x, r, c, net.taps(), ctx.data());
        const std::vector<float> fc = ForwardFc(ctx, w);
        EXPECT_TRUE(BitEqual(fc.data(), full.pixel(r, c), m));
      }
    }
  }
}

TEST(NetworkTest, BatchedContextsMatchSerialAcrossThreadCounts) {
  std::mt19937_64 rng(13);
  const Weights w = InitializeWeights(Small(3, 40, 5), rng);
  const Network net(w);
  const size_t n = 203;  // not a multiple of the block size
  std::vector<float> ctx(n * w.config.context_size());
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  for (float& v : ctx) v = u(rng);
  std::vector<float> a(n * w.config.outputs()), b(a.size());
  net.EvaluateContextsSerial(ctx, n, a);
  const int saved = ThreadCount();
  for (int t : {1, 2, 3}) {
    SetThreadCount(t);
    net.EvaluateContexts(ctx, n, b);
    EXPECT_TRUE(BitEqual(a.data(), b.data(), a.size())) << t << " threads";
  }
  SetThreadCount(saved);
}

TEST(NetworkTest, SinglePixelImageUsesAllPaddingPatch) {
  std::mt19937_64 rng(17);
  const Weights w = InitializeWeights(Small(), rng);
  const FeaturePlane out = ForwardFull(Normalize(RandomImage(1, 1, rng)), w);
  const std::vector<float> pad = ForwardPatch(FeaturePlane(5, 5, 3), w);
  EXPECT_TRUE(BitEqual(out.values.data(), pad.data(), pad.size()));
}

TEST(NetworkTest, PatchIgnoresCenterAndLaterPositions) {
  std::mt19937_64 rng(19);
  const Weights w = InitializeWeights(Small(), rng);
  FeaturePlane patch = ExtractPatch(Normalize(RandomImage(5, 5, rng)), 2, 2, 2);
  const std::vector<float> base = ForwardPatch(patch, w);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  for (int trial = 0; trial < 10; ++trial) {
    for (int r = 2; r < 5; ++r) {
      for (int c = (r == 2 ? 2 : 0); c < 5; ++c) {
        for (int ch = 0; ch < 3; ++ch) patch.pixel(r, c)[ch] = u(rng);
      }
    }
    const std::vector<float> out = ForwardPatch(patch, w);
    EXPECT_TRUE(BitEqual(out.data(), base.data(), out.size()));
  }
}

TEST(NetworkTest, CausalityProbe) {
  std::mt19937_64 rng(23);
  const Weights w = InitializeWeights(Small(), rng);
  const Network net(w);
  const Image img = RandomImage(12, 12, rng);
  const FeaturePlane base = net.ForwardFull(Normalize(img));
  const int m = w.config.outputs();
  std::uniform_int_distribution<int> coord(0, 11);
  for (int probe = 0; probe < 20; ++probe) {
    const int pr = coord(rng), pc = coord(rng);
    Image changed = img;
    changed.at(pr, pc, probe % 3) ^= 0x80;
    const FeaturePlane out = net.ForwardFull(Normalize(changed));
    for (int r = 0; r < 12; ++r) {
      for (int c = 0; c < 12; ++c) {
        const bool at_or_before = r < pr || (r == pr && c <= pc);
        const bool out_of_reach = r > pr + 2 || std::abs(c - pc) > 2;
        if (at_or_before || out_of_reach) {
          EXPECT_TRUE(BitEqual(out.pixel(r, c), base.pixel(r, c), m))
              << "probe (" << pr << "," << pc << ") output (" << r << "," << c << ")";
        }
      }
    }
    // The pixel right of the probe reads it through its nearest tap.
    if (pc + 1 < 12) {
      EXPECT_FALSE(BitEqual(out.pixel(pr, pc + 1), base.pixel(pr, pc + 1), m));
    }
  }
}

TEST(NetworkTest, GatherContextPadsWithZero) {
  FeaturePlane x(2, 2, 3);
  for (float& v : x.values) v = 0.5f;
  std::vector<float> ctx(36, -9.0f);
  GatherContext(x, 0, 0, CausalTaps(2), ctx.data());
  for (float v : ctx) EXPECT_EQ(v, 0.0f);
  GatherContext(x, 1, 1, CausalTaps(2), ctx.data());
  // Taps (-1,-1), (-1,0) and (0,-1) fall inside the image.
  for (int t = 0; t < 12; ++t) {
    const bool inside = t == 6 || t == 7 || t == 11;
    for (int ch = 0; ch < 3; ++ch) EXPECT_EQ(ctx[t * 3 + ch], inside ? 0.5f : 0.0f) << t;
  }
}

}  // namespace
}  // namespace lpic
