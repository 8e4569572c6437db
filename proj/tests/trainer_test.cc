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

#include <cmath>
#include <fstream>
#include <random>

#include "lpic/errors.h"
#include "lpic/mixture.h"
#include "lpic/parallel.h"
#include "lpic/trainer.h"
#include "test_util.h"

namespace lpic {
namespace {

ModelConfig Tiny(int k = 2, int c = 8, int l = 4) {
  ModelConfig cfg = ReferenceConfig();
  cfg.mixtures = k;
  cfg.filters = c;
  cfg.layers = l;
  return cfg;
}

Weights Init(const ModelConfig& cfg, uint64_t seed) {
  std::mt19937_64 rng(seed);
  return InitializeWeights(cfg, rng);
}

TEST(LearningRateTest, StepwiseDecay) {
  TrainConfig tc;
  tc.learning_rate = 1e-3;
  EXPECT_DOUBLE_EQ(LearningRate(tc, 0), 1e-3);
  EXPECT_DOUBLE_EQ(LearningRate(tc, 4), 1e-3);
  EXPECT_DOUBLE_EQ(LearningRate(tc, 5), 1e-3 * 0.99);
  EXPECT_DOUBLE_EQ(LearningRate(tc, 14), 1e-3 * 0.99 * 0.99);
  EXPECT_NEAR(LearningRate(tc, 299), 1e-3 * std::pow(0.99, 59), 1e-18);
}

TEST(LossTest, UntrainedNearTwentyFourBits) {
  std::mt19937_64 rng(1);
  std::vector<Image> batch;
  for (int i = 0; i < 4; ++i) batch.push_back(RandomImage(16, 16, rng));
  const double loss = Loss(batch, Init(ReferenceConfig(), 2));
  EXPECT_GT(loss, 23.5);
  EXPECT_LT(loss, 28.0);
}

TEST(LossTest, OrderInvariantAndPerImageMean) {
  const Weights w = Init(Tiny(), 3);
  const std::vector<Image> crops = testing::NaturalCrops(3, 12, 4);
  const std::vector<Image> reversed(crops.rbegin(), crops.rend());
  EXPECT_NEAR(Loss(crops, w), Loss(reversed, w), 1e-12);
  double mean = 0.0;
  for (const Image& img : crops) mean += Loss(std::span<const Image>(&img, 1), w);
  EXPECT_NEAR(Loss(crops, w), mean / 3.0, 1e-12);
}

TEST(LossTest, FloatAndShadowAgree) {
  const Weights w = Init(Tiny(3, 16, 5), 5);
  const std::vector<Image> crops = testing::NaturalCrops(2, 10, 6);
  const double shadow = ShadowLoss(crops, w.config, ToParamSet<double>(w));
  EXPECT_NEAR(Loss(crops, w), shadow, 1e-4 * shadow);
  double loss = 0.0;
  const GradientSet g = Backward(crops, w, &loss);
  const ParamSet<double> gs = ShadowBackward(crops, w.config, ToParamSet<double>(w));
  EXPECT_NEAR(loss, shadow, 1e-4 * shadow);
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < gs.size(); ++i) {
    num += std::pow(double(g.at(i)) - gs.at(i), 2.0);
    den += gs.at(i) * gs.at(i);
  }
  EXPECT_LT(std::sqrt(num / den), 1e-3);
}

TEST(LossTest, NonFiniteLossNamesTheBatchIndex) {
  Weights w = Init(Tiny(), 7);
  w.layers[0].weights[0] = std::numeric_limits<float>::quiet_NaN();
  const std::vector<Image> crops = testing::NaturalCrops(2, 8, 8);
  try {
    Loss(crops, w);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("batch index 0"), std::string::npos);
  }
  EXPECT_THROW(Loss({}, Init(Tiny(), 7)), DimensionError);
}

TEST(GradientTest, MatchesFiniteDifferences) {
  const testing::GradientCheckResult r = testing::CheckGradients(60, 9);
  EXPECT_EQ(r.failures, 0) << "worst " << r.worst_relative_error;
  EXPECT_LE(r.worst_relative_error, 1e-4);
  EXPECT_LT(r.rejected, 60);
}

TEST(GradientTest, LogitGradientsSumToZero) {
  const Weights w = Init(Tiny(3, 8, 4), 10);
  const std::vector<Image> crops = testing::NaturalCrops(2, 8, 11);
  const ParamSet<double> g = ShadowBackward(crops, w.config, ToParamSet<double>(w));
  const std::vector<double>& out_bias = g.bias.back();
  const RawLayout lay{3};
  for (int ch = 0; ch < 3; ++ch) {
    double sum = 0.0, mag = 0.0;
    for (int i = 0; i < 3; ++i) {
      sum += out_bias[lay.logit(ch, i)];
      mag += std::abs(out_bias[lay.logit(ch, i)]);
    }
    EXPECT_GT(mag, 0.0);
    EXPECT_LT(std::abs(sum), 1e-12 + 1e-9 * mag);
  }
  // The masked layer holds exactly the causal taps: no center parameters.
  EXPECT_EQ(g.kernel[0].size(), size_t(8 * 36));
}

TEST(AdamTest, FirstStepMovesBySignedLearningRate) {
  const ModelConfig cfg = Tiny();
  ParamSet<float> p = ZerosLike<float>(cfg);
  GradientSet g = ZerosLike<float>(cfg);
  g.kernel[0][0] = 2.5f;
  g.kernel[0][1] = -0.01f;
  g.bias[2][3] = 7.0f;
  AdamOptimizer adam(cfg, 0.9, 0.999, 1e-8);
  adam.Step(p, g, 0.01);
  EXPECT_NEAR(p.kernel[0][0], -0.01f, 1e-7f);
  EXPECT_NEAR(p.kernel[0][1], 0.01f, 1e-6f);
  EXPECT_NEAR(p.bias[2][3], -0.01f, 1e-7f);
  EXPECT_EQ(p.kernel[0][2], 0.0f);
  EXPECT_EQ(adam.steps(), 1);
}

TEST(ParamSetTest, FlatIndexCoversEverything) {
  const Weights w = Init(Tiny(), 12);
  ParamSet<double> p = ToParamSet<double>(w);
  EXPECT_EQ(int64_t(p.size()), CountParameters(w.config));
  p.at(p.size() - 1) = 42.0;
  EXPECT_EQ(p.bias.back().back(), 42.0);
  p.at(0) = -1.0;
  EXPECT_EQ(p.kernel[0][0], -1.0);
  const Weights back = FromParamSet(w.config, ToParamSet<float>(w));
  EXPECT_EQ(back, w);
}

std::vector<Image> Corpus() { return testing::NaturalCrops(200, 24, 13); }

TEST(TrainTest, DeterministicForSeedAndThreadCount) {
  const std::vector<Image> data = testing::NaturalCrops(12, 20, 14);
  TrainConfig tc;
  tc.epochs = 2;
  tc.batch_size = 4;
  tc.crop = 16;
  tc.learning_rate = 1e-3;
  tc.seed = 99;
  const int saved = ThreadCount();
  SetThreadCount(1);
  const TrainResult a = Train(data, tc, Tiny());
  SetThreadCount(3);
  const TrainResult b = Train(data, tc, Tiny());
  SetThreadCount(saved);
  EXPECT_EQ(a.weights, b.weights);
  ASSERT_EQ(a.curve.size(), 2u);
  for (size_t e = 0; e < a.curve.size(); ++e) {
    EXPECT_EQ(a.curve[e].loss_bits_per_pixel, b.curve[e].loss_bits_per_pixel);
  }
  tc.seed = 100;
  EXPECT_NE(Train(data, tc, Tiny()).weights, a.weights);
}

TEST(TrainTest, LossDecreasesOverTenEpochs) {
  const std::vector<Image> data = Corpus();
  TrainConfig tc;
  tc.epochs = 10;
  tc.batch_size = 16;
  tc.crop = 16;
  tc.learning_rate = 3e-3;
  tc.seed = 5;
  const TrainResult r = Train(data, tc, Tiny(3, 16, 4));
  ASSERT_EQ(r.curve.size(), 10u);
  for (size_t e = 1; e < r.curve.size(); ++e) {
    EXPECT_LT(r.curve[e].loss_bits_per_pixel, r.curve[e - 1].loss_bits_per_pixel) << e;
    EXPECT_DOUBLE_EQ(r.curve[e].bpsp, r.curve[e].loss_bits_per_pixel / 3.0);
  }
}

TEST(TrainTest, EpochCallbackAndCsv) {
  const std::vector<Image> data = testing::NaturalCrops(4, 16, 15);
  TrainConfig tc;
  tc.epochs = 3;
  tc.batch_size = 2;
  tc.crop = 8;
  int calls = 0;
  const TrainResult r = Train(data, tc, Tiny(), [&](const EpochStats& s) {
    EXPECT_EQ(s.epoch, calls);
    ++calls;
  });
  EXPECT_EQ(calls, 3);
  testing::ScratchDir dir("curve");
  WriteLossCurveCsv(dir.file("c.csv"), r.curve);
  std::ifstream in(dir.file("c.csv"));
  std::string header, line;
  std::getline(in, header);
  EXPECT_EQ(header, "epoch,loss_bits_per_pixel,bpsp_estimate,lr");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 3);
}

TEST(TrainTest, RejectsBadSettings) {
  const std::vector<Image> data = testing::NaturalCrops(2, 8, 16);
  TrainConfig tc;
  tc.crop = 16;
  EXPECT_THROW(Train(data, tc, Tiny()), DimensionError);
  tc.crop = 8;
  tc.batch_size = 0;
  EXPECT_THROW(Train(data, tc, Tiny()), DimensionError);
  tc.batch_size = 2;
  tc.learning_rate = 0.0;
  EXPECT_THROW(Train(data, tc, Tiny()), DimensionError);
  tc.learning_rate = 1e-3;
  EXPECT_THROW(Train({}, tc, Tiny()), DimensionError);
}

}  // namespace
}  // namespace lpic
