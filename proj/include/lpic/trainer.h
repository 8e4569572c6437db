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

#ifndef LPIC_TRAINER_H_
#define LPIC_TRAINER_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lpic/image.h"
#include "lpic/model.h"

namespace lpic {

struct TrainConfig {
  int batch_size = 64;
  int crop = 64;                // square crops, crop x crop
  double learning_rate = 1e-4;  // initial
  double lr_decay = 0.99;
  int decay_every = 5;          // epochs
  int epochs = 10;
  // 0 means ceil(dataset size / batch size).
  int steps_per_epoch = 0;
  uint64_t seed = 1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

void ValidateTrainConfig(const TrainConfig& tc, const ModelConfig& cfg);

// initial * decay^floor(epoch / decay_every), epochs counted from 0.
double LearningRate(const TrainConfig& tc, int epoch);

// Kernel and bias tensors per layer, shaped like Weights::layers.
template <typename T>
struct ParamSet {
  std::vector<std::vector<T>> kernel;
  std::vector<std::vector<T>> bias;

  size_t size() const;
  T& at(size_t flat);
  T at(size_t flat) const;
};

using GradientSet = ParamSet<float>;

template <typename T>
ParamSet<T> ToParamSet(const Weights& w);
Weights FromParamSet(const ModelConfig& cfg, const ParamSet<float>& p);
template <typename T>
ParamSet<T> ZerosLike(const ModelConfig& cfg);

struct LossOptions {
  // Collects a hash of every activation-sign and clamp decision (gradient
  // checks reject finite differences that straddle a kink).
  uint64_t* kink_signature = nullptr;
};

// Mean over pixels of -log2 P(r, g, b | context), teacher-forced on the
// ground-truth r and g. Bits per pixel (three sub-pixels).
// Throws NumericError naming the offending batch index if non-finite.
double Loss(std::span<const Image> batch, const Weights& w);

// Analytic gradient of Loss. If loss != nullptr it receives the loss.
GradientSet Backward(std::span<const Image> batch, const Weights& w,
                     double* loss = nullptr);

// 64-bit shadow evaluation over double parameters, for gradient checking.
double ShadowLoss(std::span<const Image> batch, const ModelConfig& cfg,
                  const ParamSet<double>& params, const LossOptions& opt = {});
ParamSet<double> ShadowBackward(std::span<const Image> batch,
                                const ModelConfig& cfg,
                                const ParamSet<double>& params,
                                double* loss = nullptr);

class AdamOptimizer {
 public:
  AdamOptimizer(const ModelConfig& cfg, double beta1, double beta2,
                double epsilon);
  void Step(ParamSet<float>& params, const GradientSet& grad, double lr);
  int64_t steps() const { return t_; }

 private:
  double beta1_, beta2_, epsilon_;
  int64_t t_ = 0;
  ParamSet<float> m_, v_;
};

struct EpochStats {
  int epoch;
  double loss_bits_per_pixel;  // mean training loss over the epoch
  double bpsp;                 // loss / 3
  double learning_rate;
};

struct TrainResult {
  Weights weights;
  std::vector<EpochStats> curve;
};

using EpochCallback = std::function<void(const EpochStats&)>;

// Random crops, shuffled each epoch, Adam, stepwise decayed learning rate.
// Deterministic for a fixed seed.
TrainResult Train(std::span<const Image> dataset, const TrainConfig& tc,
                  const ModelConfig& cfg, const EpochCallback& on_epoch = {});
// Continues from existing weights (their config is used).
TrainResult Train(std::span<const Image> dataset, const TrainConfig& tc,
                  Weights initial, const EpochCallback& on_epoch = {});

// Loads every image in a directory (sorted by name).
std::vector<Image> LoadDataset(const std::string& dir);

void WriteLossCurveCsv(const std::string& path,
                       std::span<const EpochStats> curve);

}  // namespace lpic

#endif  // LPIC_TRAINER_H_
