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

#ifndef LPIC_TOOLS_H_
#define LPIC_TOOLS_H_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lpic/image.h"
#include "lpic/model.h"
#include "lpic/schedule.h"
#include "lpic/trainer.h"

namespace lpic {

struct NamedImage {
  std::string name;
  Image image;
};

// Every .ppm/.png file in dir, sorted by name. Throws on an empty corpus.
std::vector<NamedImage> LoadCorpus(const std::string& dir);

Image RandomImage(int height, int width, std::mt19937_64& rng);

// ---- bench ---------------------------------------------------------------

struct BenchRow {
  std::string name;
  int height = 0;
  int width = 0;
  double bpsp = 0.0;
  double theoretical_bpsp = 0.0;
  double encode_seconds = 0.0;
  double decode_seconds = 0.0;
  int64_t schedule_steps = 0;
  int64_t network_passes = 0;
  bool lossless = false;
};

struct BenchReport {
  ScheduleMode mode = ScheduleMode::kSequential;
  std::vector<BenchRow> rows;
  double mean_bpsp = 0.0;
  double mean_theoretical_bpsp = 0.0;
};

BenchReport Bench(std::span<const NamedImage> corpus, const Weights& w,
                  ScheduleMode mode);
void WriteBenchCsv(const std::string& path, const BenchReport& report);
std::string FormatBenchTable(const BenchReport& report);
std::string BenchJson(const BenchReport& report);

// ---- ablate --------------------------------------------------------------

// "K=3,5;C=8,16;L=4,5;dist=gaussian,logistic" -> cartesian product over the
// listed axes; unlisted axes keep the values of `base`.
std::vector<ModelConfig> ParseGrid(const std::string& text,
                                   const ModelConfig& base);

// K3_C128_L5_h2_gaussian
std::string ConfigTag(const ModelConfig& cfg);

struct AblateOptions {
  TrainConfig train;
  // When set, weights are read from <weights_dir>/<ConfigTag>.lpwt instead of
  // being trained in place.
  std::string weights_dir;
  ScheduleMode mode = ScheduleMode::kSequential;
};

struct AblationRow {
  ModelConfig config;
  int64_t parameters = 0;
  double bpsp = 0.0;
  double theoretical_bpsp = 0.0;
  double final_train_loss = 0.0;  // NaN when weights were loaded
};

// Every fifth corpus image (if there are at least five) is held out for
// evaluation; otherwise the whole corpus is used for both.
std::vector<AblationRow> Ablate(std::span<const NamedImage> corpus,
                                std::span<const ModelConfig> grid,
                                const AblateOptions& opt);
std::string FormatAblationTable(std::span<const AblationRow> rows);
void WriteAblationCsv(const std::string& path, std::span<const AblationRow> rows);

// ---- verify --------------------------------------------------------------

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool ok() const;
};

// Path equivalence, causality probe, CDF properties, schedule validation,
// round trips in every mode and encoder/decoder parameter equality on
// random size x size images.
VerifyReport Verify(const Weights& w, int size, uint64_t seed);
std::string FormatVerifyReport(const VerifyReport& report);
std::string VerifyJson(const VerifyReport& report);

}  // namespace lpic

#endif  // LPIC_TOOLS_H_
