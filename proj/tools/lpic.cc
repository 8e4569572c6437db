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

// lpic: command-line front end for the codec, trainer and evaluation tools.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include "lpic/byte_io.h"
#include "lpic/codec.h"
#include "lpic/errors.h"
#include "lpic/image_io.h"
#include "lpic/parallel.h"
#include "lpic/tools.h"
#include "lpic/trainer.h"
#include "lpic/weights_io.h"

namespace {

using namespace lpic;

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text << "\n";
}

Distribution ParseDistribution(const std::string& s) {
  if (s == "gaussian") return Distribution::kGaussian;
  if (s == "logistic") return Distribution::kLogistic;
  throw Error("unknown distribution '" + s + "'");
}

struct ModelFlags {
  int k = 3, c = 128, l = 5, h = 2;
  std::string dist = "gaussian";

  void Add(CLI::App* cmd) {
    cmd->add_option("--mixtures,-K", k, "mixture components per channel");
    cmd->add_option("--filters,-C", c, "hidden width");
    cmd->add_option("--layers,-L", l, "layer count");
    cmd->add_option("--kernel-half", h, "causal kernel half-width");
    cmd->add_option("--dist", dist, "gaussian or logistic");
  }
  ModelConfig Config() const {
    ModelConfig cfg{k, c, l, h, ParseDistribution(dist)};
    ValidateConfig(cfg);
    return cfg;
  }
};

struct TrainFlags {
  TrainConfig tc;
  void Add(CLI::App* cmd) {
    cmd->add_option("--epochs", tc.epochs, "training epochs");
    cmd->add_option("--batch", tc.batch_size, "crops per step");
    cmd->add_option("--crop", tc.crop, "square crop side");
    cmd->add_option("--seed", tc.seed, "random seed");
    cmd->add_option("--lr", tc.learning_rate, "initial learning rate");
    cmd->add_option("--steps", tc.steps_per_epoch, "steps per epoch (0: one pass)");
  }
};

int Run(int argc, char** argv) {
  CLI::App app{"lpic: learned lossless image codec"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (overrides LPIC_THREADS)");

  // encode
  std::string enc_in, enc_w, enc_mode = "seq", enc_out, enc_json;
  CLI::App* encode = app.add_subcommand("encode", "compress an image");
  encode->add_option("-i,--input", enc_in, "input .ppm/.png")->required();
  encode->add_option("-w,--weights", enc_w, "weight file")->required();
  encode->add_option("-m,--mode", enc_mode, "seq, wave or diag");
  encode->add_option("-o,--output", enc_out, "output .lpic")->required();
  encode->add_option("--json", enc_json, "write a JSON report");

  // decode
  std::string dec_in, dec_w, dec_out;
  bool force = false;
  CLI::App* decode = app.add_subcommand("decode", "decompress a container");
  decode->add_option("-i,--input", dec_in, "input .lpic")->required();
  decode->add_option("-w,--weights", dec_w, "weight file")->required();
  decode->add_option("-o,--output", dec_out, "output .ppm/.png")->required();
  decode->add_flag("--force", force, "overwrite an existing output");

  // train
  std::string tr_dir, tr_out, tr_curve, tr_init;
  ModelFlags tr_model;
  TrainFlags tr_flags;
  CLI::App* train = app.add_subcommand("train", "train weights on a directory");
  train->add_option("-d,--data", tr_dir, "image directory")->required();
  train->add_option("-o,--output", tr_out, "output weight file")->required();
  train->add_option("--curve", tr_curve, "loss curve CSV (default <output>.csv)");
  train->add_option("--init", tr_init, "continue from these weights");
  tr_model.Add(train);
  tr_flags.Add(train);

  // bench
  std::string b_dir, b_w, b_mode = "seq", b_csv, b_json;
  CLI::App* bench = app.add_subcommand("bench", "measure compression on a corpus");
  bench->add_option("-d,--data", b_dir, "image directory")->required();
  bench->add_option("-w,--weights", b_w, "weight file")->required();
  bench->add_option("-m,--mode", b_mode, "seq, wave or diag");
  bench->add_option("--csv", b_csv, "write a CSV report");
  bench->add_option("--json", b_json, "write a JSON report");

  // ablate
  std::string a_dir, a_grid, a_wdir, a_mode = "seq", a_csv;
  ModelFlags a_model;
  TrainFlags a_flags;
  CLI::App* ablate = app.add_subcommand("ablate", "sweep model configurations");
  ablate->add_option("-d,--data", a_dir, "image directory")->required();
  ablate->add_option("--grid", a_grid, "e.g. K=3,5;C=16;dist=gaussian,logistic")
      ->required();
  ablate->add_option("--weights-dir", a_wdir, "use <dir>/<config>.lpwt, no training");
  ablate->add_option("-m,--mode", a_mode, "seq, wave or diag");
  ablate->add_option("--csv", a_csv, "write a CSV report");
  a_model.Add(ablate);
  a_flags.Add(ablate);

  // verify
  std::string v_w, v_json;
  int v_size = 16;
  uint64_t v_seed = 1;
  ModelFlags v_model;
  CLI::App* verify = app.add_subcommand("verify", "run the invariant suite");
  verify->add_option("-w,--weights", v_w, "weight file (default: fresh random weights)");
  verify->add_option("--size", v_size, "side of the random test image");
  verify->add_option("--seed", v_seed, "random seed");
  verify->add_option("--json", v_json, "write a JSON report");
  v_model.Add(verify);

  CLI11_PARSE(app, argc, argv);

  ConfigureThreadsFromEnv();
  if (threads > 0) SetThreadCount(threads);

  if (*encode) {
    const Weights w = LoadWeights(enc_w);
    const Image img = LoadImage(enc_in);
    const ScheduleMode mode = ParseMode(enc_mode);
    CodecTrace trace;
    const Container c = Codec(w).Encode(img, mode, &trace);
    const auto bytes = SerializeContainer(c);
    WriteFileBytes(enc_out, bytes);
    const double ideal = trace.ideal_bits / (3.0 * double(img.num_pixels()));
    std::printf("%s: %dx%d, %s, %zu bytes, %.4f bpsp (ideal %.4f)\n", enc_out.c_str(),
                img.width, img.height, ModeName(mode), bytes.size(), Bpsp(c), ideal);
    if (!enc_json.empty()) {
      nlohmann::json j{{"output", enc_out},   {"width", img.width},
                       {"height", img.height}, {"mode", ModeName(mode)},
                       {"bytes", bytes.size()}, {"bpsp", Bpsp(c)},
                       {"theoretical_bpsp", ideal}};
      WriteText(enc_json, j.dump(2));
    }
    return 0;
  }

  if (*decode) {
    if (std::filesystem::exists(dec_out) && !force) {
      std::fprintf(stderr, "error: '%s' exists (pass --force to overwrite)\n",
                   dec_out.c_str());
      return 1;
    }
    const Weights w = LoadWeights(dec_w);
    const Container c = ParseContainer(ReadFileBytes(dec_in));
    const Image img = Decode(c, w);
    SaveImage(dec_out, img);
    std::printf("%s: %dx%d, %s\n", dec_out.c_str(), img.width, img.height,
                ModeName(c.mode));
    return 0;
  }

  if (*train) {
    const std::vector<Image> data = LoadDataset(tr_dir);
    auto report = [](const EpochStats& s) {
      std::printf("epoch %3d  loss %.4f bits/px  %.4f bpsp  lr %.3g\n", s.epoch,
                  s.loss_bits_per_pixel, s.bpsp, s.learning_rate);
      std::fflush(stdout);
    };
    TrainResult r = tr_init.empty()
                        ? Train(data, tr_flags.tc, tr_model.Config(), report)
                        : Train(data, tr_flags.tc, LoadWeights(tr_init), report);
    SaveWeights(tr_out, r.weights);
    WriteLossCurveCsv(tr_curve.empty() ? tr_out + ".csv" : tr_curve, r.curve);
    std::printf("wrote %s (%lld parameters)\n", tr_out.c_str(),
                static_cast<long long>(CountParameters(r.weights.config)));
    return 0;
  }

  if (*bench) {
    const Weights w = LoadWeights(b_w);
    const auto corpus = LoadCorpus(b_dir);
    const BenchReport r = Bench(corpus, w, ParseMode(b_mode));
    std::fputs(FormatBenchTable(r).c_str(), stdout);
    if (!b_csv.empty()) WriteBenchCsv(b_csv, r);
    if (!b_json.empty()) WriteText(b_json, BenchJson(r));
    for (const BenchRow& row : r.rows) {
      if (!row.lossless) return 1;
    }
    return 0;
  }

  if (*ablate) {
    const auto corpus = LoadCorpus(a_dir);
    const auto grid = ParseGrid(a_grid, a_model.Config());
    AblateOptions opt;
    opt.train = a_flags.tc;
    opt.weights_dir = a_wdir;
    opt.mode = ParseMode(a_mode);
    const auto rows = Ablate(corpus, grid, opt);
    std::fputs(FormatAblationTable(rows).c_str(), stdout);
    if (!a_csv.empty()) WriteAblationCsv(a_csv, rows);
    return 0;
  }

  if (*verify) {
    Weights w;
    if (v_w.empty()) {
      std::mt19937_64 rng(v_seed);
      w = InitializeWeights(v_model.Config(), rng);
    } else {
      try {
        w = LoadWeights(v_w);
      } catch (const Error& e) {
        std::printf("FAIL  weight file: %s\n", e.what());
        return 1;
      }
      std::printf("PASS  weight fingerprint: %016llx\n",
                  static_cast<unsigned long long>(WeightFingerprint(w)));
    }
    const VerifyReport r = Verify(w, v_size, v_seed);
    std::fputs(FormatVerifyReport(r).c_str(), stdout);
    if (!v_json.empty()) WriteText(v_json, VerifyJson(r));
    return r.ok() ? 0 : 1;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Run(argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
