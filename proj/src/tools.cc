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

#include "lpic/tools.h"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "lpic/codec.h"
#include "lpic/errors.h"
#include "lpic/image_io.h"
#include "lpic/mixture.h"
#include "lpic/network.h"
#include "lpic/weights_io.h"

namespace lpic {

namespace {

double Seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

const char* DistName(Distribution d) {
  return d == Distribution::kGaussian ? "gaussian" : "logistic";
}

bool SameBits(std::span<const float> a, std::span<const float> b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

}  // namespace

std::vector<NamedImage> LoadCorpus(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error("corpus '" + dir + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (ext == ".ppm" || ext == ".png") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<NamedImage> out;
  for (const auto& f : files) out.push_back({f.filename().string(), LoadImage(f.string())});
  if (out.empty()) throw Error("corpus '" + dir + "' holds no .ppm or .png images");
  return out;
}

Image RandomImage(int height, int width, std::mt19937_64& rng) {
  Image img(height, width);
  std::uniform_int_distribution<int> d(0, 255);
  for (uint8_t& v : img.pixels) v = uint8_t(d(rng));
  return img;
}

// ---- bench ---------------------------------------------------------------

BenchReport Bench(std::span<const NamedImage> corpus, const Weights& w,
                  ScheduleMode mode) {
  if (corpus.empty()) throw Error("bench corpus is empty");
  const Codec codec(w);
  BenchReport report;
  report.mode = mode;
  for (const NamedImage& item : corpus) {
    BenchRow row;
    row.name = item.name;
    row.height = item.image.height;
    row.width = item.image.width;
    CodecTrace enc_trace, dec_trace;
    auto t0 = std::chrono::steady_clock::now();
    const Container c = codec.Encode(item.image, mode, &enc_trace);
    row.encode_seconds = Seconds(t0);
    t0 = std::chrono::steady_clock::now();
    const Image back = codec.Decode(c, &dec_trace);
    row.decode_seconds = Seconds(t0);
    row.bpsp = Bpsp(c);
    row.theoretical_bpsp = enc_trace.ideal_bits / (3.0 * double(item.image.num_pixels()));
    row.schedule_steps =
        int64_t(MakeSchedule(mode, row.height, row.width, w.config.kernel_half).num_steps());
    row.network_passes = dec_trace.network_passes;
    row.lossless = back == item.image;
    report.rows.push_back(row);
  }
  for (const BenchRow& r : report.rows) {
    report.mean_bpsp += r.bpsp;
    report.mean_theoretical_bpsp += r.theoretical_bpsp;
  }
  report.mean_bpsp /= double(report.rows.size());
  report.mean_theoretical_bpsp /= double(report.rows.size());
  return report;
}

void WriteBenchCsv(const std::string& path, const BenchReport& report) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "image,height,width,mode,bpsp,theoretical_bpsp,encode_s,decode_s,"
         "schedule_steps,network_passes,lossless\n";
  out << std::setprecision(9);
  for (const BenchRow& r : report.rows) {
    out << r.name << ',' << r.height << ',' << r.width << ',' << ModeName(report.mode)
        << ',' << r.bpsp << ',' << r.theoretical_bpsp << ',' << r.encode_seconds << ','
        << r.decode_seconds << ',' << r.schedule_steps << ',' << r.network_passes << ','
        << (r.lossless ? 1 : 0) << '\n';
  }
}

std::string FormatBenchTable(const BenchReport& report) {
  std::ostringstream out;
  out << "mode: " << ModeName(report.mode) << "\n";
  out << std::left << std::setw(24) << "image" << std::right << std::setw(11) << "size"
      << std::setw(9) << "bpsp" << std::setw(11) << "ideal" << std::setw(10) << "enc s"
      << std::setw(10) << "dec s" << std::setw(9) << "steps" << std::setw(10)
      << "lossless" << "\n";
  out << std::fixed;
  for (const BenchRow& r : report.rows) {
    std::ostringstream size;
    size << r.width << "x" << r.height;
    out << std::left << std::setw(24) << r.name << std::right << std::setw(11)
        << size.str() << std::setw(9) << std::setprecision(3) << r.bpsp << std::setw(11)
        << std::setprecision(4) << r.theoretical_bpsp << std::setw(10)
        << std::setprecision(3) << r.encode_seconds << std::setw(10) << r.decode_seconds
        << std::setw(9) << r.schedule_steps << std::setw(10) << (r.lossless ? "yes" : "NO")
        << "\n";
  }
  out << std::left << std::setw(35) << "mean" << std::right << std::setw(9)
      << std::setprecision(3) << report.mean_bpsp << std::setw(11) << std::setprecision(4)
      << report.mean_theoretical_bpsp << "\n";
  return out.str();
}

std::string BenchJson(const BenchReport& report) {
  nlohmann::json j;
  j["mode"] = ModeName(report.mode);
  j["mean_bpsp"] = report.mean_bpsp;
  j["mean_theoretical_bpsp"] = report.mean_theoretical_bpsp;
  for (const BenchRow& r : report.rows) {
    j["images"].push_back({{"name", r.name},
                           {"height", r.height},
                           {"width", r.width},
                           {"bpsp", r.bpsp},
                           {"theoretical_bpsp", r.theoretical_bpsp},
                           {"encode_seconds", r.encode_seconds},
                           {"decode_seconds", r.decode_seconds},
                           {"schedule_steps", r.schedule_steps},
                           {"network_passes", r.network_passes},
                           {"lossless", r.lossless}});
  }
  return j.dump(2);
}

// ---- ablate --------------------------------------------------------------

std::vector<ModelConfig> ParseGrid(const std::string& text, const ModelConfig& base) {
  std::vector<int> ks{base.mixtures}, cs{base.filters}, ls{base.layers};
  std::vector<Distribution> ds{base.distribution};
  for (const std::string& axis : Split(text, ';')) {
    const size_t eq = axis.find('=');
    if (eq == std::string::npos) throw Error("grid axis '" + axis + "' lacks '='");
    std::string key = axis.substr(0, eq);
    std::transform(key.begin(), key.end(), key.begin(), ::tolower);
    const std::vector<std::string> values = Split(axis.substr(eq + 1), ',');
    if (values.empty()) throw Error("grid axis '" + key + "' has no values");
    auto ints = [&] {
      std::vector<int> v;
      for (const std::string& s : values) {
        size_t used = 0;
        int x = 0;
        try {
          x = std::stoi(s, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != s.size()) throw Error("grid value '" + s + "' is not an integer");
        v.push_back(x);
      }
      return v;
    };
    if (key == "k") {
      ks = ints();
    } else if (key == "c") {
      cs = ints();
    } else if (key == "l") {
      ls = ints();
    } else if (key == "dist" || key == "distribution") {
      ds.clear();
      for (const std::string& s : values) {
        if (s == "gaussian") {
          ds.push_back(Distribution::kGaussian);
        } else if (s == "logistic") {
          ds.push_back(Distribution::kLogistic);
        } else {
          throw Error("unknown distribution '" + s + "'");
        }
      }
    } else {
      throw Error("unknown grid axis '" + key + "'");
    }
  }
  std::vector<ModelConfig> grid;
  for (Distribution d : ds) {
    for (int k : ks) {
      for (int c : cs) {
        for (int l : ls) {
          ModelConfig cfg = base;
          cfg.mixtures = k;
          cfg.filters = c;
          cfg.layers = l;
          cfg.distribution = d;
          ValidateConfig(cfg);
          grid.push_back(cfg);
        }
      }
    }
  }
  return grid;
}

std::string ConfigTag(const ModelConfig& cfg) {
  std::ostringstream out;
  out << "K" << cfg.mixtures << "_C" << cfg.filters << "_L" << cfg.layers << "_h"
      << cfg.kernel_half << "_" << DistName(cfg.distribution);
  return out.str();
}

std::vector<AblationRow> Ablate(std::span<const NamedImage> corpus,
                                std::span<const ModelConfig> grid,
                                const AblateOptions& opt) {
  if (corpus.empty()) throw Error("ablation corpus is empty");
  if (grid.empty()) throw Error("ablation grid is empty");
  std::vector<Image> train, eval;
  for (size_t i = 0; i < corpus.size(); ++i) {
    if (corpus.size() >= 5 && i % 5 == 4) {
      eval.push_back(corpus[i].image);
    } else {
      train.push_back(corpus[i].image);
    }
  }
  if (eval.empty()) eval = train;

  std::vector<AblationRow> rows;
  for (const ModelConfig& cfg : grid) {
    AblationRow row;
    row.config = cfg;
    row.parameters = CountParameters(cfg);
    Weights w;
    if (!opt.weights_dir.empty()) {
      const std::string path =
          (std::filesystem::path(opt.weights_dir) / (ConfigTag(cfg) + ".lpwt")).string();
      if (!std::filesystem::exists(path)) {
        throw Error("missing weights for grid point " + ConfigTag(cfg) + " (" + path + ")");
      }
      w = LoadWeights(path);
      if (!(w.config == cfg)) throw Error("weights in " + path + " have another config");
      row.final_train_loss = std::numeric_limits<double>::quiet_NaN();
    } else {
      TrainResult tr = Train(train, opt.train, cfg);
      w = std::move(tr.weights);
      row.final_train_loss =
          tr.curve.empty() ? std::numeric_limits<double>::quiet_NaN()
                           : tr.curve.back().loss_bits_per_pixel;
    }
    const Codec codec(w);
    for (const Image& img : eval) {
      CodecTrace trace;
      const Container c = codec.Encode(img, opt.mode, &trace);
      row.bpsp += Bpsp(c);
      row.theoretical_bpsp += trace.ideal_bits / (3.0 * double(img.num_pixels()));
    }
    row.bpsp /= double(eval.size());
    row.theoretical_bpsp /= double(eval.size());
    rows.push_back(row);
  }
  return rows;
}

std::string FormatAblationTable(std::span<const AblationRow> rows) {
  std::ostringstream out;
  out << std::left << std::setw(30) << "config" << std::right << std::setw(12)
      << "# params" << std::setw(9) << "bpsp" << std::setw(10) << "ideal" << std::setw(12)
      << "train loss" << "\n"
      << std::fixed;
  for (const AblationRow& r : rows) {
    out << std::left << std::setw(30) << ConfigTag(r.config) << std::right << std::setw(12)
        << r.parameters << std::setw(9) << std::setprecision(3) << r.bpsp << std::setw(10)
        << std::setprecision(4) << r.theoretical_bpsp << std::setw(12)
        << std::setprecision(3) << r.final_train_loss << "\n";
  }
  return out.str();
}

void WriteAblationCsv(const std::string& path, std::span<const AblationRow> rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "config,K,C,L,distribution,parameters,bpsp,theoretical_bpsp,final_train_loss\n";
  out << std::setprecision(9);
  for (const AblationRow& r : rows) {
    out << ConfigTag(r.config) << ',' << r.config.mixtures << ',' << r.config.filters << ','
        << r.config.layers << ',' << DistName(r.config.distribution) << ',' << r.parameters
        << ',' << r.bpsp << ',' << r.theoretical_bpsp << ',' << r.final_train_loss << '\n';
  }
}

// ---- verify --------------------------------------------------------------

bool VerifyReport::ok() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

VerifyReport Verify(const Weights& w, int size, uint64_t seed) {
  if (size < 1) throw DimensionError("verify size must be positive");
  VerifyReport report;
  std::mt19937_64 rng(seed);
  const Codec codec(w);
  const Network& net = codec.network();
  const ModelConfig& cfg = w.config;
  const int m = cfg.outputs();
  const int h = cfg.kernel_half;
  const Image img = RandomImage(size, size, rng);
  const FeaturePlane image_n = Normalize(img);
  const FeaturePlane full = net.ForwardFull(image_n);

  auto add = [&](std::string name, bool passed, std::string detail) {
    report.checks.push_back({std::move(name), passed, std::move(detail)});
  };

  {
    const FeaturePlane serial = net.ForwardFullSerial(image_n);
    int64_t mismatches = 0;
    std::vector<float> ctx(cfg.context_size()), a(m), b(m);
    for (int r = 0; r < size; ++r) {
      for (int c = 0; c < size; ++c) {
        GatherContext(image_n, r, c, net.taps(), ctx.data());
        net.ForwardFc(ctx, a);
        net.ForwardPatch(ExtractPatch(image_n, r, c, h), b);
        std::span<const float> f(full.pixel(r, c), m), s(serial.pixel(r, c), m);
        if (!SameBits(f, s) || !SameBits(f, a) || !SameBits(f, b)) ++mismatches;
      }
    }
    add("path equivalence", mismatches == 0,
        std::to_string(mismatches) + " of " + std::to_string(size * size) +
            " pixels differ between full/serial/patch/fc");
  }

  {
    const int probes = 16;
    std::uniform_int_distribution<int> coord(0, size - 1), value(0, 255);
    int64_t bad = 0;
    for (int k = 0; k < probes; ++k) {
      const int pr = coord(rng), pc = coord(rng);
      Image changed = img;
      const int ch = value(rng) % 3;
      changed.at(pr, pc, ch) = uint8_t((changed.at(pr, pc, ch) + 1 + value(rng) % 255) % 256);
      const FeaturePlane out = net.ForwardFull(Normalize(changed));
      for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
          const bool reads = (r - pr >= 1 && r - pr <= h && std::abs(c - pc) <= h) ||
                             (r == pr && c - pc >= 1 && c - pc <= h);
          if (!reads && !SameBits({out.pixel(r, c), size_t(m)}, {full.pixel(r, c), size_t(m)})) {
            ++bad;
          }
        }
      }
    }
    add("causality probe", bad == 0,
        std::to_string(bad) + " outputs changed outside the perturbed pixel's reach");
  }

  {
    int64_t bad = 0;
    double worst = 0.0;
    for (int64_t p = 0; p < int64_t(img.num_pixels()); ++p) {
      PixelParams params = Activate({full.values.data() + size_t(p) * m, size_t(m)}, cfg);
      UpdateMeansInPlace(params, NormalizedValue(img.pixels[p * 3]),
                         NormalizedValue(img.pixels[p * 3 + 1]));
      for (int ch = 0; ch < 3; ++ch) {
        const Pmf pmf = ChannelPmf(params, SubPixel(ch), cfg.distribution);
        double sum = 0.0;
        for (double v : pmf) sum += v;
        worst = std::max(worst, std::abs(sum - 1.0));
        if (std::abs(sum - 1.0) > 1e-6 || !IsValidCdf(QuantizeCdf(pmf))) ++bad;
      }
    }
    std::ostringstream d;
    d << bad << " bad tables, worst |sum-1| = " << worst;
    add("pmf/cdf properties", bad == 0, d.str());
  }

  std::vector<ScheduleMode> modes{ScheduleMode::kSequential, ScheduleMode::kWavefront};
  if (h == 2) modes.push_back(ScheduleMode::kDiagonal);
  {
    std::ostringstream d;
    bool ok = true;
    for (ScheduleMode mode : modes) {
      const Schedule s = MakeSchedule(mode, size, size, h);
      const auto v = Validate(s, h);
      d << ModeName(mode) << ": " << s.num_steps() << " steps, " << v.size()
        << " violations; ";
      ok = ok && v.empty();
    }
    add("schedule validation", ok, d.str());
  }

  for (ScheduleMode mode : modes) {
    CodecTrace enc, dec;
    std::string detail;
    bool lossless = false, same_params = false;
    try {
      const Container c = codec.Encode(img, mode, &enc);
      const Container parsed = ParseContainer(SerializeContainer(c));
      const Image back = codec.Decode(parsed, &dec);
      lossless = back == img;
      same_params = SameBits(enc.raw, dec.raw);
      const int64_t steps = int64_t(MakeSchedule(mode, size, size, h).num_steps());
      same_params = same_params && dec.network_passes == steps;
      std::ostringstream d;
      d << Bpsp(c) << " bpsp, " << dec.network_passes << " passes for " << steps << " steps";
      detail = d.str();
    } catch (const std::exception& e) {
      detail = e.what();
    }
    add(std::string("round trip (") + ModeName(mode) + ")", lossless, detail);
    add(std::string("encoder/decoder parameters (") + ModeName(mode) + ")", same_params,
        detail);
  }
  return report;
}

std::string FormatVerifyReport(const VerifyReport& report) {
  std::ostringstream out;
  for (const CheckResult& c : report.checks) {
    out << (c.passed ? "PASS  " : "FAIL  ") << c.name << ": " << c.detail << "\n";
  }
  out << (report.ok() ? "all checks passed\n" : "some checks FAILED\n");
  return out.str();
}

std::string VerifyJson(const VerifyReport& report) {
  nlohmann::json j;
  j["ok"] = report.ok();
  j["checks"] = nlohmann::json::array();
  for (const CheckResult& c : report.checks) {
    j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  return j.dump(2);
}

}  // namespace lpic
