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

#include "lpic/codec.h"

#include <array>
#include <string>

#include "lpic/byte_io.h"
#include "lpic/errors.h"
#include "lpic/range_coder.h"
#include "lpic/weights_io.h"

namespace lpic {

namespace {

// Codes one pixel's three sub-pixels. `code` receives the channel, its
// quantized cdf and pmf and returns the symbol (known when encoding, read
// from the stream when decoding). Means are updated between channels.
template <bool kQuantize = true, typename CodeFn>
std::array<int, 3> CodePixel(PixelParams& p, Distribution dist, CodeFn&& code) {
  auto cdf_of = [](const Pmf& pmf) {
    if constexpr (kQuantize) {
      return QuantizeCdf(pmf);
    } else {
      return QuantizedCdf{};
    }
  };
  std::array<int, 3> sym{};
  Pmf pmf = ChannelPmf(p, SubPixel::kRed, dist);
  sym[0] = code(0, cdf_of(pmf), pmf);
  const double r_n = NormalizedValue(sym[0]);
  ChannelMixture& g = p.channel[1];
  for (size_t i = 0; i < g.means.size(); ++i) g.means[i] += p.alpha[i] * r_n;
  pmf = ChannelPmf(p, SubPixel::kGreen, dist);
  sym[1] = code(1, cdf_of(pmf), pmf);
  const double g_n = NormalizedValue(sym[1]);
  ChannelMixture& b = p.channel[2];
  for (size_t i = 0; i < b.means.size(); ++i) {
    b.means[i] += p.beta[i] * r_n + p.gamma[i] * g_n;
  }
  pmf = ChannelPmf(p, SubPixel::kBlue, dist);
  sym[2] = code(2, cdf_of(pmf), pmf);
  return sym;
}

struct Interval {
  uint32_t low, high;
};

void CheckImage(const Image& img) {
  if (!IsWellFormed(img)) throw DimensionError("image is empty or not dense RGB");
}

// Total of per-pixel rates, summed in raster order.
double SumInRasterOrder(const std::vector<double>& rates) {
  double total = 0.0;
  for (double r : rates) total += r;
  return total;
}

}  // namespace

void BuildContext(const FeaturePlane& image_n, int row, int col,
                  std::span<const TapOffset> taps,
                  std::span<const Substitution> subs, float* out) {
  GatherContext(image_n, row, col, taps, out);
  for (const Substitution& s : subs) {
    float* dst = out + 3 * s.tap;
    if (s.source < 0) {
      dst[0] = dst[1] = dst[2] = 0.0f;
    } else {
      const float* src = image_n.values.data() + size_t(s.source) * 3;
      dst[0] = src[0];
      dst[1] = src[1];
      dst[2] = src[2];
    }
  }
}

std::vector<uint8_t> SerializeContainer(const Container& c) {
  ByteWriter out;
  out.Tag("LPIC");
  out.U8(kContainerVersion);
  out.U8(uint8_t(c.mode));
  out.U8(c.mixtures);
  out.U8(uint8_t(c.distribution));
  out.U32(c.width);
  out.U32(c.height);
  out.U64(c.fingerprint);
  out.U64(c.payload.size());
  out.Bytes(c.payload);
  return out.Take();
}

Container ParseContainer(std::span<const uint8_t> bytes) {
  ByteReader in(bytes, "container");
  in.ExpectTag("LPIC");
  const uint8_t version = in.U8();
  if (version != kContainerVersion) {
    throw FormatError("container: unsupported version " + std::to_string(version));
  }
  Container c;
  const uint8_t mode = in.U8();
  if (mode > 2) throw FormatError("container: unknown mode " + std::to_string(mode));
  c.mode = ScheduleMode(mode);
  c.mixtures = in.U8();
  const uint8_t dist = in.U8();
  if (dist > 1) throw FormatError("container: unknown distribution");
  c.distribution = Distribution(dist);
  c.width = in.U32();
  c.height = in.U32();
  if (c.width == 0 || c.height == 0) throw FormatError("container: empty image");
  c.fingerprint = in.U64();
  const uint64_t len = in.U64();
  if (len != in.remaining()) throw FormatError("container: payload length mismatch");
  auto payload = in.Bytes(size_t(len));
  c.payload.assign(payload.begin(), payload.end());
  return c;
}

Codec::Codec(Weights weights)
    : net_(std::move(weights)), fingerprint_(WeightFingerprint(net_.weights())) {}

std::vector<float> Codec::RawParameters(const Image& img, ScheduleMode mode) const {
  CheckImage(img);
  const FeaturePlane image_n = Normalize(img);
  if (mode != ScheduleMode::kDiagonal) {
    return net_.ForwardFull(image_n).values;
  }
  // Substituted contexts differ from the plain causal window, so the
  // diagonal encoder evaluates exactly the contexts the decoder will build.
  const Schedule sched = DiagonalSchedule(img.height, img.width, config().kernel_half);
  const size_t in = config().context_size();
  const size_t n = img.num_pixels();
  std::vector<float> contexts(n * in);
#pragma omp parallel for schedule(static)
  for (int row = 0; row < img.height; ++row) {
    for (int col = 0; col < img.width; ++col) {
      const int64_t p = int64_t(row) * img.width + col;
      BuildContext(image_n, row, col, net_.taps(), sched.substitutions_for(p),
                   contexts.data() + size_t(p) * in);
    }
  }
  std::vector<float> raw(n * config().outputs());
  net_.EvaluateContexts(contexts, n, raw);
  return raw;
}

Container Codec::Encode(const Image& img, ScheduleMode mode,
                        CodecTrace* trace) const {
  CheckImage(img);
  const ModelConfig& cfg = config();
  const Schedule sched = MakeSchedule(mode, img.height, img.width, cfg.kernel_half);
  std::vector<float> raw = RawParameters(img, mode);

  const size_t m = cfg.outputs();
  const int64_t n = int64_t(img.num_pixels());
  std::vector<std::array<Interval, 3>> intervals(n);
  std::vector<double> rates(n, 0.0);
#pragma omp parallel for schedule(static)
  for (int64_t p = 0; p < n; ++p) {
    PixelParams params =
        Activate(std::span<const float>(raw.data() + size_t(p) * m, m), cfg);
    const uint8_t* px = img.pixels.data() + size_t(p) * 3;
    CodePixel(params, cfg.distribution,
              [&](int ch, const QuantizedCdf& cdf, const Pmf& pmf) {
                const int sym = px[ch];
                intervals[p][ch] = {cdf.low(sym), cdf.high(sym)};
                rates[p] += RateOf(pmf, sym);
                return sym;
              });
  }

  RangeEncoder enc;
  for (int64_t p : sched.order()) {
    for (const Interval& iv : intervals[p]) enc.Encode(iv.low, iv.high);
  }

  Container c;
  c.mode = mode;
  c.mixtures = uint8_t(cfg.mixtures);
  c.distribution = cfg.distribution;
  c.width = uint32_t(img.width);
  c.height = uint32_t(img.height);
  c.fingerprint = fingerprint_;
  c.payload = enc.Finish();
  if (trace != nullptr) {
    trace->raw = std::move(raw);
    trace->network_passes = 1;
    trace->ideal_bits = SumInRasterOrder(rates);
  }
  return c;
}

Image Codec::Decode(const Container& c, CodecTrace* trace) const {
  const ModelConfig& cfg = config();
  if (c.fingerprint != fingerprint_) {
    throw FingerprintError("container was encoded with different weights");
  }
  if (c.mixtures != cfg.mixtures || c.distribution != cfg.distribution) {
    throw FingerprintError("container model header disagrees with the weights");
  }
  if (c.width == 0 || c.height == 0 || c.width > (1u << 20) || c.height > (1u << 20)) {
    throw FormatError("container: unreasonable dimensions");
  }
  const int height = int(c.height), width = int(c.width);
  const Schedule sched = MakeSchedule(c.mode, height, width, cfg.kernel_half);

  Image img(height, width);
  FeaturePlane image_n(height, width, 3);
  RangeDecoder dec(c.payload);
  const size_t in = cfg.context_size();
  const size_t m = cfg.outputs();
  std::vector<float> contexts, raw;
  std::vector<double> rates;
  if (trace != nullptr) {
    trace->raw.assign(img.num_pixels() * m, 0.0f);
    trace->network_passes = 0;
    rates.assign(img.num_pixels(), 0.0);
  }

  for (size_t st = 0; st < sched.num_steps(); ++st) {
    const auto step = sched.step(st);
    const size_t count = step.size();
    contexts.resize(count * in);
    raw.resize(count * m);
    for (size_t k = 0; k < count; ++k) {
      const int64_t p = step[k];
      BuildContext(image_n, int(p / width), int(p % width), net_.taps(),
                   sched.substitutions_for(p), contexts.data() + k * in);
    }
    net_.EvaluateContexts(contexts, count, raw);
    for (size_t k = 0; k < count; ++k) {
      const int64_t p = step[k];
      std::span<const float> pixel_raw(raw.data() + k * m, m);
      PixelParams params = Activate(pixel_raw, cfg);
      const auto sym = CodePixel(
          params, cfg.distribution,
          [&](int, const QuantizedCdf& cdf, const Pmf& pmf) {
            const int s = dec.DecodeSymbol(cdf);
            if (trace != nullptr) rates[p] += RateOf(pmf, s);
            return s;
          });
      for (int ch = 0; ch < 3; ++ch) {
        img.pixels[size_t(p) * 3 + ch] = uint8_t(sym[ch]);
        image_n.values[size_t(p) * 3 + ch] = NormalizeIntensity(uint8_t(sym[ch]));
      }
      if (trace != nullptr) {
        std::copy(pixel_raw.begin(), pixel_raw.end(),
                  trace->raw.begin() + size_t(p) * m);
      }
    }
    if (trace != nullptr) ++trace->network_passes;
  }
  if (dec.bytes_consumed() != c.payload.size()) {
    throw CorruptStreamError("payload has trailing bytes");
  }
  if (trace != nullptr) trace->ideal_bits = SumInRasterOrder(rates);
  return img;
}

double Codec::TheoreticalBpsp(const Image& img, ScheduleMode mode) const {
  CheckImage(img);
  const ModelConfig& cfg = config();
  const std::vector<float> raw = RawParameters(img, mode);
  const size_t m = cfg.outputs();
  const int64_t n = int64_t(img.num_pixels());
  std::vector<double> rates(n, 0.0);
#pragma omp parallel for schedule(static)
  for (int64_t p = 0; p < n; ++p) {
    PixelParams params =
        Activate(std::span<const float>(raw.data() + size_t(p) * m, m), cfg);
    const uint8_t* px = img.pixels.data() + size_t(p) * 3;
    CodePixel<false>(params, cfg.distribution,
                     [&](int ch, const QuantizedCdf&, const Pmf& pmf) {
                rates[p] += RateOf(pmf, px[ch]);
                return int(px[ch]);
              });
  }
  return SumInRasterOrder(rates) / (3.0 * double(n));
}

Container Encode(const Image& img, const Weights& w, ScheduleMode mode) {
  return Codec(w).Encode(img, mode);
}

Image Decode(const Container& c, const Weights& w) { return Codec(w).Decode(c); }

double TheoreticalBpsp(const Image& img, const Weights& w, ScheduleMode mode) {
  return Codec(w).TheoreticalBpsp(img, mode);
}

double Bpsp(const Container& c) {
  return 8.0 * double(c.payload.size()) / (3.0 * double(c.width) * double(c.height));
}

}  // namespace lpic
