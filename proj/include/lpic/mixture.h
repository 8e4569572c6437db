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

#ifndef LPIC_MIXTURE_H_
#define LPIC_MIXTURE_H_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "lpic/model.h"

namespace lpic {

enum class SubPixel { kRed = 0, kGreen = 1, kBlue = 2 };

inline constexpr double kScaleLogMin = -7.0;
inline constexpr double kScaleLogMax = 7.0;
// Half-width of one intensity bin in the normalized domain.
inline constexpr double kBinHalfWidth = 1.0 / 255.0;

struct ChannelMixture {
  std::vector<double> weights;  // softmax probabilities
  std::vector<double> means;    // normalized domain
  std::vector<double> scales;   // normalized domain, in [e^-7, e^7]
};

// Per-pixel mixture parameters. alpha/beta/gamma are per mixture component.
struct PixelParams {
  std::array<ChannelMixture, 3> channel;
  std::vector<double> alpha, beta, gamma;
};

// Raw layout of the network output, K entries per group:
//   [logits r|g|b, means r|g|b, log-scales r|g|b, alpha|beta|gamma]
struct RawLayout {
  int k;
  int logit(int ch, int i) const { return ch * k + i; }
  int mean(int ch, int i) const { return 3 * k + ch * k + i; }
  int log_scale(int ch, int i) const { return 6 * k + ch * k + i; }
  int alpha(int i) const { return 9 * k + i; }
  int beta(int i) const { return 10 * k + i; }
  int gamma(int i) const { return 11 * k + i; }
};

// Throws NumericError on non-finite input and DimensionError if raw does not
// hold 12 * K values.
PixelParams Activate(std::span<const float> raw, const ModelConfig& cfg);

// Green means shift by alpha * r; blue by beta * r + gamma * g.
PixelParams UpdateMeans(const PixelParams& p, double r_n, double g_n);
void UpdateMeansInPlace(PixelParams& p, double r_n, double g_n);

// Standard CDF of the selected distribution.
double StandardCdf(double u, Distribution dist);
double StandardPdf(double u, Distribution dist);

// Mass of intensity x under one component. The lowest bin extends to -inf
// and the highest to +inf, so the 256 masses sum to one.
double BinProbability(int x, double mean, double scale, Distribution dist);

using Pmf = std::array<double, 256>;

Pmf MixturePmf(const ChannelMixture& m, Distribution dist);
inline Pmf ChannelPmf(const PixelParams& p, SubPixel ch, Distribution dist) {
  return MixturePmf(p.channel[int(ch)], dist);
}

inline constexpr uint32_t kCdfBits = 16;
inline constexpr uint32_t kCdfTotal = 1u << kCdfBits;

struct QuantizedCdf {
  std::array<uint32_t, 257> cumulative{};

  uint32_t low(int sym) const { return cumulative[sym]; }
  uint32_t high(int sym) const { return cumulative[sym + 1]; }
  uint32_t mass(int sym) const { return high(sym) - low(sym); }
};

// Scales to kCdfTotal - 256, floors, adds one to every symbol and hands the
// remaining units to the largest remainders (ties to the lower symbol).
// Throws NumericError on NaN or negative entries.
QuantizedCdf QuantizeCdf(const Pmf& pmf);

bool IsValidCdf(const QuantizedCdf& cdf);

// Normalized value of intensity x, as used for mean updates.
inline double NormalizedValue(int x) { return x / 127.5 - 1.0; }

}  // namespace lpic

#endif  // LPIC_MIXTURE_H_
