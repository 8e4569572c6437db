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

#include "lpic/mixture.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lpic/errors.h"

namespace lpic {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Upper bin edges of intensities 0..254 in the normalized domain.
const std::array<double, 255>& UpperEdges() {
  static const std::array<double, 255> edges = [] {
    std::array<double, 255> e{};
    for (int x = 0; x < 255; ++x) e[x] = NormalizedValue(x) + kBinHalfWidth;
    return e;
  }();
  return edges;
}

}  // namespace

PixelParams Activate(std::span<const float> raw, const ModelConfig& cfg) {
  const int k = cfg.mixtures;
  if (int(raw.size()) != cfg.outputs()) {
    throw DimensionError("raw parameter vector has " +
                         std::to_string(raw.size()) + " values, expected " +
                         std::to_string(cfg.outputs()));
  }
  for (float v : raw) {
    if (!std::isfinite(v)) throw NumericError("non-finite raw parameter");
  }
  const RawLayout lay{k};
  PixelParams p;
  for (int ch = 0; ch < 3; ++ch) {
    ChannelMixture& m = p.channel[ch];
    m.weights.resize(k);
    m.means.resize(k);
    m.scales.resize(k);
    double top = raw[lay.logit(ch, 0)];
    for (int i = 1; i < k; ++i) top = std::max(top, double(raw[lay.logit(ch, i)]));
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
      m.weights[i] = std::exp(double(raw[lay.logit(ch, i)]) - top);
      sum += m.weights[i];
    }
    for (int i = 0; i < k; ++i) {
      m.weights[i] /= sum;
      m.means[i] = raw[lay.mean(ch, i)];
      m.scales[i] = std::exp(std::clamp(double(raw[lay.log_scale(ch, i)]),
                                        kScaleLogMin, kScaleLogMax));
    }
  }
  p.alpha.resize(k);
  p.beta.resize(k);
  p.gamma.resize(k);
  for (int i = 0; i < k; ++i) {
    p.alpha[i] = std::tanh(double(raw[lay.alpha(i)]));
    p.beta[i] = std::tanh(double(raw[lay.beta(i)]));
    p.gamma[i] = std::tanh(double(raw[lay.gamma(i)]));
  }
  return p;
}

void UpdateMeansInPlace(PixelParams& p, double r_n, double g_n) {
  ChannelMixture& g = p.channel[1];
  ChannelMixture& b = p.channel[2];
  for (size_t i = 0; i < g.means.size(); ++i) {
    g.means[i] += p.alpha[i] * r_n;
    b.means[i] += p.beta[i] * r_n + p.gamma[i] * g_n;
  }
}

PixelParams UpdateMeans(const PixelParams& p, double r_n, double g_n) {
  PixelParams out = p;
  UpdateMeansInPlace(out, r_n, g_n);
  return out;
}

double StandardCdf(double u, Distribution dist) {
  if (dist == Distribution::kGaussian) {
    // Beyond |u| = 40 erfc already saturates to exactly 0 or 2.
    if (u > 40.0) return 1.0;
    if (u < -40.0) return 0.0;
    return 0.5 * std::erfc(-u * kInvSqrt2);
  }
  if (u > 40.0) return 1.0;
  if (u < -745.0) return 0.0;
  return 1.0 / (1.0 + std::exp(-u));
}

double StandardPdf(double u, Distribution dist) {
  if (dist == Distribution::kGaussian) return kInvSqrt2Pi * std::exp(-0.5 * u * u);
  const double a = std::abs(u);
  if (a > 745.0) return 0.0;
  const double e = std::exp(-a);
  return e / ((1.0 + e) * (1.0 + e));
}

double BinProbability(int x, double mean, double scale, Distribution dist) {
  const double center = NormalizedValue(x);
  const bool has_lower = x > 0;
  const bool has_upper = x < 255;
  const double u_lo = (center - kBinHalfWidth - mean) / scale;
  const double u_hi = (center + kBinHalfWidth - mean) / scale;
  if (!has_lower && !has_upper) return 1.0;
  if (!has_lower) return StandardCdf(u_hi, dist);
  if (!has_upper) return StandardCdf(-u_lo, dist);
  // Evaluate in whichever tail keeps the subtraction well conditioned.
  if (u_lo > 0.0) return StandardCdf(-u_lo, dist) - StandardCdf(-u_hi, dist);
  return StandardCdf(u_hi, dist) - StandardCdf(u_lo, dist);
}

Pmf MixturePmf(const ChannelMixture& m, Distribution dist) {
  const auto& edges = UpperEdges();
  Pmf pmf{};
  for (size_t i = 0; i < m.weights.size(); ++i) {
    const double w = m.weights[i];
    const double mu = m.means[i];
    const double inv_s = 1.0 / m.scales[i];
    double prev = 0.0;
    for (int x = 0; x < 255; ++x) {
      const double cur = StandardCdf((edges[x] - mu) * inv_s, dist);
      pmf[x] += w * (cur - prev);
      prev = cur;
    }
    pmf[255] += w * (1.0 - prev);
  }
  return pmf;
}

QuantizedCdf QuantizeCdf(const Pmf& pmf) {
  double sum = 0.0;
  for (double p : pmf) {
    if (std::isnan(p)) throw NumericError("NaN in pmf");
    if (p < 0.0) throw NumericError("negative pmf entry");
    sum += p;
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    throw NumericError("pmf has no finite positive mass");
  }
  constexpr double kSpread = double(kCdfTotal - 256);
  std::array<uint32_t, 256> mass{};
  std::array<double, 256> remainder{};
  uint64_t assigned = 0;
  for (int s = 0; s < 256; ++s) {
    const double scaled = pmf[s] / sum * kSpread;
    const double fl = std::floor(scaled);
    mass[s] = uint32_t(fl) + 1;
    remainder[s] = scaled - fl;
    assigned += mass[s];
  }
  if (assigned > kCdfTotal) throw NumericError("pmf quantization overflow");
  uint64_t deficit = kCdfTotal - assigned;
  for (; deficit >= 256; deficit -= 256) {
    for (uint32_t& v : mass) ++v;
  }
  if (deficit > 0) {
    // Largest remainders first, ties to the lower symbol.
    std::array<int, 256> order;
    std::iota(order.begin(), order.end(), 0);
    const auto before = [&](int a, int b) {
      if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
      return a < b;
    };
    std::nth_element(order.begin(), order.begin() + deficit, order.end(), before);
    for (size_t i = 0; i < deficit; ++i) ++mass[order[i]];
  }
  QuantizedCdf cdf;
  cdf.cumulative[0] = 0;
  for (int s = 0; s < 256; ++s) cdf.cumulative[s + 1] = cdf.cumulative[s] + mass[s];
  return cdf;
}

bool IsValidCdf(const QuantizedCdf& cdf) {
  if (cdf.cumulative[0] != 0 || cdf.cumulative[256] != kCdfTotal) return false;
  for (int s = 0; s < 256; ++s) {
    if (cdf.cumulative[s + 1] <= cdf.cumulative[s]) return false;
  }
  return true;
}

}  // namespace lpic
