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

#include "lpic/trainer.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>

#include "lpic/errors.h"
#include "lpic/image_io.h"
#include "lpic/mixture.h"

namespace lpic {

namespace {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using RowVec = Eigen::Matrix<T, 1, Eigen::Dynamic>;

constexpr double kInvLn2 = 1.4426950408889634074;
constexpr double kBinFloor = 1e-12;

uint64_t Mix(uint64_t h, uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

double LogSumExp(const double* v, int n) {
  double top = v[0];
  for (int i = 1; i < n; ++i) top = std::max(top, v[i]);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += std::exp(v[i] - top);
  return top + std::log(s);
}

// -log2 P(r, g, b | raw) for one pixel with ground-truth conditioning, and
// optionally its gradient with respect to the raw outputs.
double PixelNll(const double* raw, const uint8_t* px, const ModelConfig& cfg,
                double* d_raw, uint64_t* sig) {
  const int k = cfg.mixtures;
  const RawLayout lay{k};
  const Distribution dist = cfg.distribution;
  const double r_n = NormalizedValue(px[0]);
  const double g_n = NormalizedValue(px[1]);

  double alpha[32], beta[32], gamma[32];
  double d_alpha[32] = {}, d_beta[32] = {}, d_gamma[32] = {};
  for (int i = 0; i < k; ++i) {
    alpha[i] = std::tanh(raw[lay.alpha(i)]);
    beta[i] = std::tanh(raw[lay.beta(i)]);
    gamma[i] = std::tanh(raw[lay.gamma(i)]);
  }

  double nats = 0.0;
  double logits[32], log_mix[32], mean[32], scale[32], bin[32];
  bool floored[32], scale_active[32];
  for (int ch = 0; ch < 3; ++ch) {
    const int x = px[ch];
    for (int i = 0; i < k; ++i) logits[i] = raw[lay.logit(ch, i)];
    const double lse_logits = LogSumExp(logits, k);
    for (int i = 0; i < k; ++i) {
      double mu = raw[lay.mean(ch, i)];
      if (ch == 1) mu += alpha[i] * r_n;
      if (ch == 2) mu += beta[i] * r_n + gamma[i] * g_n;
      const double rho = raw[lay.log_scale(ch, i)];
      scale_active[i] = rho > kScaleLogMin && rho < kScaleLogMax;
      const double s = std::exp(std::clamp(rho, kScaleLogMin, kScaleLogMax));
      const double b = BinProbability(x, mu, s, dist);
      floored[i] = !(b >= kBinFloor);
      mean[i] = mu;
      scale[i] = s;
      bin[i] = floored[i] ? kBinFloor : b;
      log_mix[i] = logits[i] - lse_logits + std::log(bin[i]);
      if (sig != nullptr) {
        *sig = Mix(*sig, (floored[i] ? 1u : 0u) | (scale_active[i] ? 2u : 0u) |
                             (rho >= kScaleLogMax ? 4u : 0u));
      }
    }
    const double log_p = LogSumExp(log_mix, k);
    nats -= log_p;
    if (d_raw == nullptr) continue;

    for (int i = 0; i < k; ++i) {
      const double q = std::exp(log_mix[i] - log_p);
      const double pi = std::exp(logits[i] - lse_logits);
      d_raw[lay.logit(ch, i)] = (pi - q) * kInvLn2;
      double g_mu = 0.0, g_rho = 0.0;
      if (!floored[i]) {
        const double s = scale[i];
        const double center = NormalizedValue(x);
        double f_lo = 0.0, uf_lo = 0.0, f_hi = 0.0, uf_hi = 0.0;
        if (x > 0) {
          const double u = (center - kBinHalfWidth - mean[i]) / s;
          f_lo = StandardPdf(u, dist);
          uf_lo = u * f_lo;
        }
        if (x < 255) {
          const double u = (center + kBinHalfWidth - mean[i]) / s;
          f_hi = StandardPdf(u, dist);
          uf_hi = u * f_hi;
        }
        const double w = -q / bin[i] * kInvLn2;
        g_mu = w * (-(f_hi - f_lo) / s);
        if (scale_active[i]) g_rho = w * (-(uf_hi - uf_lo));
      }
      d_raw[lay.mean(ch, i)] = g_mu;
      d_raw[lay.log_scale(ch, i)] = g_rho;
      if (ch == 1) d_alpha[i] += g_mu * r_n;
      if (ch == 2) {
        d_beta[i] += g_mu * r_n;
        d_gamma[i] += g_mu * g_n;
      }
    }
  }
  if (d_raw != nullptr) {
    for (int i = 0; i < k; ++i) {
      d_raw[lay.alpha(i)] = d_alpha[i] * (1.0 - alpha[i] * alpha[i]);
      d_raw[lay.beta(i)] = d_beta[i] * (1.0 - beta[i] * beta[i]);
      d_raw[lay.gamma(i)] = d_gamma[i] * (1.0 - gamma[i] * gamma[i]);
    }
  }
  return nats * kInvLn2;
}

template <typename T>
Mat<T> GatherContexts(const Image& img, const ModelConfig& cfg) {
  const std::vector<TapOffset> taps = CausalTaps(cfg.kernel_half);
  Mat<T> a0(int(img.num_pixels()), cfg.context_size());
  for (int row = 0; row < img.height; ++row) {
    for (int col = 0; col < img.width; ++col) {
      T* out = a0.row(row * img.width + col).data();
      for (const TapOffset& t : taps) {
        const int r = row + t.dy, c = col + t.dx;
        const bool inside = r >= 0 && c >= 0 && c < img.width;
        for (int ch = 0; ch < 3; ++ch) {
          *out++ = inside ? T(NormalizeIntensity(img.at(r, c, ch))) : T(0);
        }
      }
    }
  }
  return a0;
}

// Sum of per-pixel bits over one image; grad (if given) receives the
// gradient of `scale` times that sum.
template <typename T>
double ImageLossAndGrad(const Image& img, const ModelConfig& cfg,
                        const ParamSet<T>& params, ParamSet<T>* grad,
                        double scale, uint64_t* sig) {
  const int layers = cfg.layers;
  const int pixels = int(img.num_pixels());
  const int m = cfg.outputs();
  const Mat<T> a0 = GatherContexts<T>(img, cfg);

  // Aligned, Eigen-owned copies of the parameters.
  std::vector<Mat<T>> weights(layers);
  std::vector<RowVec<T>> biases(layers);
  for (int k = 0; k < layers; ++k) {
    const int in = k == 0 ? cfg.context_size() : cfg.filters;
    const int out = k + 1 == layers ? m : cfg.filters;
    weights[k] = Eigen::Map<const Mat<T>>(params.kernel[k].data(), out, in);
    biases[k] = Eigen::Map<const RowVec<T>>(params.bias[k].data(), out);
  }

  std::vector<Mat<T>> z(layers), act(layers - 1);
  for (int k = 0; k < layers; ++k) {
    const Mat<T>& w = weights[k];
    const RowVec<T>& b = biases[k];
    const Mat<T>& input = k == 0 ? a0 : act[k - 1];
    z[k].noalias() = input * w.transpose();
    z[k].rowwise() += b;
    if (k + 1 < layers) {
      act[k] = z[k].unaryExpr(
          [](T v) { return v >= T(0) ? v : T(kLeakySlope) * v; });
      if (sig != nullptr) {
        for (Eigen::Index i = 0; i < z[k].size(); ++i) {
          *sig = Mix(*sig, z[k].data()[i] >= T(0) ? 1u : 0u);
        }
      }
    }
  }

  const Mat<T>& raw = z.back();
  Mat<T> d_out;
  if (grad != nullptr) d_out.resize(pixels, m);
  std::vector<double> raw_d(m), d_raw(m);
  double bits = 0.0;
  for (int p = 0; p < pixels; ++p) {
    for (int j = 0; j < m; ++j) raw_d[j] = double(raw(p, j));
    bits += PixelNll(raw_d.data(), img.pixels.data() + size_t(p) * 3, cfg,
                     grad != nullptr ? d_raw.data() : nullptr, sig);
    if (grad != nullptr) {
      for (int j = 0; j < m; ++j) d_out(p, j) = T(d_raw[j] * scale);
    }
  }
  if (grad == nullptr) return bits;

  Mat<T> dz = std::move(d_out);
  for (int k = layers - 1; k >= 0; --k) {
    const int out = k + 1 == layers ? m : cfg.filters;
    const Mat<T>& input = k == 0 ? a0 : act[k - 1];
    const Mat<T> gw = dz.transpose() * input;
    std::copy_n(gw.data(), gw.size(), grad->kernel[k].data());
    std::vector<T>& gb = grad->bias[k];
    std::fill(gb.begin(), gb.end(), T(0));
    for (int p = 0; p < pixels; ++p) {
      for (int j = 0; j < out; ++j) gb[j] += dz(p, j);
    }
    if (k == 0) break;
    Mat<T> da = dz * weights[k];
    const Mat<T>& zin = z[k - 1];
    dz = da.binaryExpr(zin, [](T d, T v) { return v >= T(0) ? d : T(kLeakySlope) * d; });
  }
  return bits;
}

template <typename T>
void AddInto(ParamSet<T>& dst, const ParamSet<T>& src) {
  for (size_t k = 0; k < dst.kernel.size(); ++k) {
    for (size_t i = 0; i < dst.kernel[k].size(); ++i) dst.kernel[k][i] += src.kernel[k][i];
    for (size_t i = 0; i < dst.bias[k].size(); ++i) dst.bias[k][i] += src.bias[k][i];
  }
}

void CheckBatch(std::span<const Image> batch, const ModelConfig& cfg) {
  ValidateConfig(cfg);
  if (batch.empty()) throw DimensionError("batch is empty");
  for (const Image& img : batch) {
    if (!IsWellFormed(img)) throw DimensionError("batch holds a malformed image");
  }
}

// Mean bits per pixel over the batch. Per-image gradients are reduced in
// image order, so the result does not depend on the thread count.
template <typename T>
double BatchLossAndGrad(std::span<const Image> batch, const ModelConfig& cfg,
                        const ParamSet<T>& params, ParamSet<T>* grad,
                        uint64_t* sig) {
  CheckBatch(batch, cfg);
  size_t total = 0;
  for (const Image& img : batch) total += img.num_pixels();
  const double scale = 1.0 / double(total);
  const long n = long(batch.size());
  std::vector<double> bits(n, 0.0);
  std::vector<ParamSet<T>> grads;
  if (grad != nullptr) grads.assign(n, ZerosLike<T>(cfg));
  std::vector<uint64_t> sigs(n, 0);
#pragma omp parallel for schedule(dynamic) if (n > 1)
  for (long i = 0; i < n; ++i) {
    bits[i] = ImageLossAndGrad<T>(batch[i], cfg, params,
                                  grad != nullptr ? &grads[i] : nullptr, scale,
                                  sig != nullptr ? &sigs[i] : nullptr);
  }
  double sum = 0.0;
  for (long i = 0; i < n; ++i) {
    if (!std::isfinite(bits[i])) {
      throw NumericError("non-finite loss at batch index " + std::to_string(i));
    }
    sum += bits[i];
    if (sig != nullptr) *sig = Mix(*sig, sigs[i]);
  }
  if (grad != nullptr) {
    *grad = std::move(grads[0]);
    for (long i = 1; i < n; ++i) AddInto(*grad, grads[i]);
  }
  return sum * scale;
}

}  // namespace

void ValidateTrainConfig(const TrainConfig& tc, const ModelConfig& cfg) {
  ValidateConfig(cfg);
  if (tc.batch_size < 1) throw DimensionError("batch size must be positive");
  if (tc.crop < 2 * cfg.kernel_half + 1) {
    throw DimensionError("crop must be at least the kernel size");
  }
  if (!(tc.learning_rate > 0.0)) throw DimensionError("learning rate must be positive");
  if (tc.epochs < 0 || tc.decay_every < 1 || tc.steps_per_epoch < 0) {
    throw DimensionError("invalid epoch settings");
  }
}

double LearningRate(const TrainConfig& tc, int epoch) {
  return tc.learning_rate * std::pow(tc.lr_decay, double(epoch / tc.decay_every));
}

template <typename T>
size_t ParamSet<T>::size() const {
  size_t n = 0;
  for (size_t k = 0; k < kernel.size(); ++k) n += kernel[k].size() + bias[k].size();
  return n;
}

template <typename T>
T& ParamSet<T>::at(size_t flat) {
  for (size_t k = 0; k < kernel.size(); ++k) {
    if (flat < kernel[k].size()) return kernel[k][flat];
    flat -= kernel[k].size();
    if (flat < bias[k].size()) return bias[k][flat];
    flat -= bias[k].size();
  }
  throw DimensionError("parameter index out of range");
}

template <typename T>
T ParamSet<T>::at(size_t flat) const {
  return const_cast<ParamSet<T>*>(this)->at(flat);
}

template <typename T>
ParamSet<T> ToParamSet(const Weights& w) {
  ValidateWeights(w);
  ParamSet<T> p;
  for (const DenseLayer& l : w.layers) {
    p.kernel.emplace_back(l.weights.begin(), l.weights.end());
    p.bias.emplace_back(l.bias.begin(), l.bias.end());
  }
  return p;
}

Weights FromParamSet(const ModelConfig& cfg, const ParamSet<float>& p) {
  Weights w = ZeroWeights(cfg);
  if (p.kernel.size() != w.layers.size()) throw DimensionError("parameter set has wrong layer count");
  for (size_t k = 0; k < w.layers.size(); ++k) {
    if (p.kernel[k].size() != w.layers[k].weights.size() ||
        p.bias[k].size() != w.layers[k].bias.size()) {
      throw DimensionError("parameter set has wrong tensor shapes");
    }
    w.layers[k].weights = p.kernel[k];
    w.layers[k].bias = p.bias[k];
  }
  return w;
}

template <typename T>
ParamSet<T> ZerosLike(const ModelConfig& cfg) {
  return ToParamSet<T>(ZeroWeights(cfg));
}

template struct ParamSet<float>;
template struct ParamSet<double>;
template ParamSet<float> ToParamSet<float>(const Weights&);
template ParamSet<double> ToParamSet<double>(const Weights&);
template ParamSet<float> ZerosLike<float>(const ModelConfig&);
template ParamSet<double> ZerosLike<double>(const ModelConfig&);

double Loss(std::span<const Image> batch, const Weights& w) {
  return BatchLossAndGrad<float>(batch, w.config, ToParamSet<float>(w), nullptr, nullptr);
}

GradientSet Backward(std::span<const Image> batch, const Weights& w, double* loss) {
  GradientSet grad;
  const double l =
      BatchLossAndGrad<float>(batch, w.config, ToParamSet<float>(w), &grad, nullptr);
  if (loss != nullptr) *loss = l;
  return grad;
}

double ShadowLoss(std::span<const Image> batch, const ModelConfig& cfg,
                  const ParamSet<double>& params, const LossOptions& opt) {
  return BatchLossAndGrad<double>(batch, cfg, params, nullptr, opt.kink_signature);
}

ParamSet<double> ShadowBackward(std::span<const Image> batch, const ModelConfig& cfg,
                                const ParamSet<double>& params, double* loss) {
  ParamSet<double> grad;
  const double l = BatchLossAndGrad<double>(batch, cfg, params, &grad, nullptr);
  if (loss != nullptr) *loss = l;
  return grad;
}

AdamOptimizer::AdamOptimizer(const ModelConfig& cfg, double beta1, double beta2,
                             double epsilon)
    : beta1_(beta1),
      beta2_(beta2),
      epsilon_(epsilon),
      m_(ZerosLike<float>(cfg)),
      v_(ZerosLike<float>(cfg)) {}

void AdamOptimizer::Step(ParamSet<float>& params, const GradientSet& grad, double lr) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, double(t_));
  const double c2 = 1.0 - std::pow(beta2_, double(t_));
  auto update = [&](std::vector<float>& p, const std::vector<float>& g,
                    std::vector<float>& m, std::vector<float>& v) {
    for (size_t i = 0; i < p.size(); ++i) {
      const double gi = g[i];
      const double mi = beta1_ * m[i] + (1.0 - beta1_) * gi;
      const double vi = beta2_ * v[i] + (1.0 - beta2_) * gi * gi;
      m[i] = float(mi);
      v[i] = float(vi);
      p[i] = float(p[i] - lr * (mi / c1) / (std::sqrt(vi / c2) + epsilon_));
    }
  };
  for (size_t k = 0; k < params.kernel.size(); ++k) {
    update(params.kernel[k], grad.kernel[k], m_.kernel[k], v_.kernel[k]);
    update(params.bias[k], grad.bias[k], m_.bias[k], v_.bias[k]);
  }
}

TrainResult Train(std::span<const Image> dataset, const TrainConfig& tc,
                  const ModelConfig& cfg, const EpochCallback& on_epoch) {
  std::mt19937_64 init_rng(tc.seed);
  return Train(dataset, tc, InitializeWeights(cfg, init_rng), on_epoch);
}

TrainResult Train(std::span<const Image> dataset, const TrainConfig& tc,
                  Weights initial, const EpochCallback& on_epoch) {
  const ModelConfig cfg = initial.config;
  ValidateTrainConfig(tc, cfg);
  if (dataset.empty()) throw DimensionError("training dataset is empty");
  for (const Image& img : dataset) {
    if (!IsWellFormed(img)) throw DimensionError("dataset holds a malformed image");
    if (img.height < tc.crop || img.width < tc.crop) {
      throw DimensionError("crop " + std::to_string(tc.crop) +
                           " is larger than the smallest dataset image");
    }
  }
  std::mt19937_64 rng(tc.seed ^ 0x5851f42d4c957f2dull);
  ParamSet<float> params = ToParamSet<float>(initial);
  AdamOptimizer adam(cfg, tc.beta1, tc.beta2, tc.epsilon);

  const size_t n = dataset.size();
  const int steps = tc.steps_per_epoch > 0
                        ? tc.steps_per_epoch
                        : int((n + size_t(tc.batch_size) - 1) / size_t(tc.batch_size));
  std::vector<size_t> order(n);
  std::vector<Image> batch(size_t(tc.batch_size));
  TrainResult result;
  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    const double lr = LearningRate(tc, epoch);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (int step = 0; step < steps; ++step) {
      for (int b = 0; b < tc.batch_size; ++b) {
        const Image& src = dataset[order[(size_t(step) * tc.batch_size + b) % n]];
        std::uniform_int_distribution<int> ry(0, src.height - tc.crop);
        std::uniform_int_distribution<int> rx(0, src.width - tc.crop);
        const int y0 = ry(rng), x0 = rx(rng);
        Image& crop = batch[b];
        crop = Image(tc.crop, tc.crop);
        for (int r = 0; r < tc.crop; ++r) {
          std::copy_n(src.pixels.data() + (size_t(y0 + r) * src.width + x0) * 3,
                      size_t(tc.crop) * 3, crop.pixels.data() + size_t(r) * tc.crop * 3);
        }
      }
      GradientSet grad;
      loss_sum += BatchLossAndGrad<float>(batch, cfg, params, &grad, nullptr);
      adam.Step(params, grad, lr);
    }
    EpochStats stats{epoch, loss_sum / steps, loss_sum / steps / 3.0, lr};
    result.curve.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  result.weights = FromParamSet(cfg, params);
  return result;
}

std::vector<Image> LoadDataset(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error("dataset '" + dir + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (ext == ".ppm" || ext == ".png") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Image> images;
  for (const auto& f : files) images.push_back(LoadImage(f.string()));
  if (images.empty()) throw Error("dataset '" + dir + "' holds no .ppm or .png images");
  return images;
}

void WriteLossCurveCsv(const std::string& path, std::span<const EpochStats> curve) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "epoch,loss_bits_per_pixel,bpsp_estimate,lr\n";
  out << std::setprecision(9);
  for (const EpochStats& s : curve) {
    out << s.epoch << ',' << s.loss_bits_per_pixel << ',' << s.bpsp << ','
        << s.learning_rate << '\n';
  }
}

}  // namespace lpic
