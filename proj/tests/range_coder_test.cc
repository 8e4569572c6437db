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
#include <random>

#include "lpic/errors.h"
#include "lpic/mixture.h"
#include "lpic/range_coder.h"

namespace lpic {
namespace {

Pmf UniformPmf() {
  Pmf p;
  p.fill(1.0 / 256);
  return p;
}

Pmf RandomPmf(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mean(-1.2, 1.2), ls(-6.5, 0.5);
  ChannelMixture m{{0.6, 0.4}, {mean(rng), mean(rng)}, {std::exp(ls(rng)), std::exp(ls(rng))}};
  return MixturePmf(m, Distribution::kLogistic);
}

int Sample(const Pmf& pmf, std::mt19937_64& rng) {
  std::discrete_distribution<int> d(pmf.begin(), pmf.end());
  return d(rng);
}

TEST(RangeCoderTest, UniformSymbolsCostAboutOneByteEach) {
  std::mt19937_64 rng(1);
  const QuantizedCdf cdf = QuantizeCdf(UniformPmf());
  std::vector<int> syms(1000);
  RangeEncoder enc;
  for (int& s : syms) enc.EncodeSymbol(s = int(rng() % 256), cdf);
  const auto bytes = enc.Finish();
  EXPECT_GE(bytes.size(), 1000u);
  EXPECT_LE(bytes.size(), 1004u);
  RangeDecoder dec(bytes);
  for (int s : syms) ASSERT_EQ(dec.DecodeSymbol(cdf), s);
  EXPECT_EQ(dec.bytes_consumed(), bytes.size());
}

TEST(RangeCoderTest, SpikedZerosAreTiny) {
  Pmf pmf{};
  pmf[0] = 1.0;
  const QuantizedCdf cdf = QuantizeCdf(pmf);
  RangeEncoder enc;
  for (int i = 0; i < 1000; ++i) enc.EncodeSymbol(0, cdf);
  const auto bytes = enc.Finish();
  EXPECT_LE(bytes.size(), 10u);
  RangeDecoder dec(bytes);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(dec.DecodeSymbol(cdf), 0);
}

TEST(RangeCoderTest, EmptyStreamRoundTrips) {
  RangeEncoder enc;
  const auto bytes = enc.Finish();
  EXPECT_EQ(bytes.size(), 4u);
  RangeDecoder dec(bytes);
  EXPECT_EQ(dec.bytes_consumed(), 4u);
}

TEST(RangeCoderTest, LongMixedSequenceRoundTripsNearIdealLength) {
  std::mt19937_64 rng(2);
  const int n = 120000;
  std::vector<QuantizedCdf> cdfs;
  std::vector<Pmf> pmfs;
  for (int i = 0; i < 64; ++i) {
    pmfs.push_back(RandomPmf(rng));
    cdfs.push_back(QuantizeCdf(pmfs.back()));
  }
  std::vector<int> syms(n), which(n);
  double ideal_bits = 0.0;
  RangeEncoder enc;
  for (int i = 0; i < n; ++i) {
    which[i] = int(rng() % 64);
    // Mostly model-distributed symbols, some arbitrary ones.
    syms[i] = (i % 50 == 0) ? int(rng() % 256) : Sample(pmfs[which[i]], rng);
    ideal_bits += RateOf(cdfs[which[i]], syms[i]);
    enc.EncodeSymbol(syms[i], cdfs[which[i]]);
  }
  const auto bytes = enc.Finish();
  EXPECT_LE(double(bytes.size()), ideal_bits / 8.0 * 1.001 + 32.0);
  RangeDecoder dec(bytes);
  for (int i = 0; i < n; ++i) ASSERT_EQ(dec.DecodeSymbol(cdfs[which[i]]), syms[i]) << i;
  EXPECT_EQ(dec.bytes_consumed(), bytes.size());
}

TEST(RangeCoderTest, StreamWithinTheoreticalBoundOnRandomSequences) {
  std::mt19937_64 rng(3);
  for (int seq = 0; seq < 100; ++seq) {
    const int n = 200 + int(rng() % 2000);
    double ideal = 0.0;
    RangeEncoder enc;
    std::vector<std::pair<int, QuantizedCdf>> coded;
    for (int i = 0; i < n; ++i) {
      const Pmf pmf = (i % 7 == 0) ? UniformPmf() : RandomPmf(rng);
      const int s = Sample(pmf, rng);
      ideal += RateOf(pmf, s);
      const QuantizedCdf cdf = QuantizeCdf(pmf);
      enc.EncodeSymbol(s, cdf);
      coded.push_back({s, cdf});
    }
    const auto bytes = enc.Finish();
    EXPECT_LE(double(bytes.size()), ideal / 8.0 + 32.0) << seq;
    RangeDecoder dec(bytes);
    for (const auto& [s, cdf] : coded) ASSERT_EQ(dec.DecodeSymbol(cdf), s);
  }
}

TEST(RangeCoderTest, CarryPropagation) {
  // Repeatedly coding the top symbol of a skewed table drives low toward the
  // 2^32 boundary, exercising carries through runs of 0xFF.
  Pmf pmf{};
  pmf[255] = 1.0 - 1e-9;
  pmf[0] = 1e-9;
  const QuantizedCdf cdf = QuantizeCdf(pmf);
  std::mt19937_64 rng(4);
  std::vector<int> syms;
  RangeEncoder enc;
  for (int i = 0; i < 50000; ++i) {
    const int s = (rng() % 97 == 0) ? int(rng() % 256) : 255;
    syms.push_back(s);
    enc.EncodeSymbol(s, cdf);
  }
  const auto bytes = enc.Finish();
  RangeDecoder dec(bytes);
  for (int s : syms) ASSERT_EQ(dec.DecodeSymbol(cdf), s);
  EXPECT_EQ(dec.bytes_consumed(), bytes.size());
}

TEST(RangeCoderTest, Deterministic) {
  std::mt19937_64 a(5), b(5);
  auto run = [](std::mt19937_64& rng) {
    RangeEncoder enc;
    for (int i = 0; i < 5000; ++i) enc.EncodeSymbol(int(rng() % 256), QuantizeCdf(RandomPmf(rng)));
    return enc.Finish();
  };
  EXPECT_EQ(run(a), run(b));
}

TEST(RangeCoderTest, TruncatedStreamThrows) {
  std::mt19937_64 rng(6);
  const QuantizedCdf cdf = QuantizeCdf(UniformPmf());
  RangeEncoder enc;
  for (int i = 0; i < 100; ++i) enc.EncodeSymbol(int(rng() % 256), cdf);
  auto bytes = enc.Finish();
  bytes.resize(bytes.size() / 2);
  RangeDecoder dec(bytes);
  EXPECT_THROW(
      {
        for (int i = 0; i < 100; ++i) dec.DecodeSymbol(cdf);
      },
      CorruptStreamError);
  EXPECT_THROW(RangeDecoder(std::span<const uint8_t>(bytes).first(3)), CorruptStreamError);
}

TEST(RangeCoderTest, ArbitraryBytesDecodeToSymbols) {
  // Every symbol mass is at least one, so any stream decodes to something or
  // fails with a corrupt-stream error; it never crashes or loops.
  std::mt19937_64 rng(7);
  const QuantizedCdf cdf = QuantizeCdf(RandomPmf(rng));
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<uint8_t> junk(16 + rng() % 64);
    for (uint8_t& v : junk) v = uint8_t(rng());
    RangeDecoder dec(junk);
    try {
      for (int i = 0; i < 1000; ++i) {
        const int s = dec.DecodeSymbol(cdf);
        ASSERT_GE(s, 0);
        ASSERT_LT(s, 256);
      }
    } catch (const CorruptStreamError&) {
    }
  }
}

TEST(RateOfTest, Values) {
  EXPECT_DOUBLE_EQ(RateOf(UniformPmf(), 17), 8.0);
  Pmf half{};
  half[3] = 0.5;
  half[4] = 0.5;
  EXPECT_DOUBLE_EQ(RateOf(half, 3), 1.0);
  EXPECT_NEAR(RateOf(half, 9), -std::log2(kProbabilityFloor), 1e-9);
  EXPECT_DOUBLE_EQ(RateOf(QuantizeCdf(UniformPmf()), 200), 8.0);
}

}  // namespace
}  // namespace lpic
