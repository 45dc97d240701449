// tests/features_test.cc

// Copyright 2026  The svtk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "svtk/features.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <set>
#include <sstream>

#include "svtk/error.h"
#include "svtk/wav.h"
#include "test_util.h"

namespace svtk {
namespace {

Waveform Sine(double hz, double seconds, double amp = 0.5, int rate = 16000) {
  Waveform w;
  w.sample_rate = rate;
  const auto n = static_cast<std::size_t>(seconds * rate);
  for (std::size_t i = 0; i < n; ++i)
    w.samples.push_back(amp * std::sin(2 * std::numbers::pi * hz * i / rate));
  return w;
}

TEST(LogMel, SilenceHitsFloor) {
  Waveform w;
  w.samples.assign(16000, 0.0);
  const MelFeatures f = ComputeLogMel(w);
  ASSERT_EQ(f.rows(), 80u);
  EXPECT_EQ(f.frames(), 98u);
  for (double v : f.data()) EXPECT_DOUBLE_EQ(v, std::log(1e-10));
  EXPECT_NEAR(std::log(1e-10), -23.0259, 1e-4);
}

TEST(LogMel, FrameCount) {
  const MelFilterbank bank(16000);
  EXPECT_EQ(bank.window_length(), 400);
  EXPECT_EQ(bank.hop_length(), 160);
  Rng rng(1);
  for (std::size_t len : {400u, 401u, 559u, 560u, 16000u, 16123u}) {
    Waveform w;
    w.samples = testing::Gaussian(len, rng, 0.1);
    EXPECT_EQ(bank.Compute(w).frames(), 1 + (len - 400) / 160) << len;
  }
  Waveform shortw;
  shortw.samples.assign(399, 0.1);
  try {
    bank.Compute(shortw);
    FAIL();
  } catch (const InvalidArgument &e) {
    EXPECT_NE(std::string(e.what()).find("too short"), std::string::npos);
  }
  EXPECT_NEAR(bank.Compute(Sine(100, 1)).frame_hop(), 0.01, 1e-12);
}

TEST(LogMel, PureToneLandsInNearestFilter) {
  // Independent HTK centers: 82 points equally spaced in mel over [0, 8000].
  const auto mel = [](double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); };
  const auto hz = [](double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); };
  int nearest = -1;
  double best = 1e9;
  for (int m = 0; m < 80; ++m) {
    const double c = hz(mel(8000.0) * (m + 1) / 81.0);
    if (std::abs(c - 1000.0) < best) {
      best = std::abs(c - 1000.0);
      nearest = m;
    }
  }
  const MelFeatures f = ComputeLogMel(Sine(1000.0, 1.0));
  for (std::size_t t = 0; t < f.frames(); ++t) {
    int arg = 0;
    for (int m = 1; m < 80; ++m)
      if (f(m, t) > f(arg, t)) arg = m;
    ASSERT_EQ(arg, nearest) << "frame " << t;
  }
}

TEST(LogMel, GainAddsLogSquare) {
  Rng rng(7);
  Waveform w;
  w.samples = testing::Gaussian(8000, rng, 0.1);
  Waveform w2 = w;
  for (double &s : w2.samples) s *= 2.0;
  const MelFeatures a = ComputeLogMel(w), b = ComputeLogMel(w2);
  const double floor = std::log(1e-10);
  for (std::size_t i = 0; i < a.data().size(); ++i)
    if (a.data()[i] > floor + 1.0) EXPECT_NEAR(b.data()[i] - a.data()[i], std::log(4.0), 1e-9);
}

TEST(LogMel, Deterministic) {
  Rng rng(8);
  Waveform w;
  w.samples = testing::Gaussian(5000, rng, 0.3);
  EXPECT_EQ(ComputeLogMel(w).data(), ComputeLogMel(w).data());
}

TEST(LogMel, FiltersSpanToNyquist) {
  const MelFilterbank bank(16000);
  const auto &c = bank.center_hz();
  ASSERT_EQ(c.size(), 80u);
  for (std::size_t i = 1; i < c.size(); ++i) EXPECT_GT(c[i], c[i - 1]);
  EXPECT_GT(c.front(), 0.0);
  EXPECT_LT(c.back(), 8000.0);
  // Triangles: weights in [0, 1], zero at DC for every filter but possibly the
  // first, zero at Nyquist for every filter.
  for (int m = 0; m < 80; ++m) {
    EXPECT_EQ(bank.weight(m, 256), 0.0);
    for (int k = 0; k <= 256; ++k) {
      EXPECT_GE(bank.weight(m, k), 0.0);
      EXPECT_LE(bank.weight(m, k), 1.0);
    }
  }
  EXPECT_NEAR(MelToHz(HzToMel(1234.5)), 1234.5, 1e-9);
  EXPECT_NEAR(HzToMel(700.0), 2595.0 * std::log10(2.0), 1e-12);
}

TEST(LogMel, RejectsRateMismatchAndNonFinite) {
  const MelFilterbank bank(16000);
  Waveform w = Sine(300, 0.1, 0.5, 8000);
  EXPECT_THROW(bank.Compute(w), InvalidArgument);
  w = Sine(300, 0.1);
  w.samples[5] = NAN;
  EXPECT_THROW(bank.Compute(w), InvalidArgument);
}

MelFeatures Matrix(std::size_t rows, std::size_t frames, const std::vector<double> &values) {
  MelFeatures f(rows, frames, 0.01);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t t = 0; t < frames; ++t) f(r, t) = values[r * frames + t];
  return f;
}

TEST(Cmn, ConstantBecomesZero) {
  const MelFeatures f = ApplyCmn(Matrix(2, 3, std::vector<double>(6, 5.0)));
  for (double v : f.data()) EXPECT_EQ(v, 0.0);
  EXPECT_TRUE(f.cmn_applied());
}

TEST(Cmn, SingleRow) {
  const MelFeatures f = ApplyCmn(Matrix(1, 3, {1, 2, 3}));
  EXPECT_EQ(f.data(), (std::vector<double>{-1, 0, 1}));
}

TEST(Cmn, RandomRowsZeroMeanAndIdempotent) {
  Rng rng(9);
  const MelFeatures once = ApplyCmn(Matrix(80, 200, testing::Gaussian(80 * 200, rng, 5.0)));
  for (std::size_t r = 0; r < 80; ++r) {
    double mean = 0;
    for (std::size_t t = 0; t < 200; ++t) mean += once(r, t);
    EXPECT_LE(std::abs(mean / 200), 1e-6);
  }
  MelFeatures copy = once;
  copy.set_cmn_applied(false);
  const MelFeatures twice = ApplyCmn(copy);
  for (std::size_t i = 0; i < once.data().size(); ++i)
    EXPECT_NEAR(twice.data()[i], once.data()[i], 1e-12);
}

Waveform Ramp(std::size_t n) {
  Waveform w;
  for (std::size_t i = 0; i < n; ++i) w.samples.push_back(static_cast<double>(i));
  return w;
}

TEST(CropOrPad, EqualLengthIsIdentity) {
  Rng rng(1);
  const Waveform w = Ramp(96000);
  EXPECT_EQ(CropOrPad(w, 6.0, rng), w);
}

TEST(CropOrPad, ShortInputRepeatsCyclically) {
  Rng rng(1);
  const Waveform w = Ramp(50000);
  const Waveform out = CropOrPad(w, 6.0, rng);
  ASSERT_EQ(out.size(), 96000u);
  for (std::size_t i = 0; i < out.size(); ++i) ASSERT_EQ(out.samples[i], double(i % 50000));
}

TEST(CropOrPad, LongInputIsSeededContiguousSlice) {
  const Waveform w = Ramp(100000);
  Rng a(42), b(42);
  const Waveform x = CropOrPad(w, 6.0, a), y = CropOrPad(w, 6.0, b);
  EXPECT_EQ(x, y);
  ASSERT_EQ(x.size(), 96000u);
  const double start = x.samples[0];
  EXPECT_LE(start, 4000.0);
  for (std::size_t i = 0; i < x.size(); ++i) ASSERT_EQ(x.samples[i], start + i);
  // Different seeds reach different offsets.
  std::set<double> starts;
  for (int s = 0; s < 20; ++s) {
    Rng r(s);
    starts.insert(CropOrPad(w, 6.0, r).samples[0]);
  }
  EXPECT_GT(starts.size(), 1u);
}

TEST(CropOrPad, ExactLengthForAllSizes) {
  Rng rng(3);
  for (std::size_t n = 1; n < 300; n += 7)
    for (std::size_t target : {1u, 17u, 100u, 257u})
      EXPECT_EQ(CropOrPadToLength(Ramp(n), target, rng).size(), target);
  EXPECT_THROW(CropOrPad(Waveform{}, 6.0, rng), InvalidArgument);
  EXPECT_THROW(CropOrPad(Ramp(10), 0.0, rng), InvalidArgument);
}

TEST(MelDump, RoundTrip) {
  Rng rng(4);
  Waveform w;
  w.samples = testing::Gaussian(4000, rng, 0.2);
  const MelFeatures f = ComputeLogMel(w);
  std::stringstream io;
  WriteMelFeatures(f, io);
  const std::string bytes = io.str();
  EXPECT_EQ(bytes.substr(0, 4), "MEL1");
  EXPECT_EQ(bytes.size(), 12 + 4 * f.rows() * f.frames());
  const MelFeatures back = ReadMelFeatures(io);
  ASSERT_EQ(back.rows(), f.rows());
  ASSERT_EQ(back.frames(), f.frames());
  for (std::size_t i = 0; i < f.data().size(); ++i)
    EXPECT_EQ(back.data()[i], static_cast<double>(static_cast<float>(f.data()[i])));
  std::istringstream bad("MELX");
  EXPECT_THROW(ReadMelFeatures(bad), FormatError);
  std::istringstream cut(bytes.substr(0, 30));
  EXPECT_THROW(ReadMelFeatures(cut), FormatError);
}

std::string WavBytes(int channels, int bits, int rate, int format, std::size_t frames) {
  std::string b;
  auto u32 = [&](std::uint32_t v) { for (int i = 0; i < 4; ++i) b.push_back(char(v >> (8 * i))); };
  auto u16 = [&](std::uint16_t v) { for (int i = 0; i < 2; ++i) b.push_back(char(v >> (8 * i))); };
  const std::uint32_t data = static_cast<std::uint32_t>(frames * channels * bits / 8);
  b += "RIFF";
  u32(36 + data);
  b += "WAVEfmt ";
  u32(16);
  u16(static_cast<std::uint16_t>(format));
  u16(static_cast<std::uint16_t>(channels));
  u32(static_cast<std::uint32_t>(rate));
  u32(static_cast<std::uint32_t>(rate * channels * bits / 8));
  u16(static_cast<std::uint16_t>(channels * bits / 8));
  u16(static_cast<std::uint16_t>(bits));
  b += "data";
  u32(data);
  b.append(data, '\0');
  return b;
}

TEST(Wav, RoundTripQuantizes) {
  Waveform w = Sine(440, 0.05, 0.7);
  std::stringstream io;
  WriteWav(w, io);
  const Waveform back = ReadWav(io);
  ASSERT_EQ(back.size(), w.size());
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_NEAR(back.samples[i], w.samples[i], 1.0 / 32768);
}

TEST(Wav, RejectsUnsupportedLayouts) {
  std::istringstream ok(WavBytes(1, 16, 16000, 1, 10));
  EXPECT_EQ(ReadWav(ok).size(), 10u);
  for (const std::string &bytes :
       {WavBytes(2, 16, 16000, 1, 10), WavBytes(1, 8, 16000, 1, 10),
        WavBytes(1, 16, 8000, 1, 10), WavBytes(1, 32, 16000, 3, 10), std::string("RIFX")}) {
    std::istringstream in(bytes);
    EXPECT_THROW(ReadWav(in), FormatError);
  }
  EXPECT_THROW(ReadWavFile("/nonexistent/a.wav"), IoError);
}

}  // namespace
}  // namespace svtk
