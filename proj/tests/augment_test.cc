// tests/augment_test.cc

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

#include "svtk/augment.h"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "svtk/error.h"
#include "svtk/wav.h"
#include "test_util.h"

namespace svtk {
namespace {

Waveform Noise(std::size_t n, Rng &rng, double stddev = 0.1) {
  Waveform w;
  w.samples = testing::Gaussian(n, rng, stddev);
  return w;
}

double Power(const std::vector<double> &x) {
  double s = 0;
  for (double v : x) s += v * v;
  return s / static_cast<double>(x.size());
}

TEST(SpeedPerturb, IdentityAtOne) {
  Rng rng(1);
  const Waveform w = Noise(1234, rng);
  EXPECT_EQ(SpeedPerturb(w, 1.0), w);
}

TEST(SpeedPerturb, LengthFormula) {
  Waveform w;
  w.samples.assign(16000, 0.1);
  EXPECT_EQ(SpeedPerturb(w, 0.9).size(), 17778u);
  EXPECT_EQ(SpeedPerturb(w, 1.1).size(), 14545u);
  for (std::size_t n : {1u, 2u, 7u, 99u, 1000u, 16001u, 48000u})
    for (double f : {0.5, 0.9, 0.95, 1.0, 1.05, 1.1, 1.5, 2.0}) {
      w.samples.assign(n, 0.0);
      EXPECT_EQ(SpeedPerturb(w, f).size(),
                static_cast<std::size_t>(std::llround(static_cast<double>(n) / f)))
          << n << " " << f;
    }
  EXPECT_THROW(SpeedPerturb(w, 0.0), InvalidArgument);
  EXPECT_THROW(SpeedPerturb(w, -1.0), InvalidArgument);
}

TEST(SpeedPerturb, LinearInterpolationOfRamp) {
  Waveform w;
  for (int i = 0; i < 100; ++i) w.samples.push_back(i);
  const Waveform out = SpeedPerturb(w, 1.1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double pos = std::min(i * 1.1, 99.0);
    EXPECT_NEAR(out.samples[i], pos, 1e-9);
  }
}

TEST(Relabel, ClassCounts) {
  EXPECT_EQ(RelabelForSpeed(5994, 3), 17982);
  EXPECT_EQ(RelabelForSpeed(1, 1), 1);
  EXPECT_EQ(RelabelForSpeed(10, 3), 30);
  std::set<std::int64_t> ids;
  for (int s = 0; s < 10; ++s)
    for (int f = 0; f < 3; ++f) {
      const auto id = SpeedClassId(s, f, 3);
      EXPECT_GE(id, 0);
      EXPECT_LT(id, 30);
      ids.insert(id);
    }
  EXPECT_EQ(ids.size(), 30u);
}

TEST(MixAtSnr, GainExamples) {
  EXPECT_DOUBLE_EQ(SnrGain(1.0, 1.0, 0.0), 1.0);
  EXPECT_NEAR(SnrGain(1.0, 1.0, 20.0), 0.1, 1e-15);
  Waveform s, n;
  s.samples = {1, -1, 1, -1};
  n.samples = {1, 1, -1, -1};
  const Waveform m = MixAtSnr(s, n, 0.0);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(m.samples[i], s.samples[i] + n.samples[i]);
}

TEST(MixAtSnr, MeasuredSnrMatchesTarget) {
  Rng rng(2);
  for (int rep = 0; rep < 50; ++rep) {
    const Waveform s = Noise(static_cast<std::size_t>(UniformInt(rng, 100, 3000)), rng, 0.3);
    const Waveform n = Noise(static_cast<std::size_t>(UniformInt(rng, 50, 4000)), rng, 0.05);
    const double snr = UniformReal(rng, 0, 20);
    const Waveform m = MixAtSnr(s, n, snr);
    ASSERT_EQ(m.size(), s.size());
    std::vector<double> added(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) added[i] = m.samples[i] - s.samples[i];
    EXPECT_NEAR(10 * std::log10(Power(s.samples) / Power(added)), snr, 1e-6);
  }
}

TEST(MixAtSnr, NoiseIsTiledFromStart) {
  Waveform s, n;
  s.samples.assign(10, 1.0);
  n.samples = {1, 2, 3};
  const Waveform m = MixAtSnr(s, n, 0.0);
  const double tiled_power = (3 * 14.0 + 1) / 10.0;  // 1 2 3 1 2 3 1 2 3 1
  const double g2 = std::sqrt(1.0 / tiled_power);
  for (std::size_t i = 0; i < 10; ++i)
    EXPECT_NEAR(m.samples[i], 1.0 + g2 * n.samples[i % 3], 1e-12);
}

TEST(MixAtSnr, DegenerateInputs) {
  Rng rng(3);
  const Waveform s = Noise(100, rng);
  Waveform silent;
  silent.samples.assign(100, 0.0);
  try {
    MixAtSnr(s, silent, 5.0);
    FAIL();
  } catch (const InvalidArgument &e) {
    EXPECT_NE(std::string(e.what()).find("degenerate SNR"), std::string::npos);
  }
  EXPECT_THROW(MixAtSnr(silent, s, 5.0), InvalidArgument);
}

NoiseBank SpeechBank(int count, Rng &rng) {
  NoiseBank bank;
  for (int i = 0; i < count; ++i)
    bank.Add(NoiseCategory::kSpeech, Noise(static_cast<std::size_t>(200 + 37 * i), rng));
  return bank;
}

TEST(Babble, ForcedSelectionSumsAll) {
  Rng rng(4);
  const NoiseBank bank = SpeechBank(3, rng);
  Rng pick(9);
  const Waveform b = MakeBabble(bank, 3, 500, pick);
  ASSERT_EQ(b.size(), 500u);
  // Each entry is shorter than 500, so it is tiled from its start.
  for (std::size_t i = 0; i < 500; ++i) {
    double expect = 0;
    for (const Waveform &e : bank.Get(NoiseCategory::kSpeech)) expect += e.samples[i % e.size()];
    ASSERT_NEAR(b.samples[i], expect, 1e-12);
  }
}

TEST(Babble, DeterministicAndBounded) {
  Rng rng(5);
  const NoiseBank bank = SpeechBank(10, rng);
  Rng a(77), b(77);
  const Waveform x = MakeBabble(bank, 7, 1000, a), y = MakeBabble(bank, 7, 1000, b);
  EXPECT_EQ(x, y);
  EXPECT_GT(Power(x.samples), 0.0);
  Rng c(1);
  EXPECT_THROW(MakeBabble(bank, 8, 1000, c), InvalidArgument);
  EXPECT_THROW(MakeBabble(bank, 2, 1000, c), InvalidArgument);
  const NoiseBank small = SpeechBank(4, rng);
  EXPECT_THROW(MakeBabble(small, 5, 1000, c), InvalidArgument);
}

TEST(Reverb, UnitImpulseIsIdentity) {
  Rng rng(6);
  const Waveform w = Noise(3000, rng);
  Waveform rir;
  rir.samples = {1.0};
  const Waveform out = AddReverb(w, rir);
  ASSERT_EQ(out.size(), w.size());
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_NEAR(out.samples[i], w.samples[i], 1e-12);
}

TEST(Reverb, DelayedImpulseShiftsAndKeepsPeak) {
  Rng rng(7);
  const Waveform w = Noise(1000, rng);
  Waveform rir;
  rir.samples.assign(101, 0.0);
  rir.samples[100] = 0.5;
  const Waveform out = AddReverb(w, rir);
  double peak_in = 0, peak_shift = 0;
  for (double v : w.samples) peak_in = std::max(peak_in, std::abs(v));
  for (std::size_t i = 0; i < 900; ++i) peak_shift = std::max(peak_shift, std::abs(w.samples[i]));
  const double scale = peak_in / peak_shift;
  for (std::size_t i = 0; i < 100; ++i) EXPECT_NEAR(out.samples[i], 0.0, 1e-12);
  for (std::size_t i = 100; i < 1000; ++i)
    EXPECT_NEAR(out.samples[i], w.samples[i - 100] * scale, 1e-12);
}

TEST(Reverb, MatchesNaiveConvolution) {
  Rng rng(8);
  for (std::size_t rir_len : {5u, 300u, 2000u}) {
    const Waveform w = Noise(6000, rng);
    const Waveform rir = Noise(rir_len, rng);
    const std::vector<double> conv = testing::NaiveConvolve(w.samples, rir.samples, w.size());
    double peak_in = 0, peak_conv = 0;
    for (double v : w.samples) peak_in = std::max(peak_in, std::abs(v));
    for (double v : conv) peak_conv = std::max(peak_conv, std::abs(v));
    const Waveform out = AddReverb(w, rir);
    double peak_out = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      ASSERT_NEAR(out.samples[i], conv[i] * peak_in / peak_conv, 1e-6);
      peak_out = std::max(peak_out, std::abs(out.samples[i]));
    }
    EXPECT_NEAR(peak_out, peak_in, 1e-12);
  }
}

TEST(Reverb, SilentRirRejected) {
  Rng rng(9);
  Waveform rir;
  rir.samples.assign(10, 0.0);
  EXPECT_THROW(AddReverb(Noise(100, rng), rir), InvalidArgument);
  EXPECT_THROW(AddReverb(Noise(100, rng), Waveform{}), InvalidArgument);
}

NoiseBank FullBank(Rng &rng) {
  NoiseBank bank = SpeechBank(8, rng);
  bank.Add(NoiseCategory::kNoise, Noise(700, rng));
  bank.Add(NoiseCategory::kMusic, Noise(900, rng));
  Waveform rir = Noise(64, rng);
  rir.samples[0] = 1.0;
  bank.Add(NoiseCategory::kRir, rir);
  return bank;
}

TEST(Policy, AllDrawsFailGivesIdentity) {
  Rng rng(10);
  const NoiseBank bank = FullBank(rng);
  const Waveform w = Noise(2000, rng);
  AugmentPolicy p;
  bool found = false;
  for (std::uint64_t seed = 0; seed < 200 && !found; ++seed) {
    Rng r(seed);
    const AugmentResult res = ApplyPolicy(w, p, bank, r);
    if (!res.applied[0] && !res.applied[1] && !res.applied[2] && !res.applied[3]) {
      EXPECT_EQ(res.output, w);
      found = true;
    }
  }
  EXPECT_TRUE(found);
  p.p_noise = p.p_music = p.p_babble = p.p_reverb = 0.0;
  Rng r(1);
  EXPECT_EQ(ApplyPolicy(w, p, NoiseBank{}, r).output, w);
}

TEST(Policy, EmpiricalRates) {
  Rng rng(11);
  const NoiseBank bank = FullBank(rng);
  const Waveform w = Noise(400, rng);
  int counts[4] = {0, 0, 0, 0};
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    Rng r(StageSeed(seed, "augment"));
    const AugmentResult res = ApplyPolicy(w, AugmentPolicy{}, bank, r);
    for (int i = 0; i < 4; ++i) counts[i] += res.applied[i];
  }
  for (int c : counts) {
    EXPECT_GE(c / 10000.0, 0.18);
    EXPECT_LE(c / 10000.0, 0.22);
  }
}

TEST(Policy, SameSeedBitIdentical) {
  Rng rng(12);
  const NoiseBank bank = FullBank(rng);
  const Waveform w = Noise(3000, rng);
  AugmentPolicy p;
  p.p_noise = p.p_music = p.p_babble = p.p_reverb = 1.0;
  Rng a(5), b(5);
  const AugmentResult x = ApplyPolicy(w, p, bank, a), y = ApplyPolicy(w, p, bank, b);
  EXPECT_EQ(x.output, y.output);
  EXPECT_NE(x.output, w);
}

TEST(Policy, Validation) {
  AugmentPolicy p;
  EXPECT_NO_THROW(ValidatePolicy(p));
  p.p_music = 1.5;
  EXPECT_THROW(ValidatePolicy(p), InvalidArgument);
  p = AugmentPolicy{};
  p.snr_noise = {10, 5};
  EXPECT_THROW(ValidatePolicy(p), InvalidArgument);
  p = AugmentPolicy{};
  p.babble_speakers = {0, 3};
  EXPECT_THROW(ValidatePolicy(p), InvalidArgument);
  // A triggered augmentation with an empty category fails.
  p = AugmentPolicy{};
  p.p_noise = 1.0;
  Rng rng(1);
  Waveform w;
  w.samples.assign(100, 0.1);
  EXPECT_THROW(ApplyPolicy(w, p, NoiseBank{}, rng), InvalidArgument);
}

TEST(NoiseBank, ManifestLoading) {
  testing::TempDir dir;
  Rng rng(13);
  WriteWavFile(Noise(800, rng), dir.file("n.wav"));
  WriteWavFile(Noise(800, rng), dir.file("m.wav"));
  testing::WriteText(dir.file("manifest.txt"),
                     "# sources\nnoise n.wav\n\nmusic " + dir.file("m.wav") + "\n");
  const NoiseBank bank = LoadNoiseBank(dir.file("manifest.txt"));
  EXPECT_EQ(bank.Get(NoiseCategory::kNoise).size(), 1u);
  EXPECT_EQ(bank.Get(NoiseCategory::kMusic).size(), 1u);
  EXPECT_TRUE(bank.Get(NoiseCategory::kRir).empty());
  EXPECT_THROW(bank.Require(NoiseCategory::kRir), InvalidArgument);

  testing::WriteText(dir.file("bad.txt"), "drums n.wav\n");
  EXPECT_THROW(LoadNoiseBank(dir.file("bad.txt")), ParseError);
  testing::WriteText(dir.file("missing.txt"), "noise nothere.wav\n");
  EXPECT_THROW(LoadNoiseBank(dir.file("missing.txt")), IoError);
}

TEST(NoiseBank, RateMustAgree) {
  NoiseBank bank;
  Waveform a, b;
  a.samples = b.samples = {0.1, 0.2};
  b.sample_rate = 8000;
  bank.Add(NoiseCategory::kNoise, a);
  EXPECT_THROW(bank.Add(NoiseCategory::kMusic, b), InvalidArgument);
  EXPECT_THROW(bank.Add(NoiseCategory::kMusic, Waveform{}), InvalidArgument);
}

}  // namespace
}  // namespace svtk
