// src/augment.cc

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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "fft.h"
#include "svtk/error.h"
#include "svtk/wav.h"

namespace svtk {

Waveform SpeedPerturb(const Waveform &w, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw InvalidArgument("speed factor must be positive");
  if (factor == 1.0) return w;
  Waveform out;
  out.sample_rate = w.sample_rate;
  const auto n = static_cast<std::size_t>(
      std::llround(static_cast<double>(w.size()) / factor));
  out.samples.resize(n);
  if (w.empty()) return out;
  const std::size_t last = w.size() - 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double pos = static_cast<double>(i) * factor;
    const auto left = static_cast<std::size_t>(pos);
    if (left >= last) {
      out.samples[i] = w.samples[last];
      continue;
    }
    const double frac = pos - static_cast<double>(left);
    out.samples[i] = (1.0 - frac) * w.samples[left] + frac * w.samples[left + 1];
  }
  return out;
}

std::int64_t RelabelForSpeed(std::int64_t num_speakers, std::int64_t num_factors) {
  if (num_speakers < 1 || num_factors < 1)
    throw InvalidArgument("speaker and factor counts must be positive");
  return num_speakers * num_factors;
}

std::int64_t SpeedClassId(std::int64_t speaker, std::int64_t factor_index,
                          std::int64_t num_factors) {
  if (speaker < 0 || factor_index < 0 || factor_index >= num_factors)
    throw InvalidArgument("speed class index out of range");
  return speaker * num_factors + factor_index;
}

double MeanPower(const Waveform &w) {
  if (w.empty()) return 0.0;
  double sum = 0.0;
  for (double s : w.samples) sum += s * s;
  return sum / static_cast<double>(w.size());
}

double SnrGain(double signal_power, double noise_power, double snr_db) {
  if (!(signal_power > 0.0) || !(noise_power > 0.0))
    throw InvalidArgument("degenerate SNR: signal or noise is silent");
  return std::sqrt(signal_power / (noise_power * std::pow(10.0, snr_db / 10.0)));
}

Waveform MixAtSnr(const Waveform &signal, const Waveform &noise, double snr_db) {
  if (!std::isfinite(snr_db)) throw InvalidArgument("SNR must be finite");
  if (noise.empty()) throw InvalidArgument("degenerate SNR: empty noise");
  const Waveform fitted = FitLength(noise, signal.size());
  const double gain = SnrGain(MeanPower(signal), MeanPower(fitted), snr_db);
  Waveform out = signal;
  for (std::size_t i = 0; i < out.size(); ++i)
    out.samples[i] += gain * fitted.samples[i];
  return out;
}

const char *CategoryName(NoiseCategory c) {
  switch (c) {
    case NoiseCategory::kNoise: return "noise";
    case NoiseCategory::kMusic: return "music";
    case NoiseCategory::kSpeech: return "speech";
    case NoiseCategory::kRir: return "rir";
  }
  return "?";
}

void NoiseBank::Add(NoiseCategory category, Waveform w) {
  if (w.empty()) throw InvalidArgument("noise bank entries must be non-empty");
  ValidateWaveform(w);
  if (sample_rate_ == 0)
    sample_rate_ = w.sample_rate;
  else if (w.sample_rate != sample_rate_)
    throw InvalidArgument("noise bank sample rate mismatch: " +
                          std::to_string(w.sample_rate) + " vs " +
                          std::to_string(sample_rate_));
  entries_[static_cast<int>(category)].push_back(std::move(w));
}

const std::vector<Waveform> &NoiseBank::Get(NoiseCategory category) const {
  return entries_[static_cast<int>(category)];
}

const std::vector<Waveform> &NoiseBank::Require(NoiseCategory category) const {
  const auto &entries = Get(category);
  if (entries.empty())
    throw InvalidArgument(std::string("noise bank has no \"") +
                          CategoryName(category) + "\" entries");
  return entries;
}

NoiseBank LoadNoiseBank(const std::string &manifest_path, int sample_rate) {
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot open noise manifest " + manifest_path);
  const std::filesystem::path base =
      std::filesystem::path(manifest_path).parent_path();
  NoiseBank bank;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream tokens(line);
    std::string category, path, extra;
    if (!(tokens >> category)) continue;
    if (!(tokens >> path) || (tokens >> extra))
      throw ParseError(line_no, "expected \"category path\"");
    NoiseCategory c;
    if (category == "noise")
      c = NoiseCategory::kNoise;
    else if (category == "music")
      c = NoiseCategory::kMusic;
    else if (category == "speech")
      c = NoiseCategory::kSpeech;
    else if (category == "rir")
      c = NoiseCategory::kRir;
    else
      throw ParseError(line_no, "unknown category \"" + category + "\"");
    std::filesystem::path p(path);
    if (p.is_relative()) p = base / p;
    bank.Add(c, ReadWavFile(p.string(), sample_rate));
  }
  return bank;
}

Waveform MakeBabble(const NoiseBank &bank, int k, std::size_t length, Rng &rng,
                    SpeakerRange range) {
  if (k < range.min || k > range.max)
    throw InvalidArgument("babble speaker count " + std::to_string(k) +
                          " outside [" + std::to_string(range.min) + ", " +
                          std::to_string(range.max) + "]");
  if (k < 1) throw InvalidArgument("babble needs at least one speaker");
  const auto &speech = bank.Get(NoiseCategory::kSpeech);
  if (speech.size() < static_cast<std::size_t>(k))
    throw InvalidArgument("babble needs " + std::to_string(k) +
                          " speech entries, bank has " +
                          std::to_string(speech.size()));
  if (length == 0) throw InvalidArgument("babble length must be positive");

  // Partial Fisher-Yates: the first k slots become the chosen speakers.
  std::vector<std::size_t> order(speech.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (int i = 0; i < k; ++i) {
    auto j = static_cast<std::size_t>(
        UniformInt(rng, i, static_cast<std::int64_t>(order.size()) - 1));
    std::swap(order[i], order[j]);
  }
  Waveform out;
  out.sample_rate = speech[order[0]].sample_rate;
  out.samples.assign(length, 0.0);
  for (int i = 0; i < k; ++i) {
    const Waveform part = CropOrPadToLength(speech[order[i]], length, rng);
    for (std::size_t n = 0; n < length; ++n) out.samples[n] += part.samples[n];
  }
  if (!(MeanPower(out) > 0.0))
    throw InvalidArgument("babble is silent; speech entries cancel or are silent");
  return out;
}

namespace {

double PeakAbs(const Waveform &w) {
  double peak = 0.0;
  for (double s : w.samples) peak = std::max(peak, std::abs(s));
  return peak;
}

}  // namespace

Waveform AddReverb(const Waveform &w, const Waveform &rir) {
  if (rir.empty() || PeakAbs(rir) == 0.0)
    throw InvalidArgument("impulse response is empty or silent");
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples = internal::LinearConvolve(w.samples, rir.samples, w.size());
  const double peak_in = PeakAbs(w);
  const double peak_out = PeakAbs(out);
  if (peak_out > 0.0) {
    const double scale = peak_in / peak_out;
    for (double &s : out.samples) s *= scale;
  }
  return out;
}

void ValidatePolicy(const AugmentPolicy &policy) {
  for (double p : {policy.p_noise, policy.p_music, policy.p_babble, policy.p_reverb})
    if (!(p >= 0.0 && p <= 1.0))
      throw InvalidArgument("augmentation probability outside [0, 1]");
  for (const SnrRange &r : {policy.snr_noise, policy.snr_music, policy.snr_babble})
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi)
      throw InvalidArgument("empty or invalid SNR range");
  if (policy.babble_speakers.min < 1 ||
      policy.babble_speakers.min > policy.babble_speakers.max)
    throw InvalidArgument("invalid babble speaker range");
}

namespace {

Waveform PickSource(const NoiseBank &bank, NoiseCategory category,
                    std::size_t length, Rng &rng) {
  const auto &entries = bank.Require(category);
  const auto index = static_cast<std::size_t>(
      UniformInt(rng, 0, static_cast<std::int64_t>(entries.size()) - 1));
  return CropOrPadToLength(entries[index], length, rng);
}

}  // namespace

AugmentResult ApplyPolicy(const Waveform &w, const AugmentPolicy &policy,
                          const NoiseBank &bank, Rng &rng) {
  ValidatePolicy(policy);
  AugmentResult result;
  const double probs[4] = {policy.p_noise, policy.p_music, policy.p_babble,
                           policy.p_reverb};
  for (int i = 0; i < 4; ++i) result.applied[i] = UniformUnit(rng) < probs[i];
  result.output = w;
  if (w.empty()) return result;

  Waveform &out = result.output;
  if (result.applied[0]) {
    const double snr = UniformReal(rng, policy.snr_noise.lo, policy.snr_noise.hi);
    out = MixAtSnr(out, PickSource(bank, NoiseCategory::kNoise, out.size(), rng), snr);
  }
  if (result.applied[1]) {
    const double snr = UniformReal(rng, policy.snr_music.lo, policy.snr_music.hi);
    out = MixAtSnr(out, PickSource(bank, NoiseCategory::kMusic, out.size(), rng), snr);
  }
  if (result.applied[2]) {
    const double snr = UniformReal(rng, policy.snr_babble.lo, policy.snr_babble.hi);
    const int available = static_cast<int>(bank.Get(NoiseCategory::kSpeech).size());
    const int k_max = std::min(policy.babble_speakers.max, available);
    if (k_max < policy.babble_speakers.min)
      throw InvalidArgument("noise bank has too few speech entries for babble");
    const auto k = static_cast<int>(UniformInt(rng, policy.babble_speakers.min, k_max));
    out = MixAtSnr(out, MakeBabble(bank, k, out.size(), rng, policy.babble_speakers),
                   snr);
  }
  if (result.applied[3]) {
    const auto &rirs = bank.Require(NoiseCategory::kRir);
    const auto index = static_cast<std::size_t>(
        UniformInt(rng, 0, static_cast<std::int64_t>(rirs.size()) - 1));
    out = AddReverb(out, rirs[index]);
  }
  return result;
}

}  // namespace svtk
