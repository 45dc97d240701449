// src/features.cc

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

#include <bit>
#include <cmath>
#include <cstring>
#include <numbers>

#include "fft.h"
#include "svtk/error.h"

namespace svtk {

using internal::FftwAlloc;
using internal::PlannerMutex;

struct MelFilterbank::Plan {
  fftw_plan plan = nullptr;
};

void ValidateWaveform(const Waveform &w) {
  if (w.sample_rate <= 0) throw InvalidArgument("sample_rate must be positive");
  for (double s : w.samples)
    if (!std::isfinite(s)) throw InvalidArgument("waveform has non-finite sample");
}

MelFeatures::MelFeatures(std::size_t rows, std::size_t frames, double frame_hop)
    : rows_(rows), frames_(frames), frame_hop_(frame_hop),
      data_(rows * frames, 0.0) {}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank::MelFilterbank(int sample_rate, const MelConfig &config)
    : sample_rate_(sample_rate), config_(config) {
  if (sample_rate <= 0) throw InvalidArgument("sample_rate must be positive");
  window_length_ =
      static_cast<int>(std::lround(config.window_ms * 1e-3 * sample_rate));
  hop_length_ = static_cast<int>(std::lround(config.hop_ms * 1e-3 * sample_rate));
  if (window_length_ < 1 || hop_length_ < 1)
    throw InvalidArgument("window and hop must be at least one sample");
  if (config.fft_size < window_length_)
    throw InvalidArgument("fft_size " + std::to_string(config.fft_size) +
                          " smaller than window " + std::to_string(window_length_));
  if (config.num_bins < 1) throw InvalidArgument("num_bins must be positive");
  if (!(config.floor > 0.0)) throw InvalidArgument("log floor must be positive");
  num_fft_bins_ = config.fft_size / 2 + 1;

  window_.resize(window_length_);
  for (int n = 0; n < window_length_; ++n)
    window_[n] = window_length_ == 1
                     ? 1.0
                     : 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n /
                                              (window_length_ - 1));

  const double nyquist = 0.5 * sample_rate;
  const double high = config.high_hz > 0.0 ? config.high_hz : nyquist;
  if (config.low_hz < 0.0 || high > nyquist || config.low_hz >= high)
    throw InvalidArgument("invalid mel frequency range");
  const double mel_lo = HzToMel(config.low_hz);
  const double mel_hi = HzToMel(high);
  const double mel_step = (mel_hi - mel_lo) / (config.num_bins + 1);

  center_hz_.resize(config.num_bins);
  filter_start_.assign(config.num_bins, 0);
  filter_weights_.assign(config.num_bins, {});
  for (int m = 0; m < config.num_bins; ++m) {
    const double left = mel_lo + m * mel_step;
    const double center = left + mel_step;
    const double right = center + mel_step;
    center_hz_[m] = MelToHz(center);
    int first = -1;
    std::vector<double> weights;
    for (int k = 0; k < num_fft_bins_; ++k) {
      const double mel = HzToMel(static_cast<double>(k) * sample_rate / config.fft_size);
      double w = 0.0;
      if (mel > left && mel < center)
        w = (mel - left) / (center - left);
      else if (mel >= center && mel < right)
        w = (right - mel) / (right - center);
      if (w > 0.0) {
        if (first < 0) first = k;
        weights.resize(k - first + 1, 0.0);
        weights[k - first] = w;
      }
    }
    filter_start_[m] = std::max(first, 0);
    filter_weights_[m] = std::move(weights);
  }

  plan_ = std::make_unique<Plan>();
  auto in = FftwAlloc<double>(config.fft_size);
  auto out = FftwAlloc<fftw_complex>(num_fft_bins_);
  std::lock_guard lock(PlannerMutex());
  plan_->plan = fftw_plan_dft_r2c_1d(config.fft_size, in.get(), out.get(),
                                     FFTW_ESTIMATE);
  if (!plan_->plan) throw Error("FFTW planning failed");
}

MelFilterbank::~MelFilterbank() {
  if (plan_ && plan_->plan) {
    std::lock_guard lock(PlannerMutex());
    fftw_destroy_plan(plan_->plan);
  }
}

double MelFilterbank::weight(int m, int k) const {
  const int offset = k - filter_start_[m];
  const auto &w = filter_weights_[m];
  if (offset < 0 || offset >= static_cast<int>(w.size())) return 0.0;
  return w[offset];
}

MelFeatures MelFilterbank::Compute(const Waveform &w) const {
  ValidateWaveform(w);
  if (w.sample_rate != sample_rate_)
    throw InvalidArgument("waveform rate " + std::to_string(w.sample_rate) +
                          " differs from filterbank rate " +
                          std::to_string(sample_rate_));
  if (w.size() < static_cast<std::size_t>(window_length_))
    throw InvalidArgument("too short: " + std::to_string(w.size()) +
                          " samples, need at least " +
                          std::to_string(window_length_));

  const std::size_t frames = 1 + (w.size() - window_length_) / hop_length_;
  MelFeatures feats(config_.num_bins, frames, config_.hop_ms * 1e-3);

  auto in = FftwAlloc<double>(config_.fft_size);
  auto out = FftwAlloc<fftw_complex>(num_fft_bins_);
  std::vector<double> power(num_fft_bins_);
  for (std::size_t t = 0; t < frames; ++t) {
    const double *frame = w.samples.data() + t * hop_length_;
    for (int n = 0; n < window_length_; ++n) in[n] = frame[n] * window_[n];
    for (int n = window_length_; n < config_.fft_size; ++n) in[n] = 0.0;
    fftw_execute_dft_r2c(plan_->plan, in.get(), out.get());
    for (int k = 0; k < num_fft_bins_; ++k)
      power[k] = out[k][0] * out[k][0] + out[k][1] * out[k][1];
    for (int m = 0; m < config_.num_bins; ++m) {
      double energy = 0.0;
      const auto &weights = filter_weights_[m];
      for (std::size_t i = 0; i < weights.size(); ++i)
        energy += weights[i] * power[filter_start_[m] + i];
      feats(m, t) = std::log(std::max(energy, config_.floor));
    }
  }
  return feats;
}

MelFeatures ComputeLogMel(const Waveform &w, const MelConfig &config) {
  return MelFilterbank(w.sample_rate, config).Compute(w);
}

MelFeatures ApplyCmn(MelFeatures f) {
  const std::size_t frames = f.frames();
  if (frames == 0) {
    f.set_cmn_applied(true);
    return f;
  }
  for (std::size_t b = 0; b < f.rows(); ++b) {
    double mean = 0.0;
    for (std::size_t t = 0; t < frames; ++t) mean += f(b, t);
    mean /= static_cast<double>(frames);
    for (std::size_t t = 0; t < frames; ++t) f(b, t) -= mean;
  }
  f.set_cmn_applied(true);
  return f;
}

Waveform FitLength(const Waveform &w, std::size_t length) {
  if (w.empty()) throw InvalidArgument("cannot fit an empty waveform");
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples.resize(length);
  for (std::size_t i = 0; i < length; ++i) out.samples[i] = w.samples[i % w.size()];
  return out;
}

Waveform CropOrPadToLength(const Waveform &w, std::size_t target, Rng &rng) {
  if (w.empty()) throw InvalidArgument("cannot crop or pad an empty waveform");
  if (target == 0) throw InvalidArgument("target length must be positive");
  if (w.size() == target) return w;
  if (w.size() < target) return FitLength(w, target);
  const auto offset = static_cast<std::size_t>(
      UniformInt(rng, 0, static_cast<std::int64_t>(w.size() - target)));
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples.assign(w.samples.begin() + offset,
                     w.samples.begin() + offset + target);
  return out;
}

Waveform CropOrPad(const Waveform &w, double duration, Rng &rng) {
  if (!(duration > 0.0)) throw InvalidArgument("duration must be positive");
  const auto target =
      static_cast<std::size_t>(std::llround(duration * w.sample_rate));
  return CropOrPadToLength(w, target, rng);
}

void WriteMelFeatures(const MelFeatures &f, std::ostream &out) {
  auto put32 = [&](std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(b, 4);
  };
  out.write("MEL1", 4);
  put32(static_cast<std::uint32_t>(f.rows()));
  put32(static_cast<std::uint32_t>(f.frames()));
  for (double v : f.data()) put32(std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  if (!out) throw IoError("failed writing MEL1 data");
}

MelFeatures ReadMelFeatures(std::istream &in) {
  std::uint64_t offset = 0;
  auto get32 = [&]() {
    unsigned char b[4];
    in.read(reinterpret_cast<char *>(b), 4);
    if (in.gcount() != 4) throw FormatError(offset, "truncated MEL1 data");
    offset += 4;
    return static_cast<std::uint32_t>(b[0] | (b[1] << 8) | (b[2] << 16)) |
           (static_cast<std::uint32_t>(b[3]) << 24);
  };
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, "MEL1", 4) != 0)
    throw FormatError(0, "bad magic, expected \"MEL1\"");
  offset = 4;
  const std::uint32_t rows = get32();
  const std::uint32_t cols = get32();
  MelFeatures f(rows, cols, 0.0);
  for (std::uint32_t r = 0; r < rows; ++r)
    for (std::uint32_t c = 0; c < cols; ++c)
      f(r, c) = std::bit_cast<float>(get32());
  return f;
}

}  // namespace svtk
