// include/svtk/features.h

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

#ifndef SVTK_FEATURES_H_
#define SVTK_FEATURES_H_

#include <cstdint>
#include <memory>
#include <ostream>
#include <istream>
#include <string>
#include <vector>

#include "svtk/random.h"

namespace svtk {

/// Mono audio. Samples are nominally in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
  bool operator==(const Waveform &) const = default;
};

/// Throws InvalidArgument unless sample_rate > 0 and all samples are finite.
void ValidateWaveform(const Waveform &w);

/// Log-Mel matrix stored row-major: row = mel bin, column = frame.
class MelFeatures {
 public:
  MelFeatures() = default;
  MelFeatures(std::size_t rows, std::size_t frames, double frame_hop);

  std::size_t rows() const { return rows_; }
  std::size_t frames() const { return frames_; }
  double frame_hop() const { return frame_hop_; }
  bool cmn_applied() const { return cmn_applied_; }
  void set_cmn_applied(bool v) { cmn_applied_ = v; }

  double &operator()(std::size_t bin, std::size_t frame) {
    return data_[bin * frames_ + frame];
  }
  double operator()(std::size_t bin, std::size_t frame) const {
    return data_[bin * frames_ + frame];
  }
  const std::vector<double> &data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t frames_ = 0;
  double frame_hop_ = 0.0;
  bool cmn_applied_ = false;
  std::vector<double> data_;
};

struct MelConfig {
  double window_ms = 25.0;
  double hop_ms = 10.0;
  int fft_size = 512;
  int num_bins = 80;
  double floor = 1e-10;
  double low_hz = 0.0;
  double high_hz = 0.0;  // <= 0 means Nyquist
};

/// HTK mel scale: 2595 * log10(1 + hz / 700).
double HzToMel(double hz);
double MelToHz(double mel);

/// Precomputed Hamming window, triangular mel filters and FFT plan for one
/// (sample rate, config) pair. Compute() is const and safe to call
/// concurrently.
class MelFilterbank {
 public:
  MelFilterbank(int sample_rate, const MelConfig &config = {});
  ~MelFilterbank();
  MelFilterbank(const MelFilterbank &) = delete;
  MelFilterbank &operator=(const MelFilterbank &) = delete;

  /// Frames: 1 + floor((len - window) / hop). Entry: ln(max(power, floor)).
  /// Throws InvalidArgument("too short") below one window of samples.
  MelFeatures Compute(const Waveform &w) const;

  int window_length() const { return window_length_; }
  int hop_length() const { return hop_length_; }
  /// Center frequency in Hz of each mel filter.
  const std::vector<double> &center_hz() const { return center_hz_; }
  /// Weight of FFT bin `k` in mel filter `m`.
  double weight(int m, int k) const;

 private:
  struct Plan;

  int sample_rate_;
  MelConfig config_;
  int window_length_;
  int hop_length_;
  int num_fft_bins_;
  std::vector<double> window_;
  std::vector<double> center_hz_;
  // Sparse filters: first FFT bin and weights per mel bin.
  std::vector<int> filter_start_;
  std::vector<std::vector<double>> filter_weights_;
  std::unique_ptr<Plan> plan_;
};

/// Convenience wrapper constructing a filterbank per call.
MelFeatures ComputeLogMel(const Waveform &w, const MelConfig &config = {});

/// Per-bin mean subtraction over frames.
MelFeatures ApplyCmn(MelFeatures f);

/// Fixed-length segment of exactly round(duration * sample_rate) samples:
/// a random contiguous window when longer, cyclic repetition when shorter.
Waveform CropOrPad(const Waveform &w, double duration, Rng &rng);

/// CropOrPad by sample count instead of duration.
Waveform CropOrPadToLength(const Waveform &w, std::size_t length, Rng &rng);

/// Tiles (cyclically) or crops from offset 0 to exactly `length` samples.
Waveform FitLength(const Waveform &w, std::size_t length);

/// MEL1 dump: "MEL1" | u32 rows | u32 cols | rows*cols f32, row-major, LE.
void WriteMelFeatures(const MelFeatures &f, std::ostream &out);
MelFeatures ReadMelFeatures(std::istream &in);

}  // namespace svtk

#endif  // SVTK_FEATURES_H_
