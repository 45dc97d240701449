// include/svtk/augment.h

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

#ifndef SVTK_AUGMENT_H_
#define SVTK_AUGMENT_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "svtk/features.h"
#include "svtk/random.h"

namespace svtk {

/// Resamples by linear interpolation at rate ratio `factor`, shifting tempo
/// and pitch together (sox "speed"). Output length is round(len / factor);
/// factor 1.0 returns the input unchanged.
Waveform SpeedPerturb(const Waveform &w, double factor);

/// Number of classes after treating every (speaker, speed factor) pair as its
/// own class, e.g. 5994 speakers x 3 factors = 17982.
std::int64_t RelabelForSpeed(std::int64_t num_speakers, std::int64_t num_factors);

/// Class id of (speaker, factor_index): speaker * num_factors + factor_index.
std::int64_t SpeedClassId(std::int64_t speaker, std::int64_t factor_index,
                          std::int64_t num_factors);

/// Mean square over the whole clip.
double MeanPower(const Waveform &w);

/// Gain g such that 10 log10(P_signal / (g^2 P_noise)) == snr_db.
double SnrGain(double signal_power, double noise_power, double snr_db);

/// signal + g * noise, with the noise tiled or cropped (from offset 0) to the
/// signal length. Throws InvalidArgument("degenerate SNR") if either side is
/// silent.
Waveform MixAtSnr(const Waveform &signal, const Waveform &noise, double snr_db);

enum class NoiseCategory { kNoise = 0, kMusic = 1, kSpeech = 2, kRir = 3 };

const char *CategoryName(NoiseCategory c);

/// Category-tagged source audio for the online augmentations.
class NoiseBank {
 public:
  NoiseBank() = default;

  /// Throws InvalidArgument on an empty or non-finite waveform, or on a
  /// sample rate that disagrees with earlier entries.
  void Add(NoiseCategory category, Waveform w);
  const std::vector<Waveform> &Get(NoiseCategory category) const;
  /// Like Get but throws InvalidArgument if the category is empty.
  const std::vector<Waveform> &Require(NoiseCategory category) const;
  int sample_rate() const { return sample_rate_; }

 private:
  std::array<std::vector<Waveform>, 4> entries_;
  int sample_rate_ = 0;
};

/// Manifest: one "category path" per line, category in
/// {noise, music, speech, rir}; relative paths resolve against the
/// manifest's directory. Blank lines and '#' comments are skipped.
NoiseBank LoadNoiseBank(const std::string &manifest_path, int sample_rate = 16000);

struct SpeakerRange {
  int min = 3;
  int max = 7;
};

/// Sum of k distinct speech entries, each fitted to `length` samples with
/// CropOrPad. Throws InvalidArgument if k lies outside `range` or the bank
/// holds fewer than k speech entries.
Waveform MakeBabble(const NoiseBank &bank, int k, std::size_t length, Rng &rng,
                    SpeakerRange range = {});

/// Full linear convolution with `rir`, truncated to len(w), then rescaled so
/// its peak |amplitude| equals the input's. Throws on a silent RIR.
Waveform AddReverb(const Waveform &w, const Waveform &rir);

struct SnrRange {
  double lo;
  double hi;
};

struct AugmentPolicy {
  double p_noise = 0.2;
  double p_music = 0.2;
  double p_babble = 0.2;
  double p_reverb = 0.2;
  SnrRange snr_noise{0.0, 15.0};
  SnrRange snr_music{5.0, 15.0};
  SnrRange snr_babble{13.0, 20.0};
  SpeakerRange babble_speakers{3, 7};
};

/// Throws InvalidArgument if a probability is outside [0, 1], an SNR range is
/// inverted, or the speaker range is outside [1, ...].
void ValidatePolicy(const AugmentPolicy &policy);

/// Which augmentations fired, in the fixed order noise, music, babble, reverb.
using AugmentDecisions = std::array<bool, 4>;

struct AugmentResult {
  Waveform output;
  AugmentDecisions applied{};
};

/// Draws the four Bernoulli decisions first, then applies the selected
/// augmentations in order noise -> music -> babble -> reverb. SNRs are uniform
/// over the policy ranges. A pure function of (w, policy, bank, rng state).
AugmentResult ApplyPolicy(const Waveform &w, const AugmentPolicy &policy,
                          const NoiseBank &bank, Rng &rng);

}  // namespace svtk

#endif  // SVTK_AUGMENT_H_
