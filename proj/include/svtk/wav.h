// include/svtk/wav.h

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

#ifndef SVTK_WAV_H_
#define SVTK_WAV_H_

#include <istream>
#include <ostream>
#include <string>

#include "svtk/features.h"

namespace svtk {

/// Reads RIFF PCM, 16-bit signed, mono. Samples are scaled by 1/32768.
/// Anything else, or a rate different from `expected_rate`, is a
/// FormatError.
Waveform ReadWav(std::istream &in, int expected_rate = 16000);
Waveform ReadWavFile(const std::string &path, int expected_rate = 16000);

/// Writes 16-bit PCM mono; samples are clipped to [-1, 1) before rounding.
void WriteWav(const Waveform &w, std::ostream &out);
void WriteWavFile(const Waveform &w, const std::string &path);

}  // namespace svtk

#endif  // SVTK_WAV_H_
