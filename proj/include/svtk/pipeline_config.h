// include/svtk/pipeline_config.h

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

#ifndef SVTK_PIPELINE_CONFIG_H_
#define SVTK_PIPELINE_CONFIG_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "svtk/augment.h"
#include "svtk/features.h"
#include "svtk/scoring.h"

namespace svtk {

struct KeyValueEntry {
  std::string value;
  std::size_t line = 0;
};

/// Flat "key = value" text: '#' starts a comment, blank lines are skipped,
/// keys are unique. Order of appearance is kept.
struct KeyValueFile {
  std::vector<std::pair<std::string, KeyValueEntry>> entries;
};

KeyValueFile ParseKeyValue(std::string_view text);
KeyValueFile ReadKeyValueFile(const std::string &path);

double ParseDouble(const KeyValueEntry &e);
std::int64_t ParseInt(const KeyValueEntry &e);
bool ParseBool(const KeyValueEntry &e);

ScoringMode ParseScoringMode(std::string_view name);
const char *ScoringModeName(ScoringMode mode);

/// Every tunable of a pipeline run. Environment variables are never
/// consulted.
struct PipelineConfig {
  int sample_rate = 16000;
  MelConfig mel;
  bool apply_cmn = true;
  AugmentPolicy augment;
  std::size_t embed_dim = 512;
  std::uint64_t embed_seed = 0;
  ScoringMode scoring = ScoringMode::kRaw;
  std::string cohort_path;
  std::size_t top_k = 100;
  int msa_segments = 5;
  double msa_segment_seconds = 6.0;
  double p_target = 0.05;
  double c_miss = 1.0;
  double c_fa = 1.0;
  std::uint64_t seed = 0;
};

/// Keys mirror the field names; nested ones are flattened, e.g.
/// "mel.window_ms", "augment.p_noise", "augment.snr_noise_lo",
/// "augment.babble_min". A relative cohort_path is resolved against
/// `base_dir` when given. Validates ranges and that cohort_path exists.
PipelineConfig ParsePipelineConfig(std::string_view text,
                                   const std::string &base_dir = "");
PipelineConfig LoadPipelineConfig(const std::string &path);
void ValidatePipelineConfig(const PipelineConfig &cfg);

}  // namespace svtk

#endif  // SVTK_PIPELINE_CONFIG_H_
