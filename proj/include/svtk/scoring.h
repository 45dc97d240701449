// include/svtk/scoring.h

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

#ifndef SVTK_SCORING_H_
#define SVTK_SCORING_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "svtk/trialdata.h"

namespace svtk {

/// Tolerance on ||v|| - 1 for inputs that must be length-normalized.
inline constexpr double kScoringUnitTolerance = 1e-4;

/// Dot product of two unit vectors. Throws InvalidArgument if either norm
/// deviates from 1 by more than kScoringUnitTolerance or the sizes differ.
double CosineScore(std::span<const float> a, std::span<const float> b);
double CosineScore(std::span<const double> a, std::span<const double> b);

/// Mean and population standard deviation of one utterance's top-K cohort
/// scores.
struct CohortStats {
  double mean = 0.0;
  double stddev = 1.0;
};

/// Stats of the `top_k` largest values of `scores`. Throws InvalidArgument if
/// top_k is 0 or exceeds the score count, or "degenerate cohort" when the
/// standard deviation is below 1e-9.
CohortStats CohortStatsFromScores(std::vector<double> scores, std::size_t top_k);

/// Scores `e` against every cohort vector and summarizes the top K.
CohortStats ComputeCohortStats(std::span<const float> e,
                               const EmbeddingStore &cohort, std::size_t top_k);

/// 0.5 * [(raw - mu_e) / sigma_e + (raw - mu_t) / sigma_t]
double AsNormScore(double raw, const CohortStats &enroll, const CohortStats &test);

/// Per-speaker mean of utterance embeddings, re-length-normalized. Speakers
/// appear in order of first occurrence in `utt2spk`; utterances missing from
/// the store are an error.
EmbeddingStore SpeakerMeanCohort(
    const EmbeddingStore &utterances,
    const std::vector<std::pair<std::string, std::string>> &utt2spk);

/// Reads "utt speaker" lines.
std::vector<std::pair<std::string, std::string>> ReadUtt2Spk(const std::string &path);

struct SegmentPlan {
  int num_segments = 5;
  double segment_seconds = 6.0;
  /// Utterance length after cyclic padding (>= segment_seconds).
  double padded_seconds = 0.0;
  std::vector<double> starts;  // seconds
};

/// Evenly spaced, possibly overlapping segments: start_i = i * (len - seg) /
/// (n - 1). Utterances shorter than one segment are padded to it and every
/// start is 0.
SegmentPlan PlanSegments(double utterance_seconds, int num_segments = 5,
                         double segment_seconds = 6.0);

/// Mean of all pairwise cosine scores between the two segment sets.
double MsaScore(std::span<const std::vector<double>> a,
                std::span<const std::vector<double>> b);

/// Segment embedding id used by MSA stores: "<utt>#<index>".
std::string SegmentId(const std::string &utt, int index);

enum class ScoringMode { kRaw, kAsNorm, kMsa };

struct ScoringOptions {
  ScoringMode mode = ScoringMode::kRaw;
  const EmbeddingStore *cohort = nullptr;  // required for kAsNorm
  std::size_t top_k = 100;
  int msa_segments = 5;
  unsigned threads = 1;
};

/// Scores every trial. kAsNorm computes cohort stats once per distinct
/// utterance; kMsa looks up SegmentId(utt, i) for i < msa_segments. Work is
/// spread over `threads` workers; output is identical for any thread count.
ScoreSet ScoreTrials(const TrialList &trials, const EmbeddingStore &embeddings,
                     const ScoringOptions &options);

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Exceptions thrown by
/// fn are rethrown (the one from the lowest index wins).
void ParallelFor(std::size_t n, unsigned threads,
                 const std::function<void(std::size_t)> &fn);

}  // namespace svtk

#endif  // SVTK_SCORING_H_
