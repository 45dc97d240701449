// src/scoring.cc

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

#include "svtk/scoring.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "svtk/error.h"

namespace svtk {

namespace {

template <typename T>
double UnitDot(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size())
    throw InvalidArgument("embedding size mismatch: " + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()));
  double aa = 0.0, bb = 0.0, ab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i], y = b[i];
    aa += x * x;
    bb += y * y;
    ab += x * y;
  }
  if (std::abs(std::sqrt(aa) - 1.0) > kScoringUnitTolerance ||
      std::abs(std::sqrt(bb) - 1.0) > kScoringUnitTolerance)
    throw InvalidArgument("cosine scoring requires length-normalized embeddings");
  return ab;
}

template <typename Seg>
double MeanPairwise(std::span<const Seg> a, std::span<const Seg> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("MSA needs at least one segment per side");
  double sum = 0.0;
  for (const auto &x : a)
    for (const auto &y : b) sum += CosineScore(x, y);
  return sum / static_cast<double>(a.size() * b.size());
}

}  // namespace

double CosineScore(std::span<const float> a, std::span<const float> b) {
  return UnitDot(a, b);
}

double CosineScore(std::span<const double> a, std::span<const double> b) {
  return UnitDot(a, b);
}

CohortStats CohortStatsFromScores(std::vector<double> scores, std::size_t top_k) {
  if (top_k == 0) throw InvalidArgument("top_k must be positive");
  if (top_k > scores.size())
    throw InvalidArgument("top_k " + std::to_string(top_k) + " exceeds cohort size " +
                          std::to_string(scores.size()));
  std::nth_element(scores.begin(), scores.begin() + (top_k - 1), scores.end(),
                   std::greater<double>());
  // Sorted summation keeps the result independent of nth_element's layout.
  std::sort(scores.begin(), scores.begin() + top_k, std::greater<double>());
  double sum = 0.0;
  for (std::size_t i = 0; i < top_k; ++i) sum += scores[i];
  const double mean = sum / static_cast<double>(top_k);
  double sq = 0.0;
  for (std::size_t i = 0; i < top_k; ++i) sq += (scores[i] - mean) * (scores[i] - mean);
  const double stddev = std::sqrt(sq / static_cast<double>(top_k));
  if (!(stddev >= 1e-9)) throw InvalidArgument("degenerate cohort: top-K scores are identical");
  return {mean, stddev};
}

CohortStats ComputeCohortStats(std::span<const float> e, const EmbeddingStore &cohort,
                               std::size_t top_k) {
  std::vector<double> scores(cohort.size());
  for (std::size_t i = 0; i < cohort.size(); ++i) scores[i] = CosineScore(e, cohort.row(i));
  return CohortStatsFromScores(std::move(scores), top_k);
}

double AsNormScore(double raw, const CohortStats &enroll, const CohortStats &test) {
  return 0.5 * ((raw - enroll.mean) / enroll.stddev + (raw - test.mean) / test.stddev);
}

EmbeddingStore SpeakerMeanCohort(
    const EmbeddingStore &utterances,
    const std::vector<std::pair<std::string, std::string>> &utt2spk) {
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<double>> sums;
  for (const auto &[utt, spk] : utt2spk) {
    auto vec = utterances.at(utt);
    auto [it, inserted] = sums.try_emplace(spk, utterances.dim(), 0.0);
    if (inserted) order.push_back(spk);
    for (std::size_t d = 0; d < vec.size(); ++d) it->second[d] += vec[d];
  }
  EmbeddingStore cohort(utterances.dim());
  for (const std::string &spk : order) {
    std::vector<double> &v = sums[spk];
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (!(norm > 0.0))
      throw InvalidArgument("speaker \"" + spk + "\" has a zero mean embedding");
    for (double &x : v) x /= norm;
    cohort.Add(spk, std::span<const double>(v));
  }
  return cohort;
}

std::vector<std::pair<std::string, std::string>> ReadUtt2Spk(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open utt2spk file " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tok(line);
    std::string utt, spk, extra;
    if (!(tok >> utt)) continue;
    if (!(tok >> spk) || (tok >> extra))
      throw ParseError(line_no, path + ": expected \"utterance speaker\"");
    out.emplace_back(std::move(utt), std::move(spk));
  }
  return out;
}

SegmentPlan PlanSegments(double utterance_seconds, int num_segments,
                         double segment_seconds) {
  if (!(utterance_seconds > 0.0)) throw InvalidArgument("utterance length must be positive");
  if (num_segments < 1) throw InvalidArgument("need at least one segment");
  if (!(segment_seconds > 0.0)) throw InvalidArgument("segment length must be positive");
  SegmentPlan plan;
  plan.num_segments = num_segments;
  plan.segment_seconds = segment_seconds;
  plan.padded_seconds = std::max(utterance_seconds, segment_seconds);
  plan.starts.assign(num_segments, 0.0);
  const double slack = plan.padded_seconds - segment_seconds;
  if (num_segments > 1 && slack > 0.0)
    for (int i = 0; i < num_segments; ++i)
      plan.starts[i] = i * slack / (num_segments - 1);
  return plan;
}

double MsaScore(std::span<const std::vector<double>> a,
                std::span<const std::vector<double>> b) {
  std::vector<std::span<const double>> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  return MeanPairwise<std::span<const double>>(sa, sb);
}

std::string SegmentId(const std::string &utt, int index) {
  return utt + "#" + std::to_string(index);
}

void ParallelFor(std::size_t n, unsigned threads,
                 const std::function<void(std::size_t)> &fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::mutex mu;
  std::size_t failed_index = n;
  std::exception_ptr failure;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (i < failed_index) {
            failed_index = i;
            failure = std::current_exception();
          }
          return;
        }
      }
    });
  }
  for (auto &t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

ScoreSet ScoreTrials(const TrialList &trials, const EmbeddingStore &embeddings,
                     const ScoringOptions &options) {
  std::vector<double> scores(trials.size());
  const unsigned threads = std::max(1u, options.threads);

  switch (options.mode) {
    case ScoringMode::kRaw:
      ParallelFor(trials.size(), threads, [&](std::size_t i) {
        scores[i] = CosineScore(embeddings.at(trials[i].enroll_id),
                                embeddings.at(trials[i].test_id));
      });
      break;

    case ScoringMode::kAsNorm: {
      if (!options.cohort) throw InvalidArgument("AS-Norm scoring requires a cohort");
      if (options.cohort->dim() != embeddings.dim())
        throw InvalidArgument("cohort dim differs from embedding dim");
      // Distinct utterances in first-appearance order.
      std::vector<std::string> utts;
      std::unordered_map<std::string, std::size_t> slot;
      for (const Trial &t : trials.trials())
        for (const std::string *id : {&t.enroll_id, &t.test_id})
          if (slot.emplace(*id, utts.size()).second) utts.push_back(*id);
      std::vector<CohortStats> stats(utts.size());
      ParallelFor(utts.size(), threads, [&](std::size_t i) {
        stats[i] = ComputeCohortStats(embeddings.at(utts[i]), *options.cohort, options.top_k);
      });
      ParallelFor(trials.size(), threads, [&](std::size_t i) {
        const Trial &t = trials[i];
        const double raw = CosineScore(embeddings.at(t.enroll_id), embeddings.at(t.test_id));
        scores[i] = AsNormScore(raw, stats[slot.at(t.enroll_id)], stats[slot.at(t.test_id)]);
      });
      break;
    }

    case ScoringMode::kMsa: {
      if (options.msa_segments < 1) throw InvalidArgument("msa_segments must be positive");
      auto segments = [&](const std::string &utt) {
        std::vector<std::span<const float>> out;
        for (int s = 0; s < options.msa_segments; ++s)
          out.push_back(embeddings.at(SegmentId(utt, s)));
        return out;
      };
      ParallelFor(trials.size(), threads, [&](std::size_t i) {
        const auto a = segments(trials[i].enroll_id);
        const auto b = segments(trials[i].test_id);
        scores[i] = MeanPairwise<std::span<const float>>(a, b);
      });
      break;
    }
  }
  return ScoreSet(trials, std::move(scores));
}

}  // namespace svtk
