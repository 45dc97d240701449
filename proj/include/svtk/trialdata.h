// include/svtk/trialdata.h

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

#ifndef SVTK_TRIALDATA_H_
#define SVTK_TRIALDATA_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace svtk {

/// One (enrollment, test) pair. Ids are opaque: VoxCeleb-style ids such as
/// "id10270/x6uYqmx31kE/00001.wav" are never interpreted as paths.
struct Trial {
  std::string enroll_id;
  std::string test_id;
  std::optional<bool> label;  // true = same speaker

  bool operator==(const Trial &) const = default;
};

enum class TrialFormat {
  kLabeled,    // "label enroll test"
  kUnlabeled,  // "enroll test"
  kAuto,       // decided by the token count of the first non-empty line
};

/// Ordered trial sequence; labeling is all-or-none.
class TrialList {
 public:
  TrialList() = default;
  /// Throws InvalidArgument when labeling is mixed or an id is invalid.
  explicit TrialList(std::vector<Trial> trials);

  const std::vector<Trial> &trials() const { return trials_; }
  const Trial &operator[](std::size_t i) const { return trials_[i]; }
  std::size_t size() const { return trials_.size(); }
  bool empty() const { return trials_.empty(); }
  bool labeled() const { return labeled_; }

  bool operator==(const TrialList &) const = default;

 private:
  std::vector<Trial> trials_;
  bool labeled_ = false;
};

/// True if `id` is non-empty and holds no whitespace.
bool IsValidId(std::string_view id);

/// Parses a trial list, one trial per non-empty line. Label tokens must be
/// "0" or "1". Errors are ParseError carrying the line number.
TrialList ParseTrials(std::istream &in, TrialFormat format);
TrialList ParseTrials(std::string_view text, TrialFormat format);

/// Writes "label enroll test" (labeled) or "enroll test" lines.
void WriteTrials(const TrialList &trials, std::ostream &out);

/// Fixed-dimension embedding table keyed by utterance (or speaker) id.
/// Vectors are held as 32-bit floats, matching the EMB1 on-disk format.
class EmbeddingStore {
 public:
  /// Throws InvalidArgument if dim == 0.
  explicit EmbeddingStore(std::uint32_t dim);

  /// Appends a vector. Throws InvalidArgument on duplicate/invalid id, wrong
  /// length or non-finite entries.
  void Add(std::string id, std::span<const float> vector);
  void Add(std::string id, std::span<const double> vector);

  std::uint32_t dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string> &ids() const { return ids_; }
  std::span<const float> row(std::size_t index) const;
  std::optional<std::size_t> Find(std::string_view id) const;
  /// Like Find but throws InvalidArgument naming the missing id.
  std::span<const float> at(std::string_view id) const;

  /// True iff every stored vector has unit L2 norm within 1e-6 (vacuously
  /// true when empty).
  bool normalized() const { return non_unit_count_ == 0; }

  /// Same ids in the same order and bit-identical vectors.
  bool operator==(const EmbeddingStore &other) const;

 private:
  std::uint32_t dim_;
  std::vector<std::string> ids_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t non_unit_count_ = 0;
};

/// EMB1 binary layout (little-endian):
///   "EMB1" | u32 dim | u64 count | count x [u16 id_len | id | dim x f32]
void WriteEmbeddings(const EmbeddingStore &store, std::ostream &out);
/// Throws FormatError naming the byte offset on bad magic, truncation,
/// duplicate ids or non-finite values.
EmbeddingStore ReadEmbeddings(std::istream &in);

void WriteEmbeddingsFile(const EmbeddingStore &store, const std::string &path);
EmbeddingStore ReadEmbeddingsFile(const std::string &path);

/// Per-trial scores aligned 1:1 with a trial list.
class ScoreSet {
 public:
  ScoreSet() = default;
  /// Throws InvalidArgument if the lengths differ or a score is not finite.
  ScoreSet(TrialList trials, std::vector<double> scores);

  const TrialList &trials() const { return trials_; }
  const std::vector<double> &scores() const { return scores_; }
  std::size_t size() const { return scores_.size(); }

 private:
  TrialList trials_;
  std::vector<double> scores_;
};

/// Formats a score in fixed notation with at least 9 decimals and at least 9
/// significant digits, e.g. 0.5 -> "0.500000000".
std::string FormatScore(double score);

/// "enroll test score" per line.
void SerializeScores(const ScoreSet &set, std::ostream &out);
std::string SerializeScores(const ScoreSet &set);

/// Inverse of SerializeScores; the resulting trial list is unlabeled.
ScoreSet ParseScores(std::istream &in);
ScoreSet ParseScores(std::string_view text);

/// Re-keys parsed scores onto `trials` (typically a labeled list). The two
/// must list the same (enroll, test) pairs in the same order.
ScoreSet AlignScores(const TrialList &trials, const ScoreSet &scores);

TrialList ReadTrialsFile(const std::string &path, TrialFormat format);
ScoreSet ReadScoresFile(const std::string &path);

}  // namespace svtk

#endif  // SVTK_TRIALDATA_H_
