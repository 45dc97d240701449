// src/trialdata.cc

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

#include "svtk/trialdata.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "svtk/error.h"

namespace svtk {

namespace {

constexpr char kEmbMagic[4] = {'E', 'M', 'B', '1'};
constexpr double kUnitTolerance = 1e-6;

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' ||
         c == '\f';
}

std::vector<std::string_view> Tokenize(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && IsSpace(line[i])) ++i;
    std::size_t start = i;
    while (i < line.size() && !IsSpace(line[i])) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

// Returns the byte offset of the first invalid UTF-8 sequence, or npos.
std::size_t FindInvalidUtf8(std::string_view text) {
  std::size_t i = 0;
  const auto *s = reinterpret_cast<const unsigned char *>(text.data());
  while (i < text.size()) {
    unsigned char c = s[i];
    std::size_t len;
    std::uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return i;
    }
    if (i + len > text.size()) return i;
    for (std::size_t k = 1; k < len; ++k) {
      if ((s[i + k] & 0xC0) != 0x80) return i;
      cp = (cp << 6) | (s[i + k] & 0x3F);
    }
    // Overlong forms, surrogates and out-of-range code points.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
        (len == 4 && (cp < 0x10000 || cp > 0x10FFFF)) ||
        (cp >= 0xD800 && cp <= 0xDFFF))
      return i;
    i += len;
  }
  return std::string_view::npos;
}

void CheckUtf8(std::string_view text) {
  std::size_t bad = FindInvalidUtf8(text);
  if (bad == std::string_view::npos) return;
  std::size_t line = 1;
  for (std::size_t i = 0; i < bad; ++i)
    if (text[i] == '\n') ++line;
  throw ParseError(line, "invalid UTF-8 at byte " + std::to_string(bad));
}

// Calls fn(line_number, line) for every line, including empty ones.
template <typename Fn>
void ForEachLine(std::string_view text, Fn &&fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    fn(++line_no, text.substr(pos, end - pos));
    pos = end + 1;
  }
}

std::string Slurp(std::istream &in) {
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

double SquaredNorm(std::span<const float> v) {
  double sum = 0.0;
  for (float x : v) sum += static_cast<double>(x) * x;
  return sum;
}

bool IsUnit(std::span<const float> v) {
  return std::abs(std::sqrt(SquaredNorm(v)) - 1.0) <= kUnitTolerance;
}

// Little-endian primitive I/O.
template <typename T>
void PutLe(std::ostream &out, T value) {
  static_assert(std::is_unsigned_v<T>);
  char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i)
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  out.write(bytes, sizeof(T));
}

class ByteReader {
 public:
  explicit ByteReader(std::istream &in) : in_(in) {}

  std::uint64_t offset() const { return offset_; }

  void Read(char *dst, std::size_t n, const char *what) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n)
      throw FormatError(offset_ + static_cast<std::uint64_t>(in_.gcount()),
                        std::string("truncated ") + what);
    offset_ += n;
  }

  template <typename T>
  T GetLe(const char *what) {
    unsigned char bytes[sizeof(T)];
    Read(reinterpret_cast<char *>(bytes), sizeof(T), what);
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      value |= static_cast<T>(bytes[i]) << (8 * i);
    return value;
  }

 private:
  std::istream &in_;
  std::uint64_t offset_ = 0;
};

}  // namespace

bool IsValidId(std::string_view id) {
  if (id.empty()) return false;
  for (char c : id)
    if (IsSpace(c)) return false;
  return true;
}

TrialList::TrialList(std::vector<Trial> trials) : trials_(std::move(trials)) {
  if (!trials_.empty()) labeled_ = trials_.front().label.has_value();
  for (std::size_t i = 0; i < trials_.size(); ++i) {
    const Trial &t = trials_[i];
    if (!IsValidId(t.enroll_id) || !IsValidId(t.test_id))
      throw InvalidArgument("trial " + std::to_string(i) + ": invalid id");
    if (t.label.has_value() != labeled_)
      throw InvalidArgument("trial " + std::to_string(i) +
                            ": labeling must be all-or-none");
  }
}

TrialList ParseTrials(std::string_view text, TrialFormat format) {
  CheckUtf8(text);
  std::vector<Trial> trials;
  ForEachLine(text, [&](std::size_t line_no, std::string_view line) {
    std::vector<std::string_view> tok = Tokenize(line);
    if (tok.empty()) return;
    if (format == TrialFormat::kAuto) {
      if (tok.size() == 3)
        format = TrialFormat::kLabeled;
      else if (tok.size() == 2)
        format = TrialFormat::kUnlabeled;
      else
        throw ParseError(line_no, "expected 2 or 3 tokens, got " +
                                      std::to_string(tok.size()));
    }
    Trial trial;
    if (format == TrialFormat::kLabeled) {
      if (tok.size() != 3)
        throw ParseError(line_no, "expected \"label enroll test\", got " +
                                      std::to_string(tok.size()) + " tokens");
      if (tok[0] == "1")
        trial.label = true;
      else if (tok[0] == "0")
        trial.label = false;
      else
        throw ParseError(line_no,
                         "label must be 0 or 1, got \"" + std::string(tok[0]) +
                             "\"");
      trial.enroll_id = tok[1];
      trial.test_id = tok[2];
    } else {
      if (tok.size() != 2)
        throw ParseError(line_no, "expected \"enroll test\", got " +
                                      std::to_string(tok.size()) + " tokens");
      trial.enroll_id = tok[0];
      trial.test_id = tok[1];
    }
    trials.push_back(std::move(trial));
  });
  return TrialList(std::move(trials));
}

TrialList ParseTrials(std::istream &in, TrialFormat format) {
  return ParseTrials(Slurp(in), format);
}

void WriteTrials(const TrialList &trials, std::ostream &out) {
  for (const Trial &t : trials.trials()) {
    if (t.label) out << (*t.label ? "1 " : "0 ");
    out << t.enroll_id << ' ' << t.test_id << '\n';
  }
}

EmbeddingStore::EmbeddingStore(std::uint32_t dim) : dim_(dim) {
  if (dim == 0) throw InvalidArgument("embedding dim must be positive");
}

void EmbeddingStore::Add(std::string id, std::span<const float> vector) {
  if (!IsValidId(id)) throw InvalidArgument("invalid embedding id \"" + id + "\"");
  if (id.size() > 0xFFFF) throw InvalidArgument("embedding id too long");
  if (vector.size() != dim_)
    throw InvalidArgument("embedding \"" + id + "\" has length " +
                          std::to_string(vector.size()) + ", expected " +
                          std::to_string(dim_));
  for (float x : vector)
    if (!std::isfinite(x))
      throw InvalidArgument("embedding \"" + id + "\" has non-finite entry");
  if (index_.count(id)) throw InvalidArgument("duplicate embedding id \"" + id + "\"");
  index_.emplace(id, ids_.size());
  ids_.push_back(std::move(id));
  data_.insert(data_.end(), vector.begin(), vector.end());
  if (!IsUnit(vector)) ++non_unit_count_;
}

void EmbeddingStore::Add(std::string id, std::span<const double> vector) {
  std::vector<float> narrowed(vector.begin(), vector.end());
  Add(std::move(id), std::span<const float>(narrowed));
}

std::span<const float> EmbeddingStore::row(std::size_t index) const {
  return std::span<const float>(data_).subspan(index * dim_, dim_);
}

std::optional<std::size_t> EmbeddingStore::Find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const float> EmbeddingStore::at(std::string_view id) const {
  auto index = Find(id);
  if (!index)
    throw InvalidArgument("no embedding for id \"" + std::string(id) + "\"");
  return row(*index);
}

bool EmbeddingStore::operator==(const EmbeddingStore &other) const {
  if (dim_ != other.dim_ || ids_ != other.ids_) return false;
  return std::memcmp(data_.data(), other.data_.data(),
                     data_.size() * sizeof(float)) == 0;
}

void WriteEmbeddings(const EmbeddingStore &store, std::ostream &out) {
  out.write(kEmbMagic, 4);
  PutLe<std::uint32_t>(out, store.dim());
  PutLe<std::uint64_t>(out, store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    const std::string &id = store.ids()[i];
    PutLe<std::uint16_t>(out, static_cast<std::uint16_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
    for (float x : store.row(i)) PutLe<std::uint32_t>(out, std::bit_cast<std::uint32_t>(x));
  }
  if (!out) throw IoError("failed writing embedding store");
}

EmbeddingStore ReadEmbeddings(std::istream &in) {
  ByteReader reader(in);
  char magic[4];
  reader.Read(magic, 4, "magic");
  if (std::memcmp(magic, kEmbMagic, 4) != 0)
    throw FormatError(0, "bad magic \"" + std::string(magic, 4) +
                             "\", expected \"EMB1\"");
  const auto dim = reader.GetLe<std::uint32_t>("header");
  if (dim == 0) throw FormatError(4, "dim must be positive");
  const auto count = reader.GetLe<std::uint64_t>("header");
  EmbeddingStore store(dim);
  std::vector<float> vec(dim);
  for (std::uint64_t r = 0; r < count; ++r) {
    const std::uint64_t record_offset = reader.offset();
    const auto id_len = reader.GetLe<std::uint16_t>("record");
    std::string id(id_len, '\0');
    reader.Read(id.data(), id_len, "record id");
    for (std::uint32_t d = 0; d < dim; ++d)
      vec[d] = std::bit_cast<float>(reader.GetLe<std::uint32_t>("record vector"));
    if (!IsValidId(id))
      throw FormatError(record_offset, "invalid id in record " + std::to_string(r));
    if (store.Find(id))
      throw FormatError(record_offset, "duplicate id \"" + id + "\"");
    for (float x : vec)
      if (!std::isfinite(x))
        throw FormatError(record_offset, "non-finite value for id \"" + id + "\"");
    store.Add(std::move(id), std::span<const float>(vec));
  }
  return store;
}

void WriteEmbeddingsFile(const EmbeddingStore &store, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  WriteEmbeddings(store, out);
}

EmbeddingStore ReadEmbeddingsFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  try {
    return ReadEmbeddings(in);
  } catch (const FormatError &e) {
    throw FormatError(e.offset(), path + ": " + e.detail());
  }
}

ScoreSet::ScoreSet(TrialList trials, std::vector<double> scores)
    : trials_(std::move(trials)), scores_(std::move(scores)) {
  if (trials_.size() != scores_.size())
    throw InvalidArgument("score count " + std::to_string(scores_.size()) +
                          " does not match trial count " +
                          std::to_string(trials_.size()));
  for (std::size_t i = 0; i < scores_.size(); ++i)
    if (!std::isfinite(scores_[i]))
      throw InvalidArgument("non-finite score for trial " + std::to_string(i));
}

std::string FormatScore(double score) {
  int decimals = 9;
  if (score != 0.0) {
    int exponent = static_cast<int>(std::floor(std::log10(std::abs(score))));
    decimals = std::clamp(8 - exponent, 9, 17);
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, score);
  return buf;
}

void SerializeScores(const ScoreSet &set, std::ostream &out) {
  const auto &trials = set.trials();
  for (std::size_t i = 0; i < set.size(); ++i)
    out << trials[i].enroll_id << ' ' << trials[i].test_id << ' '
        << FormatScore(set.scores()[i]) << '\n';
}

std::string SerializeScores(const ScoreSet &set) {
  std::ostringstream out;
  SerializeScores(set, out);
  return out.str();
}

ScoreSet ParseScores(std::string_view text) {
  CheckUtf8(text);
  std::vector<Trial> trials;
  std::vector<double> scores;
  ForEachLine(text, [&](std::size_t line_no, std::string_view line) {
    std::vector<std::string_view> tok = Tokenize(line);
    if (tok.empty()) return;
    if (tok.size() != 3)
      throw ParseError(line_no, "expected \"enroll test score\", got " +
                                    std::to_string(tok.size()) + " tokens");
    std::string number(tok[2]);
    char *end = nullptr;
    double value = std::strtod(number.c_str(), &end);
    if (end != number.c_str() + number.size() || !std::isfinite(value))
      throw ParseError(line_no, "bad score \"" + number + "\"");
    trials.push_back(Trial{std::string(tok[0]), std::string(tok[1]), std::nullopt});
    scores.push_back(value);
  });
  return ScoreSet(TrialList(std::move(trials)), std::move(scores));
}

ScoreSet ParseScores(std::istream &in) { return ParseScores(Slurp(in)); }

ScoreSet AlignScores(const TrialList &trials, const ScoreSet &scores) {
  if (trials.size() != scores.size())
    throw InvalidArgument("score file has " + std::to_string(scores.size()) +
                          " lines but trial list has " +
                          std::to_string(trials.size()));
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const Trial &a = trials[i];
    const Trial &b = scores.trials()[i];
    if (a.enroll_id != b.enroll_id || a.test_id != b.test_id)
      throw InvalidArgument("trial " + std::to_string(i + 1) +
                            " mismatch: trial list has \"" + a.enroll_id + " " +
                            a.test_id + "\", scores have \"" + b.enroll_id +
                            " " + b.test_id + "\"");
  }
  return ScoreSet(trials, scores.scores());
}

TrialList ReadTrialsFile(const std::string &path, TrialFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open trials file " + path);
  try {
    return ParseTrials(in, format);
  } catch (const ParseError &e) {
    throw ParseError(e.line(), path + ": " + e.detail());
  }
}

ScoreSet ReadScoresFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scores file " + path);
  try {
    return ParseScores(in);
  } catch (const ParseError &e) {
    throw ParseError(e.line(), path + ": " + e.detail());
  }
}

}  // namespace svtk
