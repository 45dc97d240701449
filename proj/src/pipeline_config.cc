// src/pipeline_config.cc

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

#include "svtk/pipeline_config.h"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "svtk/error.h"

namespace svtk {

namespace {

std::string_view Trim(std::string_view s) {
  const char *ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

}  // namespace

KeyValueFile ParseKeyValue(std::string_view text) {
  KeyValueFile kv;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(line_no, "expected \"key = value\"");
    std::string key(Trim(line.substr(0, eq)));
    std::string value(Trim(line.substr(eq + 1)));
    if (key.empty()) throw ParseError(line_no, "empty key");
    for (const auto &[k, _] : kv.entries)
      if (k == key) throw ParseError(line_no, "duplicate key \"" + key + "\"");
    kv.entries.emplace_back(std::move(key), KeyValueEntry{std::move(value), line_no});
  }
  return kv;
}

KeyValueFile ReadKeyValueFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return ParseKeyValue(text);
  } catch (const ParseError &e) {
    throw ParseError(e.line(), path + ": " + e.detail());
  }
}

double ParseDouble(const KeyValueEntry &e) {
  char *end = nullptr;
  errno = 0;
  const double v = std::strtod(e.value.c_str(), &end);
  if (e.value.empty() || end != e.value.c_str() + e.value.size() || errno != 0 ||
      !std::isfinite(v))
    throw ParseError(e.line, "expected a number, got \"" + e.value + "\"");
  return v;
}

std::int64_t ParseInt(const KeyValueEntry &e) {
  char *end = nullptr;
  errno = 0;
  const long long v = std::strtoll(e.value.c_str(), &end, 10);
  if (e.value.empty() || end != e.value.c_str() + e.value.size() || errno != 0)
    throw ParseError(e.line, "expected an integer, got \"" + e.value + "\"");
  return v;
}

bool ParseBool(const KeyValueEntry &e) {
  if (e.value == "true" || e.value == "1") return true;
  if (e.value == "false" || e.value == "0") return false;
  throw ParseError(e.line, "expected true/false, got \"" + e.value + "\"");
}

ScoringMode ParseScoringMode(std::string_view name) {
  if (name == "raw") return ScoringMode::kRaw;
  if (name == "asnorm") return ScoringMode::kAsNorm;
  if (name == "msa") return ScoringMode::kMsa;
  throw InvalidArgument("unknown scoring mode \"" + std::string(name) + "\"");
}

const char *ScoringModeName(ScoringMode mode) {
  switch (mode) {
    case ScoringMode::kRaw: return "raw";
    case ScoringMode::kAsNorm: return "asnorm";
    case ScoringMode::kMsa: return "msa";
  }
  return "?";
}

PipelineConfig ParsePipelineConfig(std::string_view text, const std::string &base_dir) {
  const KeyValueFile kv = ParseKeyValue(text);
  PipelineConfig c;
  auto u64 = [](const KeyValueEntry &e) {
    const std::int64_t v = ParseInt(e);
    if (v < 0) throw ParseError(e.line, "expected a non-negative integer");
    return static_cast<std::uint64_t>(v);
  };
  for (const auto &[key, e] : kv.entries) {
    if (key == "sample_rate") c.sample_rate = static_cast<int>(ParseInt(e));
    else if (key == "mel.window_ms") c.mel.window_ms = ParseDouble(e);
    else if (key == "mel.hop_ms") c.mel.hop_ms = ParseDouble(e);
    else if (key == "mel.fft_size") c.mel.fft_size = static_cast<int>(ParseInt(e));
    else if (key == "mel.num_bins") c.mel.num_bins = static_cast<int>(ParseInt(e));
    else if (key == "mel.floor") c.mel.floor = ParseDouble(e);
    else if (key == "mel.low_hz") c.mel.low_hz = ParseDouble(e);
    else if (key == "mel.high_hz") c.mel.high_hz = ParseDouble(e);
    else if (key == "apply_cmn") c.apply_cmn = ParseBool(e);
    else if (key == "augment.p_noise") c.augment.p_noise = ParseDouble(e);
    else if (key == "augment.p_music") c.augment.p_music = ParseDouble(e);
    else if (key == "augment.p_babble") c.augment.p_babble = ParseDouble(e);
    else if (key == "augment.p_reverb") c.augment.p_reverb = ParseDouble(e);
    else if (key == "augment.snr_noise_lo") c.augment.snr_noise.lo = ParseDouble(e);
    else if (key == "augment.snr_noise_hi") c.augment.snr_noise.hi = ParseDouble(e);
    else if (key == "augment.snr_music_lo") c.augment.snr_music.lo = ParseDouble(e);
    else if (key == "augment.snr_music_hi") c.augment.snr_music.hi = ParseDouble(e);
    else if (key == "augment.snr_babble_lo") c.augment.snr_babble.lo = ParseDouble(e);
    else if (key == "augment.snr_babble_hi") c.augment.snr_babble.hi = ParseDouble(e);
    else if (key == "augment.babble_min") c.augment.babble_speakers.min = static_cast<int>(ParseInt(e));
    else if (key == "augment.babble_max") c.augment.babble_speakers.max = static_cast<int>(ParseInt(e));
    else if (key == "embed_dim") c.embed_dim = u64(e);
    else if (key == "embed_seed") c.embed_seed = u64(e);
    else if (key == "scoring") {
      try {
        c.scoring = ParseScoringMode(e.value);
      } catch (const InvalidArgument &ex) {
        throw ParseError(e.line, ex.what());
      }
    }
    else if (key == "cohort_path") c.cohort_path = e.value;
    else if (key == "top_k") c.top_k = u64(e);
    else if (key == "msa_segments") c.msa_segments = static_cast<int>(ParseInt(e));
    else if (key == "msa_segment_seconds") c.msa_segment_seconds = ParseDouble(e);
    else if (key == "p_target") c.p_target = ParseDouble(e);
    else if (key == "c_miss") c.c_miss = ParseDouble(e);
    else if (key == "c_fa") c.c_fa = ParseDouble(e);
    else if (key == "seed") c.seed = u64(e);
    else throw ParseError(e.line, "unknown config key \"" + key + "\"");
  }
  if (!c.cohort_path.empty() && !base_dir.empty() &&
      std::filesystem::path(c.cohort_path).is_relative())
    c.cohort_path = (std::filesystem::path(base_dir) / c.cohort_path).string();
  ValidatePipelineConfig(c);
  return c;
}

PipelineConfig LoadPipelineConfig(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::string base = std::filesystem::path(path).parent_path().string();
  try {
    return ParsePipelineConfig(text, base.empty() ? "." : base);
  } catch (const ParseError &e) {
    throw ParseError(e.line(), path + ": " + e.detail());
  }
}

void ValidatePipelineConfig(const PipelineConfig &c) {
  if (c.sample_rate <= 0) throw InvalidArgument("sample_rate must be positive");
  if (!(c.mel.window_ms > 0) || !(c.mel.hop_ms > 0) || c.mel.fft_size < 2 ||
      c.mel.num_bins < 1 || !(c.mel.floor > 0))
    throw InvalidArgument("invalid mel parameters");
  ValidatePolicy(c.augment);
  if (c.embed_dim == 0) throw InvalidArgument("embed_dim must be positive");
  if (c.top_k == 0) throw InvalidArgument("top_k must be positive");
  if (c.msa_segments < 1) throw InvalidArgument("msa_segments must be positive");
  if (!(c.msa_segment_seconds > 0)) throw InvalidArgument("msa_segment_seconds must be positive");
  if (!(c.p_target > 0.0 && c.p_target < 1.0)) throw InvalidArgument("p_target must lie in (0, 1)");
  if (!(c.c_miss > 0.0) || !(c.c_fa > 0.0)) throw InvalidArgument("DCF costs must be positive");
  if (c.scoring == ScoringMode::kAsNorm && c.cohort_path.empty())
    throw InvalidArgument("asnorm scoring requires cohort_path");
  if (!c.cohort_path.empty() && !std::filesystem::exists(c.cohort_path))
    throw IoError("cohort file " + c.cohort_path + " does not exist");
}

}  // namespace svtk
