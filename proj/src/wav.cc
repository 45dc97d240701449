// src/wav.cc

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

#include "svtk/wav.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include "svtk/error.h"

namespace svtk {

namespace {

std::uint32_t Le32(const unsigned char *p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t Le16(const unsigned char *p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void Put32(std::ostream &out, std::uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
               static_cast<char>((v >> 16) & 0xFF),
               static_cast<char>((v >> 24) & 0xFF)};
  out.write(b, 4);
}

void Put16(std::ostream &out, std::uint16_t v) {
  char b[2] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF)};
  out.write(b, 2);
}

}  // namespace

Waveform ReadWav(std::istream &in, int expected_rate) {
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw FormatError(0, "not a RIFF/WAVE file");

  bool have_fmt = false;
  int rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char *chunk = bytes.data() + pos;
    const std::uint32_t size = Le32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || body + 16 > bytes.size())
        throw FormatError(pos, "truncated fmt chunk");
      const std::uint16_t format = Le16(bytes.data() + body);
      const std::uint16_t channels = Le16(bytes.data() + body + 2);
      rate = static_cast<int>(Le32(bytes.data() + body + 4));
      const std::uint16_t bits = Le16(bytes.data() + body + 14);
      if (format != 1)
        throw FormatError(body, "unsupported WAV encoding " +
                                    std::to_string(format) + " (need PCM)");
      if (channels != 1)
        throw FormatError(body + 2, "expected mono, got " +
                                        std::to_string(channels) + " channels");
      if (bits != 16)
        throw FormatError(body + 14, "expected 16-bit samples, got " +
                                         std::to_string(bits));
      if (rate != expected_rate)
        throw FormatError(body + 4, "sample rate " + std::to_string(rate) +
                                        " Hz, expected " +
                                        std::to_string(expected_rate));
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw FormatError(pos, "data chunk before fmt chunk");
      if (body + size > bytes.size())
        throw FormatError(pos, "truncated data chunk");
      Waveform w;
      w.sample_rate = rate;
      w.samples.resize(size / 2);
      for (std::size_t i = 0; i < w.samples.size(); ++i) {
        auto v = static_cast<std::int16_t>(Le16(bytes.data() + body + 2 * i));
        w.samples[i] = v / 32768.0;
      }
      return w;
    }
    pos = body + size + (size & 1);
  }
  throw FormatError(pos, "no data chunk");
}

Waveform ReadWavFile(const std::string &path, int expected_rate) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  try {
    return ReadWav(in, expected_rate);
  } catch (const FormatError &e) {
    throw FormatError(e.offset(), path + ": " + e.detail());
  }
}

void WriteWav(const Waveform &w, std::ostream &out) {
  const auto data_bytes = static_cast<std::uint32_t>(w.samples.size() * 2);
  out.write("RIFF", 4);
  Put32(out, 36 + data_bytes);
  out.write("WAVEfmt ", 8);
  Put32(out, 16);
  Put16(out, 1);
  Put16(out, 1);
  Put32(out, static_cast<std::uint32_t>(w.sample_rate));
  Put32(out, static_cast<std::uint32_t>(w.sample_rate) * 2);
  Put16(out, 2);
  Put16(out, 16);
  out.write("data", 4);
  Put32(out, data_bytes);
  for (double s : w.samples) {
    double scaled = std::round(std::clamp(s, -1.0, 1.0) * 32768.0);
    auto v = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    Put16(out, static_cast<std::uint16_t>(v));
  }
  if (!out) throw IoError("failed writing WAV data");
}

void WriteWavFile(const Waveform &w, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  WriteWav(w, out);
}

}  // namespace svtk
