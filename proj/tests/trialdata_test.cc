// tests/trialdata_test.cc

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

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include "svtk/error.h"
#include "test_util.h"

namespace svtk {
namespace {

TEST(ParseTrials, LabeledTwoLines) {
  const TrialList t = ParseTrials("1 a.wav b.wav\n0 a.wav c.wav", TrialFormat::kLabeled);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_TRUE(t.labeled());
  EXPECT_EQ(t[0].label, true);
  EXPECT_EQ(t[1].label, false);
  EXPECT_EQ(t[1].test_id, "c.wav");
}

TEST(ParseTrials, Unlabeled) {
  const TrialList t = ParseTrials("a.wav b.wav", TrialFormat::kUnlabeled);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_FALSE(t.labeled());
  EXPECT_FALSE(t[0].label.has_value());
}

TEST(ParseTrials, LabelOutOfRangeReportsLine) {
  try {
    ParseTrials("2 a.wav b.wav", TrialFormat::kLabeled);
    FAIL();
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 1u);
  }
  try {
    ParseTrials("1 a b\n\n1 a\n", TrialFormat::kLabeled);
    FAIL();
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(ParseTrials, WrongTokenCount) {
  EXPECT_THROW(ParseTrials("a b c", TrialFormat::kUnlabeled), ParseError);
  EXPECT_THROW(ParseTrials("1 a b c", TrialFormat::kLabeled), ParseError);
  EXPECT_THROW(ParseTrials("a", TrialFormat::kAuto), ParseError);
}

TEST(ParseTrials, AutoDetectAndMixedRejected) {
  EXPECT_TRUE(ParseTrials("1 a b\n0 a c\n", TrialFormat::kAuto).labeled());
  EXPECT_FALSE(ParseTrials("a b\nc d\n", TrialFormat::kAuto).labeled());
  EXPECT_THROW(ParseTrials("1 a b\na c\n", TrialFormat::kAuto), ParseError);
}

TEST(ParseTrials, DuplicatesAllowedAndOrderKept) {
  const TrialList t = ParseTrials("1 x y\n1 x y\n0 b a\n", TrialFormat::kLabeled);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0], t[1]);
  EXPECT_EQ(t[2].enroll_id, "b");
}

TEST(ParseTrials, IdsAreOpaque) {
  const TrialList t =
      ParseTrials("1 id10270/x6uYqmx31kE/00001.wav id10300/ize_eiCFEg0/00003.wav\n",
                  TrialFormat::kLabeled);
  EXPECT_EQ(t[0].enroll_id, "id10270/x6uYqmx31kE/00001.wav");
}

TEST(ParseTrials, RejectsInvalidUtf8) {
  EXPECT_THROW(ParseTrials("1 a b\n1 \xff\xfe c\n", TrialFormat::kLabeled), ParseError);
  EXPECT_NO_THROW(ParseTrials("1 caf\xc3\xa9 b\n", TrialFormat::kLabeled));
}

TEST(ParseTrials, CrLfTolerated) {
  const TrialList t = ParseTrials("1 a b\r\n0 a c\r\n", TrialFormat::kLabeled);
  EXPECT_EQ(t[1].test_id, "c");
}

TEST(TrialList, RejectsBadIdsAndMixedLabels) {
  EXPECT_THROW(TrialList({Trial{"", "b", std::nullopt}}), InvalidArgument);
  EXPECT_THROW(TrialList({Trial{"a b", "c", std::nullopt}}), InvalidArgument);
  EXPECT_THROW(TrialList({Trial{"a", "b", true}, Trial{"a", "c", std::nullopt}}),
               InvalidArgument);
}

TEST(WriteTrials, RoundTrip) {
  for (TrialFormat f : {TrialFormat::kLabeled, TrialFormat::kUnlabeled}) {
    const std::string text = f == TrialFormat::kLabeled ? "1  a   b\n0 c d\n" : "a b\n c  d \n";
    const TrialList t = ParseTrials(text, f);
    std::ostringstream out;
    WriteTrials(t, out);
    EXPECT_EQ(ParseTrials(out.str(), f), t);
  }
}

EmbeddingStore RandomStore(std::uint32_t dim, int count, Rng &rng) {
  EmbeddingStore s(dim);
  for (int i = 0; i < count; ++i)
    s.Add("utt" + std::to_string(i), std::span<const double>(testing::Gaussian(dim, rng)));
  return s;
}

std::string Serialize(const EmbeddingStore &s) {
  std::ostringstream out;
  WriteEmbeddings(s, out);
  return out.str();
}

EmbeddingStore Deserialize(const std::string &bytes) {
  std::istringstream in(bytes);
  return ReadEmbeddings(in);
}

TEST(EmbeddingStore, EmptyRoundTrip) {
  const EmbeddingStore s(512);
  const EmbeddingStore back = Deserialize(Serialize(s));
  EXPECT_EQ(back.dim(), 512u);
  EXPECT_EQ(back.size(), 0u);
  EXPECT_TRUE(back == s);
}

TEST(EmbeddingStore, RoundTripIsBitIdentical) {
  Rng rng(3);
  const EmbeddingStore s = RandomStore(8, 3, rng);
  const std::string bytes = Serialize(s);
  const EmbeddingStore back = Deserialize(bytes);
  ASSERT_EQ(back.ids(), s.ids());
  for (std::size_t i = 0; i < s.size(); ++i)
    EXPECT_EQ(std::memcmp(back.row(i).data(), s.row(i).data(), 8 * sizeof(float)), 0);
  EXPECT_EQ(Serialize(back), bytes);
}

TEST(EmbeddingStore, ByteLayout) {
  EmbeddingStore s(2);
  const float v[2] = {1.0f, -2.5f};
  s.Add("ab", std::span<const float>(v, 2));
  const std::string b = Serialize(s);
  ASSERT_EQ(b.size(), 4u + 4 + 8 + 2 + 2 + 8);
  EXPECT_EQ(b.substr(0, 4), "EMB1");
  const auto u8 = [&](std::size_t i) { return static_cast<unsigned char>(b[i]); };
  EXPECT_EQ(u8(4), 2);  // dim, little-endian
  EXPECT_EQ(u8(5) | u8(6) | u8(7), 0);
  EXPECT_EQ(u8(8), 1);  // count
  EXPECT_EQ(u8(16), 2);  // id length
  EXPECT_EQ(u8(17), 0);
  EXPECT_EQ(b.substr(18, 2), "ab");
  float f;
  std::memcpy(&f, b.data() + 24, 4);
  EXPECT_EQ(f, -2.5f);
}

TEST(EmbeddingStore, BadMagic) {
  Rng rng(1);
  std::string bytes = Serialize(RandomStore(4, 2, rng));
  bytes[3] = '2';
  try {
    Deserialize(bytes);
    FAIL();
  } catch (const FormatError &e) {
    EXPECT_EQ(e.offset(), 0u);
  }
}

TEST(EmbeddingStore, TruncationNamesOffset) {
  Rng rng(2);
  const std::string bytes = Serialize(RandomStore(4, 2, rng));
  for (std::size_t cut : {std::size_t{2}, std::size_t{10}, bytes.size() - 1}) {
    try {
      Deserialize(bytes.substr(0, cut));
      FAIL() << cut;
    } catch (const FormatError &e) {
      EXPECT_LE(e.offset(), cut);
      EXPECT_NE(std::string(e.what()).find("offset"), std::string::npos);
    }
  }
}

TEST(EmbeddingStore, DuplicateIdOnRead) {
  EmbeddingStore s(1);
  const float v = 1.0f;
  s.Add("a", std::span<const float>(&v, 1));
  s.Add("b", std::span<const float>(&v, 1));
  std::string bytes = Serialize(s);
  bytes[bytes.size() - 5] = 'a';  // rename "b" to "a"
  try {
    Deserialize(bytes);
    FAIL();
  } catch (const FormatError &e) {
    EXPECT_EQ(e.offset(), 4u + 4 + 8 + 2 + 1 + 4);
  }
}

TEST(EmbeddingStore, AddValidation) {
  EmbeddingStore s(2);
  const double good[2] = {0.6, 0.8};
  const double bad[2] = {NAN, 0.0};
  s.Add("x", std::span<const double>(good, 2));
  EXPECT_THROW(s.Add("x", std::span<const double>(good, 2)), InvalidArgument);
  EXPECT_THROW(s.Add("y", std::span<const double>(bad, 2)), InvalidArgument);
  EXPECT_THROW(s.Add("z", std::span<const double>(good, 1)), InvalidArgument);
  EXPECT_THROW(s.Add("has space", std::span<const double>(good, 2)), InvalidArgument);
  EXPECT_THROW(s.at("missing"), InvalidArgument);
  EXPECT_THROW(EmbeddingStore(0), InvalidArgument);
}

TEST(EmbeddingStore, NormalizedFlag) {
  EmbeddingStore s(2);
  EXPECT_TRUE(s.normalized());
  const double unit[2] = {0.6, 0.8}, other[2] = {3, 4};
  s.Add("u", std::span<const double>(unit, 2));
  EXPECT_TRUE(s.normalized());
  s.Add("v", std::span<const double>(other, 2));
  EXPECT_FALSE(s.normalized());
}

TEST(Scores, SerializeExample) {
  const TrialList t = ParseTrials("a.wav b.wav", TrialFormat::kUnlabeled);
  EXPECT_EQ(SerializeScores(ScoreSet(t, {0.5})), "a.wav b.wav 0.500000000\n");
  EXPECT_EQ(SerializeScores(ScoreSet()), "");
}

TEST(Scores, FormatKeepsNineSignificantDigits) {
  EXPECT_EQ(FormatScore(0.5), "0.500000000");
  EXPECT_EQ(FormatScore(-1.25), "-1.250000000");
  EXPECT_EQ(FormatScore(123.456789012), "123.456789012");
  EXPECT_EQ(FormatScore(0.000123456789), "0.000123456789");
  EXPECT_EQ(FormatScore(0.0), "0.000000000");
}

TEST(Scores, RoundTripRandom) {
  Rng rng(11);
  std::vector<Trial> trials;
  std::vector<double> scores;
  for (int i = 0; i < 100; ++i) {
    trials.push_back({"e" + std::to_string(i % 7), "t" + std::to_string(i), std::nullopt});
    scores.push_back(UniformReal(rng, -1, 1) * std::pow(10.0, UniformInt(rng, -3, 3)));
  }
  const ScoreSet set(TrialList(trials), scores);
  const ScoreSet back = ParseScores(SerializeScores(set));
  ASSERT_EQ(back.size(), 100u);
  EXPECT_EQ(back.trials(), set.trials());
  for (int i = 0; i < 100; ++i) {
    EXPECT_LE(std::abs(back.scores()[i] - scores[i]), 1e-8);
    // Nine significant digits bound the relative error too.
    EXPECT_LE(std::abs(back.scores()[i] - scores[i]), 5.0001e-9 * std::abs(scores[i]));
  }
  // Re-serializing parsed text is stable.
  EXPECT_EQ(SerializeScores(back), SerializeScores(set));
}

TEST(Scores, ParseErrors) {
  EXPECT_THROW(ParseScores("a b\n"), ParseError);
  EXPECT_THROW(ParseScores("a b 0.1 x\n"), ParseError);
  EXPECT_THROW(ParseScores("a b nan\n"), ParseError);
  EXPECT_THROW(ParseScores("a b 1.0q\n"), ParseError);
  EXPECT_THROW(ScoreSet(ParseTrials("a b", TrialFormat::kUnlabeled), {INFINITY}),
               InvalidArgument);
  EXPECT_THROW(ScoreSet(ParseTrials("a b", TrialFormat::kUnlabeled), {}), InvalidArgument);
}

TEST(Scores, AlignRequiresSameOrder) {
  const TrialList labeled = ParseTrials("1 a b\n0 a c\n", TrialFormat::kLabeled);
  const ScoreSet s = AlignScores(labeled, ParseScores("a b 0.9\na c 0.1\n"));
  EXPECT_TRUE(s.trials().labeled());
  EXPECT_EQ(s.scores()[1], 0.1);
  EXPECT_THROW(AlignScores(labeled, ParseScores("a c 0.1\na b 0.9\n")), InvalidArgument);
  EXPECT_THROW(AlignScores(labeled, ParseScores("a b 0.9\n")), InvalidArgument);
}

TEST(Files, MissingFilesNamePath) {
  try {
    ReadTrialsFile("/nonexistent/trials.txt", TrialFormat::kAuto);
    FAIL();
  } catch (const IoError &e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/trials.txt"), std::string::npos);
  }
  EXPECT_THROW(ReadEmbeddingsFile("/nonexistent/e.emb"), IoError);
}

TEST(Files, ParseErrorFromFileKeepsSingleLinePrefix) {
  testing::TempDir dir;
  testing::WriteText(dir.file("t.txt"), "1 a b\n7 a c\n");
  try {
    ReadTrialsFile(dir.file("t.txt"), TrialFormat::kLabeled);
    FAIL();
  } catch (const ParseError &e) {
    const std::string what = e.what();
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(what.find("t.txt"), std::string::npos);
    EXPECT_EQ(what.find("line"), what.rfind("line"));
  }
}

TEST(Files, EmbeddingFileRoundTrip) {
  testing::TempDir dir;
  Rng rng(5);
  const EmbeddingStore s = RandomStore(16, 10, rng);
  WriteEmbeddingsFile(s, dir.file("e.emb"));
  EXPECT_TRUE(ReadEmbeddingsFile(dir.file("e.emb")) == s);
}

}  // namespace
}  // namespace svtk
