// src/cli.cc

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

#include "svtk/cli.h"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "svtk/augment.h"
#include "svtk/error.h"
#include "svtk/features.h"
#include "svtk/fusion.h"
#include "svtk/metrics.h"
#include "svtk/model_math.h"
#include "svtk/pipeline_config.h"
#include "svtk/schedule.h"
#include "svtk/scoring.h"
#include "svtk/selftest.h"
#include "svtk/trialdata.h"
#include "svtk/wav.h"

namespace svtk {

namespace {

std::string Fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

PipelineConfig LoadConfigOrDefault(const std::string &path) {
  return path.empty() ? PipelineConfig{} : LoadPipelineConfig(path);
}

// Runs `write` against `path`, or against `out` when path is empty or "-".
template <typename Fn>
void WriteTo(const std::string &path, std::ostream &out, Fn &&write) {
  if (path.empty() || path == "-") {
    write(out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path + " for writing");
  write(file);
  if (!file) throw IoError("failed writing " + path);
}

// "id path" lines; relative paths resolve against the list's directory.
std::vector<std::pair<std::string, std::string>> ReadWavList(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open wav list " + path);
  const auto base = std::filesystem::path(path).parent_path();
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tok(line);
    std::string id, file, extra;
    if (!(tok >> id)) continue;
    if (!(tok >> file) || (tok >> extra))
      throw ParseError(line_no, path + ": expected \"id path\"");
    std::filesystem::path p(file);
    if (p.is_relative()) p = base / p;
    out.emplace_back(std::move(id), p.string());
  }
  return out;
}

struct Globals {
  unsigned threads = 1;
};

int RunFeatures(const std::string &config_path, const std::string &wav,
                const std::string &out_path, bool no_cmn, std::ostream &out) {
  const PipelineConfig cfg = LoadConfigOrDefault(config_path);
  const Waveform w = ReadWavFile(wav, cfg.sample_rate);
  MelFeatures f = MelFilterbank(cfg.sample_rate, cfg.mel).Compute(w);
  if (cfg.apply_cmn && !no_cmn) f = ApplyCmn(std::move(f));
  WriteTo(out_path, out, [&](std::ostream &o) { WriteMelFeatures(f, o); });
  if (!out_path.empty() && out_path != "-")
    out << "rows " << f.rows() << "\nframes " << f.frames() << '\n';
  return 0;
}

int RunAugment(const std::string &config_path, const std::string &wav,
               const std::string &manifest, const std::string &out_path,
               std::optional<std::uint64_t> seed, double speed, std::ostream &out) {
  const PipelineConfig cfg = LoadConfigOrDefault(config_path);
  Waveform w = ReadWavFile(wav, cfg.sample_rate);
  if (speed != 1.0) w = SpeedPerturb(w, speed);
  const NoiseBank bank = LoadNoiseBank(manifest, cfg.sample_rate);
  Rng rng(StageSeed(seed.value_or(cfg.seed), "augment"));
  const AugmentResult result = ApplyPolicy(w, cfg.augment, bank, rng);
  WriteWavFile(result.output, out_path);
  const char *names[4] = {"noise", "music", "babble", "reverb"};
  for (int i = 0; i < 4; ++i) out << names[i] << ' ' << (result.applied[i] ? 1 : 0) << '\n';
  return 0;
}

int RunEmbed(const std::string &config_path, const std::string &list_path,
             const std::string &out_path, std::optional<std::uint64_t> seed, int segments,
             std::optional<double> segment_seconds, const std::string &utt2spk_path,
             const Globals &g, std::ostream &out) {
  const PipelineConfig cfg = LoadConfigOrDefault(config_path);
  const auto list = ReadWavList(list_path);
  const MelFilterbank bank(cfg.sample_rate, cfg.mel);
  const ToyEmbedder embedder(seed.value_or(cfg.embed_seed),
                             static_cast<std::size_t>(cfg.mel.num_bins), cfg.embed_dim);
  const double seg_sec = segment_seconds.value_or(cfg.msa_segment_seconds);
  if (segments < 0) throw InvalidArgument("--segments must be non-negative");

  auto embed = [&](const Waveform &w) {
    MelFeatures f = bank.Compute(w);
    if (cfg.apply_cmn) f = ApplyCmn(std::move(f));
    return embedder.Embed(f);
  };
  // Per-utterance results, filled in parallel and written in list order.
  std::vector<std::vector<std::vector<double>>> results(list.size());
  ParallelFor(list.size(), g.threads, [&](std::size_t i) {
    const Waveform w = ReadWavFile(list[i].second, cfg.sample_rate);
    if (w.empty()) throw InvalidArgument(list[i].second + ": empty waveform");
    if (segments == 0) {
      results[i].push_back(embed(w));
      return;
    }
    const SegmentPlan plan = PlanSegments(w.duration(), segments, seg_sec);
    const auto seg_len = static_cast<std::size_t>(std::llround(seg_sec * w.sample_rate));
    const std::size_t padded = std::max(w.size(), seg_len);
    const Waveform full = FitLength(w, padded);
    for (double start : plan.starts) {
      auto offset = static_cast<std::size_t>(std::llround(start * w.sample_rate));
      offset = std::min(offset, padded - seg_len);
      Waveform seg;
      seg.sample_rate = w.sample_rate;
      seg.samples.assign(full.samples.begin() + offset,
                         full.samples.begin() + offset + seg_len);
      results[i].push_back(embed(seg));
    }
  });

  EmbeddingStore store(static_cast<std::uint32_t>(cfg.embed_dim));
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (segments == 0) {
      store.Add(list[i].first, std::span<const double>(results[i][0]));
    } else {
      for (int s = 0; s < segments; ++s)
        store.Add(SegmentId(list[i].first, s), std::span<const double>(results[i][s]));
    }
  }
  if (!utt2spk_path.empty()) {
    if (segments != 0) throw InvalidArgument("--speaker-means cannot be combined with --segments");
    store = SpeakerMeanCohort(store, ReadUtt2Spk(utt2spk_path));
  }
  WriteEmbeddingsFile(store, out_path);
  out << "embeddings " << store.size() << "\ndim " << store.dim() << '\n';
  return 0;
}

int RunScore(const std::string &config_path, const std::string &trials_path,
             const std::string &emb_path, bool asnorm, bool msa, std::string cohort_path,
             std::optional<std::size_t> top_k, std::optional<int> segments,
             const std::string &out_path, const Globals &g, std::ostream &out) {
  const PipelineConfig cfg = LoadConfigOrDefault(config_path);
  if (asnorm && msa) throw CLI::ValidationError("--asnorm and --msa are mutually exclusive");
  ScoringMode mode = cfg.scoring;
  if (asnorm) mode = ScoringMode::kAsNorm;
  if (msa) mode = ScoringMode::kMsa;
  if (cohort_path.empty()) cohort_path = cfg.cohort_path;
  if (mode == ScoringMode::kAsNorm && cohort_path.empty())
    throw CLI::ValidationError("--asnorm requires --cohort");

  const TrialList trials = ReadTrialsFile(trials_path, TrialFormat::kAuto);
  const EmbeddingStore emb = ReadEmbeddingsFile(emb_path);
  std::optional<EmbeddingStore> cohort;
  ScoringOptions opts;
  opts.mode = mode;
  opts.top_k = top_k.value_or(cfg.top_k);
  opts.msa_segments = segments.value_or(cfg.msa_segments);
  opts.threads = g.threads;
  if (mode == ScoringMode::kAsNorm) {
    cohort = ReadEmbeddingsFile(cohort_path);
    opts.cohort = &*cohort;
  }
  const ScoreSet scores = ScoreTrials(trials, emb, opts);
  WriteTo(out_path, out, [&](std::ostream &o) { SerializeScores(scores, o); });
  return 0;
}

int RunEvaluate(const std::string &config_path, const std::string &trials_path,
                const std::string &scores_path, std::optional<double> p_target,
                std::optional<double> c_miss, std::optional<double> c_fa, std::ostream &out) {
  const PipelineConfig cfg = LoadConfigOrDefault(config_path);
  const TrialList trials = ReadTrialsFile(trials_path, TrialFormat::kLabeled);
  const ScoreSet scores = AlignScores(trials, ReadScoresFile(scores_path));
  const DcfConfig dcf{p_target.value_or(cfg.p_target), c_miss.value_or(cfg.c_miss),
                      c_fa.value_or(cfg.c_fa)};
  ValidateDcfConfig(dcf);
  const RocCurve roc = ComputeRoc(scores);
  out << "EER(%) " << Fixed6(ComputeEer(roc)) << "\nminDCF " << Fixed6(ComputeMinDcf(roc, dcf))
      << '\n';
  return 0;
}

int RunFuse(const std::string &trials_path, const std::vector<std::string> &score_paths,
            bool fit_labels, const std::string &model_out, const std::string &model_in,
            double lambda, double p_target, const std::string &out_path, std::ostream &out,
            std::ostream &err) {
  if (fit_labels == !model_in.empty())
    throw CLI::ValidationError("give exactly one of --fit-labels or --load-model");
  const TrialList trials =
      ReadTrialsFile(trials_path, fit_labels ? TrialFormat::kLabeled : TrialFormat::kAuto);
  std::vector<ScoreSet> systems;
  for (const auto &p : score_paths) systems.push_back(AlignScores(trials, ReadScoresFile(p)));
  const ScoreMatrix matrix = StackScoreSets(systems);

  FusionModel model;
  if (fit_labels) {
    auto labels = std::make_unique<bool[]>(trials.size());
    for (std::size_t i = 0; i < trials.size(); ++i) labels[i] = *trials[i].label;
    FusionOptions opts;
    opts.lambda = lambda;
    model = FitFusion(matrix, std::span<const bool>(labels.get(), trials.size()), opts);
  } else {
    std::ifstream in(model_in);
    if (!in) throw IoError("cannot open fusion model " + model_in);
    model = ReadFusionModel(in);
  }
  if (!model_out.empty())
    WriteTo(model_out, out, [&](std::ostream &o) { WriteFusionModel(model, o); });
  const ScoreSet fused(trials, Fuse(model, matrix));
  if (fit_labels) {
    const RocCurve roc = ComputeRoc(fused);
    err << "fusion: iterations " << model.iterations << (model.converged ? " converged" : " not-converged")
        << ", dev EER(%) " << Fixed6(ComputeEer(roc)) << ", dev minDCF "
        << Fixed6(ComputeMinDcf(roc, DcfConfig{p_target, 1.0, 1.0})) << '\n';
  }
  WriteTo(out_path, out, [&](std::ostream &o) { SerializeScores(fused, o); });
  return 0;
}

int RunScheduleDump(const std::string &config_path, std::int64_t steps, std::ostream &out) {
  if (steps < 0) throw CLI::ValidationError("--steps must be non-negative");
  const CosineRestartConfig cfg = LoadScheduleConfig(config_path);
  char buf[96];
  for (std::int64_t s = 0; s < steps; ++s) {
    const LrPoint p = LrAt(cfg, s);
    std::snprintf(buf, sizeof(buf), "%lld %.10e %lld\n", static_cast<long long>(s), p.lr,
                  static_cast<long long>(p.cycle));
    out << buf;
  }
  return 0;
}

int RunShapes(const std::string &variant, std::int64_t frames, std::int64_t bins,
              std::ostream &out) {
  const auto shapes = PlanShapes(LookupVariant(variant), {bins, frames});
  for (std::size_t i = 0; i < shapes.size(); ++i)
    out << "stage" << i + 1 << ' ' << shapes[i].freq << ' ' << shapes[i].time << '\n';
  return 0;
}

}  // namespace

int Dispatch(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Speaker verification toolkit: features, augmentation, embedding, scoring, "
               "fusion and evaluation."};
  app.require_subcommand(0, 1);
  Globals g;
  app.add_option("--threads", g.threads, "Worker threads for per-utterance/per-trial work")
      ->check(CLI::Range(1u, 1024u));
  bool show_version = false;
  app.add_flag("--version", show_version, "Print toolkit and format versions");

  // features
  std::string feat_config, feat_wav, feat_out;
  bool feat_no_cmn = false;
  auto *features = app.add_subcommand("features", "Compute log-Mel features (MEL1 output)");
  features->add_option("--config", feat_config, "Pipeline config file");
  features->add_option("--wav", feat_wav, "Input WAV (16-bit PCM mono)")->required();
  features->add_option("--out", feat_out, "Output MEL1 file ('-' for stdout)")->required();
  features->add_flag("--no-cmn", feat_no_cmn, "Skip cepstral mean normalization");

  // augment
  std::string aug_config, aug_wav, aug_manifest, aug_out;
  std::optional<std::uint64_t> aug_seed;
  double aug_speed = 1.0;
  auto *augment = app.add_subcommand("augment", "Apply speed perturbation and online augmentation");
  augment->add_option("--config", aug_config, "Pipeline config file");
  augment->add_option("--wav", aug_wav, "Input WAV")->required();
  augment->add_option("--manifest", aug_manifest, "Noise bank manifest (\"category path\" lines)")
      ->required();
  augment->add_option("--out", aug_out, "Output WAV")->required();
  augment->add_option("--seed", aug_seed, "Global seed (overrides config)");
  augment->add_option("--speed", aug_speed, "Speed perturbation factor (e.g. 0.9, 1.0, 1.1)");

  // embed
  std::string emb_config, emb_list, emb_out, emb_utt2spk;
  std::optional<std::uint64_t> emb_seed;
  int emb_segments = 0;
  std::optional<double> emb_seg_seconds;
  auto *embed = app.add_subcommand("embed", "Extract toy speaker embeddings (EMB1 output)");
  embed->add_option("--config", emb_config, "Pipeline config file");
  embed->add_option("--wav-list", emb_list, "\"id path\" lines")->required();
  embed->add_option("--out", emb_out, "Output EMB1 file")->required();
  embed->add_option("--seed", emb_seed, "Embedder seed (overrides config embed_seed)");
  embed->add_option("--segments", emb_segments, "Emit N segment embeddings per utterance for MSA");
  embed->add_option("--segment-seconds", emb_seg_seconds, "MSA segment duration");
  embed->add_option("--speaker-means", emb_utt2spk,
                    "utt2spk file; write per-speaker mean embeddings (cohort)");

  // score
  std::string sc_config, sc_trials, sc_emb, sc_cohort, sc_out;
  bool sc_asnorm = false, sc_msa = false;
  std::optional<std::size_t> sc_topk;
  std::optional<int> sc_segments;
  auto *score = app.add_subcommand("score", "Score trials (raw cosine, AS-Norm or MSA)");
  score->add_option("--config", sc_config, "Pipeline config file");
  score->add_option("--trials", sc_trials, "Trial list")->required();
  score->add_option("--embeddings", sc_emb, "EMB1 embedding store")->required();
  score->add_flag("--asnorm", sc_asnorm, "Adaptive symmetric score normalization");
  score->add_option("--cohort", sc_cohort, "EMB1 cohort store for AS-Norm");
  score->add_option("--topk", sc_topk, "Top-K cohort size (default 100)");
  score->add_flag("--msa", sc_msa, "Matrix score average over segment embeddings");
  score->add_option("--segments", sc_segments, "Segments per utterance for MSA (default 5)");
  score->add_option("--out", sc_out, "Output file (default stdout)");

  // evaluate
  std::string ev_config, ev_trials, ev_scores;
  std::optional<double> ev_ptarget, ev_cmiss, ev_cfa;
  auto *evaluate = app.add_subcommand("evaluate", "Compute EER and minDCF");
  evaluate->add_option("--config", ev_config, "Pipeline config file");
  evaluate->add_option("--trials", ev_trials, "Labeled trial list")->required();
  evaluate->add_option("--scores", ev_scores, "Score file")->required();
  evaluate->add_option("--p-target", ev_ptarget, "Target prior (default 0.05)");
  evaluate->add_option("--c-miss", ev_cmiss, "Miss cost (default 1)");
  evaluate->add_option("--c-fa", ev_cfa, "False-alarm cost (default 1)");

  // fuse
  std::string fu_trials, fu_model_out, fu_model_in, fu_out;
  std::vector<std::string> fu_scores;
  bool fu_fit = false;
  double fu_lambda = 1e-4, fu_ptarget = 0.05;
  auto *fuse = app.add_subcommand("fuse", "Logistic-regression score fusion");
  fuse->add_option("--trials", fu_trials, "Trial list (labeled when fitting)")->required();
  fuse->add_option("--scores", fu_scores, "One score file per system")->required()->expected(1, -1);
  fuse->add_flag("--fit-labels", fu_fit, "Fit the fusion model on the trial labels");
  fuse->add_option("--model", fu_model_out, "Write the model (\"bias w1 ... wn\")");
  fuse->add_option("--load-model", fu_model_in, "Apply a previously fitted model");
  fuse->add_option("--lambda", fu_lambda, "L2 regularization")->check(CLI::NonNegativeNumber);
  fuse->add_option("--p-target", fu_ptarget, "Target prior for the reported dev minDCF");
  fuse->add_option("--out", fu_out, "Output file (default stdout)");

  // schedule-dump
  std::string sd_config;
  std::int64_t sd_steps = 0;
  auto *sched = app.add_subcommand("schedule-dump", "Print \"step lr cycle\" lines");
  sched->add_option("--config", sd_config, "Schedule config file")->required();
  sched->add_option("--steps", sd_steps, "Number of steps")->required();

  // shapes
  std::string sh_variant;
  std::int64_t sh_frames = 600, sh_bins = 80;
  auto *shapes = app.add_subcommand("shapes", "Per-stage (freq, time) sizes of a stride variant");
  shapes->add_option("variant", sh_variant, "ResNet34-st1112 | ResNet34-st1121 | ResNet101")
      ->required();
  shapes->add_option("--frames", sh_frames, "Input frames");
  shapes->add_option("--bins", sh_bins, "Input mel bins");

  auto *selftest = app.add_subcommand("selftest", "Run brute-force oracle checks");

  std::vector<char *> argv;
  for (const auto &a : args) argv.push_back(const_cast<char *>(a.c_str()));
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return 0;
    err << app.help();
    return 1;
  }

  try {
    if (show_version) {
      out << "svtk " << kToolkitVersion << "\nformats EMB1 MEL1 score-text-1 trial-text-1\n";
      return 0;
    }
    if (features->parsed()) return RunFeatures(feat_config, feat_wav, feat_out, feat_no_cmn, out);
    if (augment->parsed())
      return RunAugment(aug_config, aug_wav, aug_manifest, aug_out, aug_seed, aug_speed, out);
    if (embed->parsed())
      return RunEmbed(emb_config, emb_list, emb_out, emb_seed, emb_segments, emb_seg_seconds,
                      emb_utt2spk, g, out);
    if (score->parsed())
      return RunScore(sc_config, sc_trials, sc_emb, sc_asnorm, sc_msa, sc_cohort, sc_topk,
                      sc_segments, sc_out, g, out);
    if (evaluate->parsed())
      return RunEvaluate(ev_config, ev_trials, ev_scores, ev_ptarget, ev_cmiss, ev_cfa, out);
    if (fuse->parsed())
      return RunFuse(fu_trials, fu_scores, fu_fit, fu_model_out, fu_model_in, fu_lambda,
                     fu_ptarget, fu_out, out, err);
    if (sched->parsed()) return RunScheduleDump(sd_config, sd_steps, out);
    if (shapes->parsed()) return RunShapes(sh_variant, sh_frames, sh_bins, out);
    if (selftest->parsed()) return RunSelfTest(out) ? 0 : 2;
    err << app.help();
    return 1;
  } catch (const CLI::Error &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace svtk
