// src/selftest.cc

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

#include "svtk/selftest.h"

#include <algorithm>
#include <cmath>
#include <array>
#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "svtk/augment.h"
#include "svtk/metrics.h"
#include "svtk/model_math.h"
#include "svtk/schedule.h"
#include "svtk/scoring.h"

namespace svtk {

namespace {

// Quadratic-time sweep: at every candidate threshold count misses and false
// alarms directly.
void BruteForceRates(const std::vector<double> &scores, const std::vector<bool> &labels,
                     std::vector<double> *pm, std::vector<double> *pf) {
  std::vector<double> thresholds(scores);
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  thresholds.push_back(INFINITY);
  double nt = 0, nn = 0;
  for (bool l : labels) (l ? nt : nn) += 1;
  for (double th : thresholds) {
    double miss = 0, fa = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (labels[i] && scores[i] < th) ++miss;
      if (!labels[i] && scores[i] >= th) ++fa;
    }
    pm->push_back(miss / nt);
    pf->push_back(fa / nn);
  }
}

bool CheckMetrics(Rng &rng) {
  for (int rep = 0; rep < 20; ++rep) {
    const auto n = static_cast<std::size_t>(UniformInt(rng, 10, 300));
    std::vector<double> scores(n);
    std::vector<bool> labels(n);
    auto flags = std::make_unique<bool[]>(n);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = flags[i] = i < 2 ? i == 0 : UniformUnit(rng) < 0.3;
      scores[i] = std::round((StandardNormal(rng) + (labels[i] ? 1.5 : 0.0)) * 20) / 20;
    }
    std::vector<double> pm, pf;
    BruteForceRates(scores, labels, &pm, &pf);
    double best = INFINITY;
    for (std::size_t i = 0; i < pm.size(); ++i) best = std::min(best, pm[i] + 19.0 * pf[i]);
    const RocCurve roc = ComputeRoc(scores, std::span<const bool>(flags.get(), n));
    if (std::abs(ComputeMinDcf(roc) - best) > 1e-12) return false;
    double eer = 100.0 * pm.back();
    for (std::size_t i = 0; i + 1 < pm.size(); ++i) {
      const double d0 = pm[i] - pf[i], d1 = pm[i + 1] - pf[i + 1];
      if (d0 == 0) { eer = 100 * pm[i]; break; }
      if (d0 < 0 && d1 >= 0) { eer = 100 * (pm[i] + d0 / (d0 - d1) * (pm[i + 1] - pm[i])); break; }
    }
    if (std::abs(ComputeEer(roc) - eer) > 1e-9) return false;
  }
  return true;
}

std::vector<double> RandomUnit(std::size_t dim, Rng &rng) {
  std::vector<double> v(dim);
  for (double &x : v) x = StandardNormal(rng);
  return LengthNormalize(v);
}

double RelErr(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

bool CheckAamGradient(Rng &rng) {
  for (int rep = 0; rep < 10; ++rep) {
    SubcenterWeights w = SubcenterWeights::Random(8, 5, 2, rng);
    std::vector<double> x = RandomUnit(8, rng);
    const auto y = static_cast<std::size_t>(UniformInt(rng, 0, 4));
    const LossConfig cfg{30.0, 0.3};
    const LossEval eval = AamSoftmaxLoss(x, y, w, cfg);
    const double h = 1e-5;
    for (std::size_t d = 0; d < x.size(); ++d) {
      auto xp = x, xm = x;
      xp[d] += h;
      xm[d] -= h;
      const double fd = (AamSoftmaxLoss(xp, y, w, cfg).loss - AamSoftmaxLoss(xm, y, w, cfg).loss) / (2 * h);
      if (RelErr(fd, eval.grad_x[d]) > 1e-5) return false;
    }
  }
  return true;
}

bool CheckPoolGradient(Rng &rng) {
  FrameMatrix h{7, 4, {}};
  for (int i = 0; i < 28; ++i) h.data.push_back(StandardNormal(rng));
  AttentionParams p = AttentionParams::Random(4, 3, rng);
  std::vector<double> g(8);
  for (double &x : g) x = StandardNormal(rng);
  const PoolingGrads grads = AttentiveStatsPoolBackward(h, p, g);
  auto value = [&](const FrameMatrix &hh) {
    const auto out = AttentiveStatsPool(hh, p);
    double s = 0;
    for (std::size_t i = 0; i < out.size(); ++i) s += g[i] * out[i];
    return s;
  };
  for (std::size_t i = 0; i < h.data.size(); ++i) {
    FrameMatrix hp = h, hm = h;
    hp.data[i] += 1e-5;
    hm.data[i] -= 1e-5;
    if (RelErr((value(hp) - value(hm)) / 2e-5, grads.frames[i]) > 1e-5) return false;
  }
  return true;
}

bool CheckAsNorm(Rng &rng) {
  EmbeddingStore cohort(16);
  for (int i = 0; i < 40; ++i) cohort.Add("c" + std::to_string(i), std::span<const double>(RandomUnit(16, rng)));
  const auto e = RandomUnit(16, rng), t = RandomUnit(16, rng);
  const std::vector<float> ef(e.begin(), e.end()), tf(t.begin(), t.end());
  auto stats = [&](const std::vector<float> &v) {
    std::vector<double> s;
    for (std::size_t i = 0; i < cohort.size(); ++i) {
      double dot = 0;
      for (std::size_t d = 0; d < 16; ++d) dot += double(v[d]) * cohort.row(i)[d];
      s.push_back(dot);
    }
    std::sort(s.rbegin(), s.rend());
    double m = 0, v2 = 0;
    for (int i = 0; i < 10; ++i) m += s[i];
    m /= 10;
    for (int i = 0; i < 10; ++i) v2 += (s[i] - m) * (s[i] - m);
    return std::pair<double, double>(m, std::sqrt(v2 / 10));
  };
  double raw = 0;
  for (int d = 0; d < 16; ++d) raw += double(ef[d]) * tf[d];
  const auto [me, se] = stats(ef);
  const auto [mt, st] = stats(tf);
  const double expected = 0.5 * ((raw - me) / se + (raw - mt) / st);
  const double got = AsNormScore(CosineScore(std::span<const float>(ef), std::span<const float>(tf)),
                                 ComputeCohortStats(ef, cohort, 10), ComputeCohortStats(tf, cohort, 10));
  return std::abs(got - expected) <= 1e-9;
}

bool CheckSnr(Rng &rng) {
  for (int rep = 0; rep < 20; ++rep) {
    Waveform s, n;
    for (int i = 0; i < 500; ++i) s.samples.push_back(StandardNormal(rng));
    for (int i = 0; i < 321; ++i) n.samples.push_back(0.3 * StandardNormal(rng));
    const double snr = UniformReal(rng, 0, 20);
    const Waveform mixed = MixAtSnr(s, n, snr);
    double ps = 0, pn = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      ps += s.samples[i] * s.samples[i];
      const double added = mixed.samples[i] - s.samples[i];
      pn += added * added;
    }
    if (std::abs(10 * std::log10(ps / pn) - snr) > 1e-6) return false;
  }
  return true;
}

bool CheckSchedule() {
  const auto cfg = CosineRestartConfig::StageOne(100);
  if (std::abs(LrAt(cfg, 0).lr - 0.02) > 1e-15) return false;
  if (std::abs(LrAt(cfg, 100).lr - 0.016) > 1e-15) return false;
  for (int c = 0; c <= 10; ++c)
    if (CycleStart(cfg, c) != 100 * ((std::int64_t{1} << c) - 1)) return false;
  return std::abs(LrAt(cfg, 99).lr - 5e-6) < 1e-5;
}

bool CheckShapes() {
  const std::array<Shape, 4> st1112{{{80, 600}, {40, 600}, {20, 600}, {10, 300}}};
  const std::array<Shape, 4> st1121{{{80, 600}, {40, 600}, {20, 300}, {10, 300}}};
  const std::array<Shape, 4> r101{{{80, 600}, {40, 300}, {20, 150}, {10, 75}}};
  return PlanShapes(LookupVariant("ResNet34-st1112"), {80, 600}) == st1112 &&
         PlanShapes(LookupVariant("ResNet34-st1121"), {80, 600}) == st1121 &&
         PlanShapes(LookupVariant("ResNet101"), {80, 600}) == r101;
}

bool CheckMsa(Rng &rng) {
  std::vector<std::vector<double>> a, b;
  for (int i = 0; i < 5; ++i) {
    a.push_back(RandomUnit(12, rng));
    b.push_back(RandomUnit(12, rng));
  }
  double sum = 0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      for (int d = 0; d < 12; ++d) sum += a[i][d] * b[j][d];
  return std::abs(MsaScore(a, b) - sum / 25) <= 1e-9;
}

}  // namespace

bool RunSelfTest(std::ostream &out) {
  Rng rng(20221);
  const std::vector<std::pair<const char *, std::function<bool()>>> checks = {
      {"metrics-vs-threshold-sweep", [&] { return CheckMetrics(rng); }},
      {"aam-gradient-finite-difference", [&] { return CheckAamGradient(rng); }},
      {"pooling-gradient-finite-difference", [&] { return CheckPoolGradient(rng); }},
      {"asnorm-vs-brute-force", [&] { return CheckAsNorm(rng); }},
      {"msa-vs-double-loop", [&] { return CheckMsa(rng); }},
      {"snr-fidelity", [&] { return CheckSnr(rng); }},
      {"schedule-values", [] { return CheckSchedule(); }},
      {"shape-planner", [] { return CheckShapes(); }},
  };
  bool all = true;
  for (const auto &[name, fn] : checks) {
    bool ok = false;
    try {
      ok = fn();
    } catch (const std::exception &) {
      ok = false;
    }
    out << (ok ? "PASS " : "FAIL ") << name << '\n';
    all = all && ok;
  }
  return all;
}

}  // namespace svtk
