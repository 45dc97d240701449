// tests/test_util.cc

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

#include "test_util.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <unistd.h>

namespace svtk::testing {

TempDir::TempDir() {
  std::string pattern =
      (std::filesystem::temp_directory_path() / "svtk-test-XXXXXX").string();
  if (::mkdtemp(pattern.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::vector<double> Gaussian(std::size_t n, Rng &rng, double stddev) {
  std::vector<double> v(n);
  for (double &x : v) x = stddev * StandardNormal(rng);
  return v;
}

std::vector<double> RandomUnit(std::size_t dim, Rng &rng) {
  std::vector<double> v = Gaussian(dim, rng);
  double n = 0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  for (double &x : v) x /= n;
  return v;
}

namespace {

std::vector<double> Thresholds(const std::vector<double> &scores) {
  std::vector<double> th(scores);
  std::sort(th.begin(), th.end());
  th.erase(std::unique(th.begin(), th.end()), th.end());
  th.push_back(std::numeric_limits<double>::infinity());
  return th;
}

SweepResult Summarize(const std::vector<double> &pm, const std::vector<double> &pf,
                      double p_target, double c_miss, double c_fa) {
  const double a = c_miss * p_target, b = c_fa * (1 - p_target);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pm.size(); ++i) best = std::min(best, a * pm[i] + b * pf[i]);

  // First point where the miss curve reaches the false-alarm curve; intersect
  // the chord from the previous point with the diagonal.
  double eer = 100.0 * pm.back();
  for (std::size_t i = 0; i < pm.size(); ++i) {
    if (pm[i] < pf[i]) continue;
    if (pm[i] == pf[i] || i == 0) {
      eer = 100.0 * pm[i];
    } else {
      const double x0 = pm[i - 1], y0 = pf[i - 1], x1 = pm[i], y1 = pf[i];
      const double t = (y0 - x0) / ((x1 - x0) - (y1 - y0));
      eer = 100.0 * (x0 + t * (x1 - x0));
    }
    break;
  }
  return {eer, best / std::min(a, b)};
}

}  // namespace

SweepResult QuadraticSweep(const std::vector<double> &scores, const std::vector<bool> &labels,
                           double p_target, double c_miss, double c_fa) {
  double nt = 0, nn = 0;
  for (bool l : labels) (l ? nt : nn) += 1;
  std::vector<double> pm, pf;
  for (double th : Thresholds(scores)) {
    std::size_t miss = 0, fa = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (labels[i] && scores[i] < th) ++miss;
      if (!labels[i] && scores[i] >= th) ++fa;
    }
    pm.push_back(miss / nt);
    pf.push_back(fa / nn);
  }
  return Summarize(pm, pf, p_target, c_miss, c_fa);
}

SweepResult SortedSweep(const std::vector<double> &scores, const std::vector<bool> &labels,
                        double p_target, double c_miss, double c_fa) {
  std::vector<double> tar, non;
  for (std::size_t i = 0; i < scores.size(); ++i) (labels[i] ? tar : non).push_back(scores[i]);
  std::sort(tar.begin(), tar.end());
  std::sort(non.begin(), non.end());
  const double nt = static_cast<double>(tar.size()), nn = static_cast<double>(non.size());
  std::vector<double> pm, pf;
  for (double th : Thresholds(scores)) {
    const auto miss = std::lower_bound(tar.begin(), tar.end(), th) - tar.begin();
    const auto fa = non.end() - std::lower_bound(non.begin(), non.end(), th);
    pm.push_back(static_cast<double>(miss) / nt);
    pf.push_back(static_cast<double>(fa) / nn);
  }
  return Summarize(pm, pf, p_target, c_miss, c_fa);
}

std::vector<double> NaiveConvolve(const std::vector<double> &a, const std::vector<double> &b,
                                  std::size_t len) {
  std::vector<double> out(len, 0.0);
  for (std::size_t n = 0; n < len; ++n)
    for (std::size_t k = 0; k < b.size() && k <= n; ++k)
      if (n - k < a.size()) out[n] += a[n - k] * b[k];
  return out;
}

std::vector<double> NumericGradient(const std::function<double(const std::vector<double> &)> &f,
                                    std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    auto at = [&](double offset) {
      x[i] = keep + offset;
      return f(x);
    };
    // Five-point stencil, fourth order in h.
    g[i] = (at(-2 * h) - 8 * at(-h) + 8 * at(h) - at(2 * h)) / (12 * h);
    x[i] = keep;
  }
  return g;
}

double RelError(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

double MaxRelError(const std::vector<double> &a, const std::vector<double> &b, double floor) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, RelError(a[i], b[i], floor));
  return worst;
}

double MinSubcenterGap(const std::vector<double> &x, const SubcenterWeights &w) {
  double gap = std::numeric_limits<double>::infinity();
  if (w.subcenters() < 2) return gap;
  for (std::size_t j = 0; j < w.classes(); ++j) {
    std::vector<double> c;
    for (std::size_t k = 0; k < w.subcenters(); ++k) {
      double dot = 0;
      for (std::size_t d = 0; d < x.size(); ++d) dot += x[d] * w.vector(j, k)[d];
      c.push_back(dot);
    }
    std::sort(c.begin(), c.end(), std::greater<>());
    gap = std::min(gap, c[0] - c[1]);
  }
  return gap;
}

std::string ReadBytes(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void WriteText(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path);
}

Waveform SyntheticVoice(int speaker, int utterance, double seconds, int sample_rate) {
  Rng spk(0x5eed0000u + static_cast<std::uint64_t>(speaker));
  const double f0 = UniformReal(spk, 90.0, 260.0);
  const double tilt = UniformReal(spk, 0.3, 0.9);
  const double formant = UniformReal(spk, 400.0, 3000.0);
  Rng utt(StageSeed(static_cast<std::uint64_t>(speaker) * 1000 + utterance, "voice"));
  const double jitter = 1.0 + 0.01 * StandardNormal(utt);
  Waveform w;
  w.sample_rate = sample_rate;
  const auto n = static_cast<std::size_t>(seconds * sample_rate);
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    double s = 0;
    for (int h = 1; h <= 12; ++h) {
      const double f = h * f0 * jitter;
      if (f >= sample_rate / 2.0) break;
      const double boost = std::exp(-std::pow((f - formant) / 400.0, 2));
      s += (std::pow(tilt, h) + boost) * std::sin(2 * std::numbers::pi * f * t);
    }
    w.samples[i] = 0.05 * s + 0.002 * StandardNormal(utt);
  }
  return w;
}

}  // namespace svtk::testing
