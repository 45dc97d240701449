// src/model_math.cc

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

#include "svtk/model_math.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "svtk/error.h"

namespace svtk {

double Dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("dot product size mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

std::vector<double> LengthNormalize(std::span<const double> v) {
  const double norm = std::sqrt(Dot(v, v));
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw InvalidArgument("cannot length-normalize a zero or non-finite vector");
  std::vector<double> out(v.begin(), v.end());
  for (double &x : out) x /= norm;
  return out;
}

SubcenterWeights::SubcenterWeights(std::size_t dim, std::size_t classes,
                                   std::size_t subcenters, std::vector<double> data,
                                   bool check_unit)
    : dim_(dim), classes_(classes), subcenters_(subcenters), data_(std::move(data)) {
  if (dim == 0) throw InvalidArgument("weight dim must be positive");
  if (classes < 2) throw InvalidArgument("need at least 2 classes");
  if (subcenters < 1) throw InvalidArgument("need at least 1 subcenter");
  if (data_.size() != dim * classes * subcenters)
    throw InvalidArgument("weight tensor size mismatch");
  for (double x : data_)
    if (!std::isfinite(x)) throw InvalidArgument("non-finite class weight");
  if (check_unit) {
    for (std::size_t j = 0; j < classes; ++j)
      for (std::size_t k = 0; k < subcenters; ++k) {
        auto w = vector(j, k);
        if (std::abs(std::sqrt(Dot(w, w)) - 1.0) > 1e-6)
          throw InvalidArgument("subcenter (" + std::to_string(j) + ", " +
                                std::to_string(k) + ") is not unit-norm");
      }
  }
}

SubcenterWeights SubcenterWeights::Random(std::size_t dim, std::size_t classes,
                                          std::size_t subcenters, Rng &rng) {
  std::vector<double> data(dim * classes * subcenters);
  for (std::size_t i = 0; i < data.size(); i += dim) {
    std::span<double> v(data.data() + i, dim);
    for (double &x : v) x = StandardNormal(rng);
    auto unit = LengthNormalize(v);
    std::copy(unit.begin(), unit.end(), v.begin());
  }
  return SubcenterWeights(dim, classes, subcenters, std::move(data));
}

SubcenterCosines ComputeSubcenterCosines(std::span<const double> x,
                                         const SubcenterWeights &w) {
  if (x.size() != w.dim()) throw InvalidArgument("embedding/weight dim mismatch");
  SubcenterCosines out;
  out.cosine.resize(w.classes());
  out.active.resize(w.classes());
  for (std::size_t j = 0; j < w.classes(); ++j) {
    double best = Dot(x, w.vector(j, 0));
    std::size_t best_k = 0;
    for (std::size_t k = 1; k < w.subcenters(); ++k) {
      const double c = Dot(x, w.vector(j, k));
      if (c > best) {
        best = c;
        best_k = k;
      }
    }
    out.cosine[j] = best;
    out.active[j] = best_k;
  }
  return out;
}

void ValidateLossConfig(const LossConfig &cfg) {
  if (!(cfg.scale > 0.0)) throw InvalidArgument("loss scale must be positive");
  if (!(cfg.margin >= 0.0 && cfg.margin < std::numbers::pi / 2))
    throw InvalidArgument("margin must lie in [0, pi/2)");
}

LossEval SoftmaxCeLoss(std::span<const double> logits, std::size_t y) {
  if (logits.empty() || y >= logits.size())
    throw InvalidArgument("target class out of range");
  for (double z : logits)
    if (!std::isfinite(z)) throw InvalidArgument("non-finite logit");
  const double zmax = *std::max_element(logits.begin(), logits.end());
  LossEval eval;
  eval.grad_x.resize(logits.size());
  // Mass of the non-target classes kept apart so that a dominant target
  // class does not lose it to rounding in 1 + rest.
  double rest = 0.0;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    eval.grad_x[j] = std::exp(logits[j] - zmax);
    if (j != y) rest += eval.grad_x[j];
  }
  const double target = eval.grad_x[y];
  const double sum = target + rest;
  eval.loss = target == 1.0 ? std::log1p(rest) : std::log(sum) - (logits[y] - zmax);
  for (double &g : eval.grad_x) g /= sum;
  eval.grad_x[y] = -rest / sum;
  return eval;
}

LossEval AamSoftmaxLoss(std::span<const double> x, std::size_t y,
                        const SubcenterWeights &w, const LossConfig &cfg) {
  ValidateLossConfig(cfg);
  if (y >= w.classes()) throw InvalidArgument("target class out of range");
  SubcenterCosines cos = ComputeSubcenterCosines(x, w);
  const double cy = cos.cosine[y];
  if (cy > 1.0 + 1e-6 || cy < -1.0 - 1e-6)
    throw InvalidArgument("target cosine " + std::to_string(cy) +
                          " outside [-1, 1]; inputs are not unit-norm");

  const double cos_m = std::cos(cfg.margin);
  const double sin_m = std::sin(cfg.margin);
  const double sin_theta = std::sqrt(std::max(1.0 - cy * cy, 0.0));
  const double target = cy * cos_m - sin_theta * sin_m;  // cos(theta_y + m)
  // d cos(theta + m) / d cos(theta); at sin(theta) == 0 use cos(m).
  const double dtarget = sin_theta > 0.0 ? cos_m + cy / sin_theta * sin_m : cos_m;

  std::vector<double> logits(w.classes());
  for (std::size_t j = 0; j < w.classes(); ++j) logits[j] = cfg.scale * cos.cosine[j];
  logits[y] = cfg.scale * target;
  LossEval soft = SoftmaxCeLoss(logits, y);

  LossEval eval;
  eval.loss = soft.loss;
  eval.active_subcenter = cos.active;
  eval.grad_x.assign(x.size(), 0.0);
  eval.grad_w.assign(w.data().size(), 0.0);
  for (std::size_t j = 0; j < w.classes(); ++j) {
    double dcos = cfg.scale * soft.grad_x[j];
    if (j == y) dcos *= dtarget;
    if (dcos == 0.0) continue;
    const std::size_t k = cos.active[j];
    auto wjk = w.vector(j, k);
    double *gw = eval.grad_w.data() + (j * w.subcenters() + k) * w.dim();
    for (std::size_t d = 0; d < x.size(); ++d) {
      eval.grad_x[d] += dcos * wjk[d];
      gw[d] += dcos * x[d];
    }
  }
  return eval;
}

AttentionParams AttentionParams::Random(std::size_t input_dim,
                                        std::size_t attention_dim, Rng &rng) {
  AttentionParams p;
  p.input_dim = input_dim;
  p.attention_dim = attention_dim;
  const double scale = 1.0 / std::sqrt(static_cast<double>(input_dim));
  p.w.resize(attention_dim * input_dim);
  for (double &x : p.w) x = StandardNormal(rng) * scale;
  p.b.resize(attention_dim);
  for (double &x : p.b) x = 0.1 * StandardNormal(rng);
  p.v.resize(attention_dim);
  for (double &x : p.v) x = StandardNormal(rng) / std::sqrt(static_cast<double>(attention_dim));
  return p;
}

namespace {

void CheckPoolingShapes(const FrameMatrix &h, const AttentionParams &p) {
  if (h.frames < 1) throw InvalidArgument("pooling needs at least one frame");
  if (h.data.size() != h.frames * h.dim) throw InvalidArgument("frame matrix size mismatch");
  if (p.input_dim != h.dim || p.w.size() != p.attention_dim * p.input_dim ||
      p.b.size() != p.attention_dim || p.v.size() != p.attention_dim)
    throw InvalidArgument("attention parameter shape mismatch");
}

// Forward intermediates shared by forward and backward passes.
struct PoolForward {
  std::vector<double> hidden;  // T x A, tanh outputs
  std::vector<double> alpha;   // T
  std::vector<double> mean;    // D
  std::vector<double> var;     // D, unclamped
  std::vector<double> sigma;   // D
};

PoolForward RunPool(const FrameMatrix &h, const AttentionParams &p) {
  CheckPoolingShapes(h, p);
  const std::size_t T = h.frames, D = h.dim, A = p.attention_dim;
  PoolForward f;
  f.hidden.resize(T * A);
  f.alpha.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    auto ht = h.row(t);
    double e = 0.0;
    for (std::size_t a = 0; a < A; ++a) {
      double z = p.b[a];
      for (std::size_t d = 0; d < D; ++d) z += p.w[a * D + d] * ht[d];
      const double act = std::tanh(z);
      f.hidden[t * A + a] = act;
      e += p.v[a] * act;
    }
    f.alpha[t] = e;
  }
  const double emax = *std::max_element(f.alpha.begin(), f.alpha.end());
  double sum = 0.0;
  for (double &e : f.alpha) {
    e = std::exp(e - emax);
    sum += e;
  }
  for (double &e : f.alpha) e /= sum;

  f.mean.assign(D, 0.0);
  std::vector<double> second(D, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    auto ht = h.row(t);
    for (std::size_t d = 0; d < D; ++d) {
      f.mean[d] += f.alpha[t] * ht[d];
      second[d] += f.alpha[t] * ht[d] * ht[d];
    }
  }
  f.var.resize(D);
  f.sigma.resize(D);
  for (std::size_t d = 0; d < D; ++d) {
    f.var[d] = second[d] - f.mean[d] * f.mean[d];
    f.sigma[d] = std::sqrt(std::max(f.var[d], kPoolVarianceFloor));
  }
  return f;
}

}  // namespace

std::vector<double> AttentiveStatsPool(const FrameMatrix &h,
                                       const AttentionParams &params) {
  PoolForward f = RunPool(h, params);
  std::vector<double> out = std::move(f.mean);
  out.insert(out.end(), f.sigma.begin(), f.sigma.end());
  return out;
}

PoolingGrads AttentiveStatsPoolBackward(const FrameMatrix &h,
                                        const AttentionParams &p,
                                        std::span<const double> grad_out) {
  PoolForward f = RunPool(h, p);
  const std::size_t T = h.frames, D = h.dim, A = p.attention_dim;
  if (grad_out.size() != 2 * D) throw InvalidArgument("pooling grad size mismatch");
  auto g_mean = grad_out.subspan(0, D);
  std::vector<double> g_var(D, 0.0);
  for (std::size_t d = 0; d < D; ++d)
    if (f.var[d] > kPoolVarianceFloor) g_var[d] = grad_out[D + d] / (2.0 * f.sigma[d]);

  PoolingGrads g;
  g.frames.assign(T * D, 0.0);
  g.w.assign(A * D, 0.0);
  g.b.assign(A, 0.0);
  g.v.assign(A, 0.0);

  // mean_d = sum_t a_t h_td;  var_d = sum_t a_t h_td^2 - mean_d^2.
  std::vector<double> g_alpha(T, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    auto ht = h.row(t);
    double ga = 0.0;
    for (std::size_t d = 0; d < D; ++d) {
      const double x = ht[d];
      ga += g_mean[d] * x + g_var[d] * (x * x - 2.0 * f.mean[d] * x);
      g.frames[t * D + d] +=
          f.alpha[t] * (g_mean[d] + g_var[d] * (2.0 * x - 2.0 * f.mean[d]));
    }
    g_alpha[t] = ga;
  }
  double weighted = 0.0;
  for (std::size_t t = 0; t < T; ++t) weighted += f.alpha[t] * g_alpha[t];

  for (std::size_t t = 0; t < T; ++t) {
    const double ge = f.alpha[t] * (g_alpha[t] - weighted);
    auto ht = h.row(t);
    for (std::size_t a = 0; a < A; ++a) {
      const double act = f.hidden[t * A + a];
      g.v[a] += ge * act;
      const double gz = ge * p.v[a] * (1.0 - act * act);
      if (gz == 0.0) continue;
      g.b[a] += gz;
      for (std::size_t d = 0; d < D; ++d) {
        g.w[a * D + d] += gz * ht[d];
        g.frames[t * D + d] += gz * p.w[a * D + d];
      }
    }
  }
  return g;
}

const std::vector<StrideVariant> &AllVariants() {
  static const std::vector<StrideVariant> variants = {
      {"ResNet34-st1112", {{{1, 1}, {2, 1}, {2, 1}, {2, 2}}}},
      {"ResNet34-st1121", {{{1, 1}, {2, 1}, {2, 2}, {2, 1}}}},
      {"ResNet101", {{{1, 1}, {2, 2}, {2, 2}, {2, 2}}}},
  };
  return variants;
}

const StrideVariant &LookupVariant(std::string_view name) {
  for (const auto &v : AllVariants())
    if (v.name == name) return v;
  throw InvalidArgument("unknown stride variant \"" + std::string(name) + "\"");
}

std::array<Shape, 4> PlanShapes(const StrideVariant &variant, Shape input) {
  if (input.time < 16) throw InvalidArgument("need at least 16 frames");
  if (input.freq < 1) throw InvalidArgument("need at least 1 frequency bin");
  std::array<Shape, 4> out{};
  Shape cur = input;
  for (std::size_t i = 0; i < 4; ++i) {
    const StagePlan &s = variant.stages[i];
    cur.freq = (cur.freq + s.freq_stride - 1) / s.freq_stride;
    cur.time = (cur.time + s.time_stride - 1) / s.time_stride;
    out[i] = cur;
  }
  return out;
}

ToyEmbedder::ToyEmbedder(std::uint64_t seed, std::size_t input_dim,
                         std::size_t embed_dim)
    : input_dim_(input_dim), embed_dim_(embed_dim) {
  if (input_dim == 0 || embed_dim == 0) throw InvalidArgument("toy embedder dims must be positive");
  Rng rng(seed);
  frame_proj_.resize(kHiddenDim * input_dim);
  const double s_in = 1.0 / std::sqrt(static_cast<double>(input_dim));
  for (double &x : frame_proj_) x = StandardNormal(rng) * s_in;
  frame_bias_.resize(kHiddenDim);
  for (double &x : frame_bias_) x = 0.1 * StandardNormal(rng);
  attention_ = AttentionParams::Random(kHiddenDim, kAttentionDim, rng);
  output_proj_.resize(embed_dim * 2 * kHiddenDim);
  const double s_out = 1.0 / std::sqrt(2.0 * kHiddenDim);
  for (double &x : output_proj_) x = StandardNormal(rng) * s_out;
}

std::vector<double> ToyEmbedder::Embed(const MelFeatures &f) const {
  if (f.frames() < 1) throw InvalidArgument("toy embedding needs at least one frame");
  if (f.rows() != input_dim_)
    throw InvalidArgument("feature rows " + std::to_string(f.rows()) +
                          " != embedder input " + std::to_string(input_dim_));
  FrameMatrix h;
  h.frames = f.frames();
  h.dim = kHiddenDim;
  h.data.resize(h.frames * kHiddenDim);
  for (std::size_t t = 0; t < h.frames; ++t)
    for (std::size_t o = 0; o < kHiddenDim; ++o) {
      double z = frame_bias_[o];
      for (std::size_t b = 0; b < input_dim_; ++b)
        z += frame_proj_[o * input_dim_ + b] * f(b, t);
      h.data[t * kHiddenDim + o] = std::tanh(z);
    }
  const std::vector<double> pooled = AttentiveStatsPool(h, attention_);
  std::vector<double> emb(embed_dim_, 0.0);
  for (std::size_t o = 0; o < embed_dim_; ++o)
    for (std::size_t i = 0; i < pooled.size(); ++i)
      emb[o] += output_proj_[o * pooled.size() + i] * pooled[i];
  return LengthNormalize(emb);
}

std::vector<double> ToyEmbed(const MelFeatures &f, std::uint64_t seed) {
  return ToyEmbedder(seed, f.rows()).Embed(f);
}

}  // namespace svtk
