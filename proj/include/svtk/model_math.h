// include/svtk/model_math.h

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

#ifndef SVTK_MODEL_MATH_H_
#define SVTK_MODEL_MATH_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "svtk/features.h"
#include "svtk/random.h"

namespace svtk {

/// v / ||v||_2. Throws InvalidArgument on a zero (or non-finite) vector.
std::vector<double> LengthNormalize(std::span<const double> v);

double Dot(std::span<const double> a, std::span<const double> b);

/// Class weight tensor of shape dim x classes x subcenters, stored as
/// contiguous subcenter vectors: vector(j, k) = data[(j * K + k) * dim ...].
class SubcenterWeights {
 public:
  /// Throws InvalidArgument if classes < 2, subcenters < 1, the data size is
  /// wrong, or a subcenter vector is not unit-norm within 1e-6 (when
  /// `check_unit` is set).
  SubcenterWeights(std::size_t dim, std::size_t classes, std::size_t subcenters,
                   std::vector<double> data, bool check_unit = true);

  /// Gaussian draws, each subcenter vector length-normalized.
  static SubcenterWeights Random(std::size_t dim, std::size_t classes,
                                 std::size_t subcenters, Rng &rng);

  std::size_t dim() const { return dim_; }
  std::size_t classes() const { return classes_; }
  std::size_t subcenters() const { return subcenters_; }

  std::span<const double> vector(std::size_t j, std::size_t k) const {
    return std::span<const double>(data_).subspan((j * subcenters_ + k) * dim_, dim_);
  }
  std::span<double> mutable_vector(std::size_t j, std::size_t k) {
    return std::span<double>(data_).subspan((j * subcenters_ + k) * dim_, dim_);
  }
  const std::vector<double> &data() const { return data_; }
  std::vector<double> &mutable_data() { return data_; }

 private:
  std::size_t dim_, classes_, subcenters_;
  std::vector<double> data_;
};

struct SubcenterCosines {
  std::vector<double> cosine;       // per class, max over subcenters
  std::vector<std::size_t> active;  // argmax subcenter per class
};

/// Subclass-wise max pooling of cosines; ties go to the smallest k.
SubcenterCosines ComputeSubcenterCosines(std::span<const double> x,
                                         const SubcenterWeights &w);

struct LossConfig {
  double scale = 30.0;
  double margin = 0.3;
};

void ValidateLossConfig(const LossConfig &cfg);

/// Loss value with gradients. For the plain softmax loss `grad_x` is the
/// gradient w.r.t. the logits and `grad_w` is empty.
struct LossEval {
  double loss = 0.0;
  std::vector<double> grad_x;
  std::vector<double> grad_w;  // same layout as SubcenterWeights::data()
  std::vector<std::size_t> active_subcenter;
};

/// -log softmax(logits)[y], stabilized by max subtraction.
LossEval SoftmaxCeLoss(std::span<const double> logits, std::size_t y);

/// Additive angular margin softmax over subcenter-pooled cosines: target
/// logit s*cos(theta_y + m), others s*cos(theta_j). Gradients flow through the
/// active subcenter of each class only.
LossEval AamSoftmaxLoss(std::span<const double> x, std::size_t y,
                        const SubcenterWeights &w, const LossConfig &cfg);

/// Attention parameters: e_t = v . tanh(W h_t + b), W is A x D row-major.
struct AttentionParams {
  std::size_t input_dim = 0;
  std::size_t attention_dim = 0;
  std::vector<double> w;
  std::vector<double> b;
  std::vector<double> v;

  static AttentionParams Random(std::size_t input_dim, std::size_t attention_dim,
                                Rng &rng);
};

/// Frame matrix T x D, row-major.
struct FrameMatrix {
  std::size_t frames = 0;
  std::size_t dim = 0;
  std::vector<double> data;

  std::span<const double> row(std::size_t t) const {
    return std::span<const double>(data).subspan(t * dim, dim);
  }
};

inline constexpr double kPoolVarianceFloor = 1e-9;

struct PoolingGrads {
  std::vector<double> frames;  // T x D
  std::vector<double> w;
  std::vector<double> b;
  std::vector<double> v;
};

/// Attentive statistics pooling: concat(mu, sigma) with attention-weighted
/// mean and standard deviation, variance clamped at kPoolVarianceFloor.
std::vector<double> AttentiveStatsPool(const FrameMatrix &h,
                                       const AttentionParams &params);

/// Gradients of dot(grad_out, AttentiveStatsPool(h, params)).
PoolingGrads AttentiveStatsPoolBackward(const FrameMatrix &h,
                                        const AttentionParams &params,
                                        std::span<const double> grad_out);

struct StagePlan {
  int freq_stride;
  int time_stride;
};

/// Residual-stage stride layout of a ResNet-SE variant, as (freq, time).
struct StrideVariant {
  std::string name;
  std::array<StagePlan, 4> stages;
};

/// "ResNet34-st1112", "ResNet34-st1121" or "ResNet101". Throws
/// InvalidArgument on anything else.
const StrideVariant &LookupVariant(std::string_view name);
const std::vector<StrideVariant> &AllVariants();

struct Shape {
  std::int64_t freq;
  std::int64_t time;
  bool operator==(const Shape &) const = default;
};

/// Output (freq, time) of each of the four stages, ceiling division per
/// stage. Throws InvalidArgument if time < 16.
std::array<Shape, 4> PlanShapes(const StrideVariant &variant, Shape input);

/// Deterministic stand-in extractor: 80 -> 64 projection with tanh,
/// attentive statistics pooling, 128 -> dim projection, length
/// normalization. Parameters are drawn from the seed.
class ToyEmbedder {
 public:
  static constexpr std::size_t kHiddenDim = 64;
  static constexpr std::size_t kAttentionDim = 32;

  explicit ToyEmbedder(std::uint64_t seed, std::size_t input_dim = 80,
                       std::size_t embed_dim = 512);

  /// Throws InvalidArgument on zero frames or a bin count mismatch.
  std::vector<double> Embed(const MelFeatures &f) const;

  std::size_t embed_dim() const { return embed_dim_; }

 private:
  std::size_t input_dim_;
  std::size_t embed_dim_;
  std::vector<double> frame_proj_;   // kHiddenDim x input_dim
  std::vector<double> frame_bias_;   // kHiddenDim
  AttentionParams attention_;
  std::vector<double> output_proj_;  // embed_dim x 2*kHiddenDim
};

std::vector<double> ToyEmbed(const MelFeatures &f, std::uint64_t seed);

}  // namespace svtk

#endif  // SVTK_MODEL_MATH_H_
