// include/svtk/fusion.h

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

#ifndef SVTK_FUSION_H_
#define SVTK_FUSION_H_

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "svtk/trialdata.h"

namespace svtk {

/// Trials x systems, row-major.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  ScoreMatrix(std::size_t trials, std::size_t systems);
  /// One column per system; all columns must have equal length.
  static ScoreMatrix FromColumns(const std::vector<std::vector<double>> &columns);

  std::size_t trials() const { return trials_; }
  std::size_t systems() const { return systems_; }
  double &operator()(std::size_t t, std::size_t s) { return data_[t * systems_ + s]; }
  double operator()(std::size_t t, std::size_t s) const { return data_[t * systems_ + s]; }
  std::span<const double> row(std::size_t t) const {
    return std::span<const double>(data_).subspan(t * systems_, systems_);
  }
  std::vector<double> column(std::size_t s) const;

 private:
  std::size_t trials_ = 0;
  std::size_t systems_ = 0;
  std::vector<double> data_;
};

struct FusionModel {
  std::vector<double> weights;
  double bias = 0.0;
  double lambda = 1e-4;
  bool converged = false;
  int iterations = 0;
};

struct FusionOptions {
  double lambda = 1e-4;
  double gradient_tolerance = 1e-8;
  int max_iterations = 200;
};

/// Mean logistic loss (labels +1/-1) plus lambda/2 ||w||^2; the bias is not
/// regularized.
double FusionObjective(const ScoreMatrix &scores, std::span<const bool> labels,
                       std::span<const double> weights, double bias, double lambda);

/// Mean logistic loss of w.s + b without the regularizer.
double MeanLogLoss(const ScoreMatrix &scores, std::span<const bool> labels,
                   std::span<const double> weights, double bias);

/// Minimizes FusionObjective by damped Newton iterations with step halving,
/// starting from zero. Converged when the gradient's infinity norm is at most
/// the tolerance. Throws InvalidArgument on single-class labels, non-finite
/// scores, size mismatches or lambda < 0.
FusionModel FitFusion(const ScoreMatrix &scores, std::span<const bool> labels,
                      const FusionOptions &options = {});

/// w.s + b per trial. Throws InvalidArgument on a system-count mismatch.
std::vector<double> Fuse(const FusionModel &model, const ScoreMatrix &scores);

/// Plain text "bias w1 ... wn" on one line.
void WriteFusionModel(const FusionModel &model, std::ostream &out);
FusionModel ReadFusionModel(std::istream &in);

/// Builds a matrix from score sets that list identical trials in identical
/// order.
ScoreMatrix StackScoreSets(const std::vector<ScoreSet> &systems);

}  // namespace svtk

#endif  // SVTK_FUSION_H_
