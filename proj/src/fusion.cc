// src/fusion.cc

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

#include "svtk/fusion.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "svtk/error.h"

namespace svtk {

ScoreMatrix::ScoreMatrix(std::size_t trials, std::size_t systems)
    : trials_(trials), systems_(systems), data_(trials * systems, 0.0) {}

ScoreMatrix ScoreMatrix::FromColumns(const std::vector<std::vector<double>> &columns) {
  if (columns.empty()) return {};
  ScoreMatrix m(columns.front().size(), columns.size());
  for (std::size_t s = 0; s < columns.size(); ++s) {
    if (columns[s].size() != m.trials()) throw InvalidArgument("score columns differ in length");
    for (std::size_t t = 0; t < m.trials(); ++t) m(t, s) = columns[s][t];
  }
  return m;
}

std::vector<double> ScoreMatrix::column(std::size_t s) const {
  std::vector<double> out(trials_);
  for (std::size_t t = 0; t < trials_; ++t) out[t] = (*this)(t, s);
  return out;
}

namespace {

// log(1 + exp(x)) without overflow.
double Softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double Margin(const ScoreMatrix &s, std::size_t t, std::span<const double> w, double b) {
  double z = b;
  for (std::size_t k = 0; k < w.size(); ++k) z += w[k] * s(t, k);
  return z;
}

void CheckInputs(const ScoreMatrix &scores, std::span<const bool> labels) {
  if (scores.systems() < 1) throw InvalidArgument("fusion needs at least one system");
  if (labels.size() != scores.trials()) throw InvalidArgument("label count differs from trial count");
  std::size_t targets = 0;
  for (bool l : labels) targets += l;
  if (targets == 0 || targets == labels.size())
    throw InvalidArgument("fusion needs both target and nontarget trials");
  for (std::size_t t = 0; t < scores.trials(); ++t)
    for (double v : scores.row(t))
      if (!std::isfinite(v)) throw InvalidArgument("non-finite score in fusion input");
}

}  // namespace

double MeanLogLoss(const ScoreMatrix &scores, std::span<const bool> labels,
                   std::span<const double> weights, double bias) {
  if (weights.size() != scores.systems()) throw InvalidArgument("weight count mismatch");
  double sum = 0.0;
  for (std::size_t t = 0; t < scores.trials(); ++t) {
    const double y = labels[t] ? 1.0 : -1.0;
    sum += Softplus(-y * Margin(scores, t, weights, bias));
  }
  return sum / static_cast<double>(scores.trials());
}

double FusionObjective(const ScoreMatrix &scores, std::span<const bool> labels,
                       std::span<const double> weights, double bias, double lambda) {
  double reg = 0.0;
  for (double w : weights) reg += w * w;
  return MeanLogLoss(scores, labels, weights, bias) + 0.5 * lambda * reg;
}

FusionModel FitFusion(const ScoreMatrix &scores, std::span<const bool> labels,
                      const FusionOptions &options) {
  CheckInputs(scores, labels);
  if (!(options.lambda >= 0.0)) throw InvalidArgument("lambda must be non-negative");
  const std::size_t n = scores.trials();
  const std::size_t k = scores.systems();
  const std::size_t p = k + 1;  // weights then bias
  const double inv_n = 1.0 / static_cast<double>(n);

  FusionModel model;
  model.lambda = options.lambda;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  auto objective = [&](const Eigen::VectorXd &th) {
    return FusionObjective(scores, labels, std::span<const double>(th.data(), k), th[k],
                           options.lambda);
  };
  double f = objective(theta);

  for (int iter = 0;; ++iter) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(p);
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd x(p);
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t j = 0; j < k; ++j) x[j] = scores(t, j);
      x[k] = 1.0;
      const double y = labels[t] ? 1.0 : -1.0;
      const double z = theta.dot(x);
      grad += (-y * Sigmoid(-y * z) * inv_n) * x;
      const double s = Sigmoid(z);
      hess.selfadjointView<Eigen::Lower>().rankUpdate(x, s * (1.0 - s) * inv_n);
    }
    hess = hess.selfadjointView<Eigen::Lower>();
    for (std::size_t j = 0; j < k; ++j) {
      grad[j] += options.lambda * theta[j];
      hess(j, j) += options.lambda;
    }
    model.iterations = iter;
    if (grad.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance) {
      model.converged = true;
      break;
    }
    if (iter >= options.max_iterations) break;

    // Newton direction; add diagonal damping until it is a descent direction.
    Eigen::VectorXd step;
    double damping = 0.0;
    const double scale = std::max(hess.diagonal().maxCoeff(), 1e-12);
    for (int attempt = 0; attempt < 20; ++attempt) {
      Eigen::MatrixXd h = hess;
      h.diagonal().array() += damping;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        step = ldlt.solve(-grad);
        if (step.allFinite() && step.dot(grad) < 0.0) break;
      }
      step.resize(0);
      damping = damping == 0.0 ? 1e-10 * scale : damping * 10.0;
    }
    if (step.size() == 0) step = -grad;

    // Step halving until the objective decreases.
    double t = 1.0;
    bool improved = false;
    for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
      Eigen::VectorXd candidate = theta + t * step;
      const double fc = objective(candidate);
      // Close to the optimum the objective is flat to rounding; a full Newton
      // step is still taken there so the gradient can keep shrinking.
      const bool flat_ok = halving == 0 && fc <= f + 1e-15 * std::max(1.0, std::abs(f));
      if (fc < f || flat_ok) {
        theta = candidate;
        f = fc;
        improved = true;
        break;
      }
    }
    if (!improved) break;  // objective flat at machine precision
  }
  model.weights.assign(theta.data(), theta.data() + k);
  model.bias = theta[k];
  return model;
}

std::vector<double> Fuse(const FusionModel &model, const ScoreMatrix &scores) {
  if (model.weights.size() != scores.systems())
    throw InvalidArgument("model has " + std::to_string(model.weights.size()) +
                          " weights but input has " + std::to_string(scores.systems()) +
                          " systems");
  std::vector<double> out(scores.trials());
  for (std::size_t t = 0; t < scores.trials(); ++t)
    out[t] = Margin(scores, t, model.weights, model.bias);
  return out;
}

void WriteFusionModel(const FusionModel &model, std::ostream &out) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", model.bias);
  out << buf;
  for (double w : model.weights) {
    std::snprintf(buf, sizeof(buf), "%.17g", w);
    out << ' ' << buf;
  }
  out << '\n';
}

FusionModel ReadFusionModel(std::istream &in) {
  std::string line;
  while (std::getline(in, line))
    if (line.find_first_not_of(" \t\r") != std::string::npos) break;
  std::istringstream tok(line);
  std::vector<double> values;
  std::string item;
  while (tok >> item) {
    char *end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end != item.c_str() + item.size() || !std::isfinite(v))
      throw ParseError(1, "bad fusion model value \"" + item + "\"");
    values.push_back(v);
  }
  if (values.size() < 2) throw ParseError(1, "fusion model needs a bias and at least one weight");
  FusionModel model;
  model.bias = values[0];
  model.weights.assign(values.begin() + 1, values.end());
  model.converged = true;
  return model;
}

ScoreMatrix StackScoreSets(const std::vector<ScoreSet> &systems) {
  if (systems.empty()) throw InvalidArgument("no score sets to stack");
  const TrialList &ref = systems.front().trials();
  ScoreMatrix m(ref.size(), systems.size());
  for (std::size_t s = 0; s < systems.size(); ++s) {
    const ScoreSet aligned = AlignScores(ref, systems[s]);
    for (std::size_t t = 0; t < ref.size(); ++t) m(t, s) = aligned.scores()[t];
  }
  return m;
}

}  // namespace svtk
