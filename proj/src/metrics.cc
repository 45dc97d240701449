// src/metrics.cc

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

#include "svtk/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include "svtk/error.h"

namespace svtk {

RocCurve ComputeRoc(std::span<const double> scores, std::span<const bool> is_target) {
  if (scores.size() != is_target.size())
    throw InvalidArgument("score and label counts differ");
  RocCurve curve;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw InvalidArgument("non-finite score");
    ++(is_target[i] ? curve.n_target : curve.n_nontarget);
  }
  if (curve.n_target == 0 || curve.n_nontarget == 0)
    throw InvalidArgument("degenerate labels: need both target and nontarget trials");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  const double nt = static_cast<double>(curve.n_target);
  const double nn = static_cast<double>(curve.n_nontarget);
  std::size_t targets_below = 0, nontargets_below = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double threshold = scores[order[i]];
    curve.points.push_back({threshold, targets_below / nt,
                            (curve.n_nontarget - nontargets_below) / nn});
    for (; i < order.size() && scores[order[i]] == threshold; ++i)
      ++(is_target[order[i]] ? targets_below : nontargets_below);
  }
  curve.points.push_back({std::numeric_limits<double>::infinity(), 1.0, 0.0});
  return curve;
}

RocCurve ComputeRoc(const ScoreSet &set) {
  if (!set.trials().labeled()) throw InvalidArgument("metrics need a labeled trial list");
  // std::vector<bool> has no contiguous storage to span over.
  auto flags = std::make_unique<bool[]>(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) flags[i] = *set.trials()[i].label;
  return ComputeRoc(set.scores(), std::span<const bool>(flags.get(), set.size()));
}

double ComputeEer(const RocCurve &curve) {
  const auto &pts = curve.points;
  if (pts.size() < 2) throw InvalidArgument("ROC curve needs at least two points");
  // P_miss - P_fa goes from -1 (first point) to +1 (last point).
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double d0 = pts[i].p_miss - pts[i].p_fa;
    if (d0 == 0.0) return 100.0 * pts[i].p_miss;
    const double d1 = pts[i + 1].p_miss - pts[i + 1].p_fa;
    if (d0 < 0.0 && d1 >= 0.0) {
      const double t = d0 / (d0 - d1);
      return 100.0 * (pts[i].p_miss + t * (pts[i + 1].p_miss - pts[i].p_miss));
    }
  }
  return 100.0 * pts.back().p_miss;
}

void ValidateDcfConfig(const DcfConfig &cfg) {
  if (!(cfg.p_target > 0.0 && cfg.p_target < 1.0))
    throw InvalidArgument("p_target must lie in (0, 1)");
  if (!(cfg.c_miss > 0.0) || !(cfg.c_fa > 0.0))
    throw InvalidArgument("DCF costs must be positive");
}

double ComputeMinDcf(const RocCurve &curve, const DcfConfig &cfg) {
  ValidateDcfConfig(cfg);
  const double w_miss = cfg.c_miss * cfg.p_target;
  const double w_fa = cfg.c_fa * (1.0 - cfg.p_target);
  double best = std::numeric_limits<double>::infinity();
  for (const OperatingPoint &p : curve.points)
    best = std::min(best, w_miss * p.p_miss + w_fa * p.p_fa);
  return best / std::min(w_miss, w_fa);
}

}  // namespace svtk
