// include/svtk/metrics.h

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

#ifndef SVTK_METRICS_H_
#define SVTK_METRICS_H_

#include <span>
#include <vector>

#include "svtk/trialdata.h"

namespace svtk {

/// Decision rule: accept when score >= threshold.
struct OperatingPoint {
  double threshold;
  double p_miss;  // targets with score < threshold
  double p_fa;    // nontargets with score >= threshold
};

/// Operating points at every distinct score, ascending, followed by the
/// reject-all point (threshold +inf, P_miss 1, P_fa 0). The first point (the
/// lowest score) is the accept-all point P_miss 0, P_fa 1.
struct RocCurve {
  std::vector<OperatingPoint> points;
  std::size_t n_target = 0;
  std::size_t n_nontarget = 0;
};

/// Throws InvalidArgument("degenerate labels") unless both classes occur, and
/// on non-finite scores.
RocCurve ComputeRoc(std::span<const double> scores, std::span<const bool> is_target);
/// The set must be labeled.
RocCurve ComputeRoc(const ScoreSet &set);

/// Equal error rate in percent, linearly interpolated between the two
/// operating points that bracket P_miss == P_fa.
double ComputeEer(const RocCurve &curve);

struct DcfConfig {
  double p_target = 0.05;
  double c_miss = 1.0;
  double c_fa = 1.0;
};

void ValidateDcfConfig(const DcfConfig &cfg);

/// min over operating points of c_miss p_t P_miss + c_fa (1 - p_t) P_fa,
/// divided by min(c_miss p_t, c_fa (1 - p_t)).
double ComputeMinDcf(const RocCurve &curve, const DcfConfig &cfg = {});

}  // namespace svtk

#endif  // SVTK_METRICS_H_
