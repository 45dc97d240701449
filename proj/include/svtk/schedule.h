// include/svtk/schedule.h

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

#ifndef SVTK_SCHEDULE_H_
#define SVTK_SCHEDULE_H_

#include <cstdint>
#include <optional>
#include <string>

namespace svtk {

/// Cosine annealing with warm restarts. With `doubling`, cycle c lasts
/// cycle0_steps * 2^c steps; with `fixed_period_steps`, every cycle lasts that
/// many steps (and `doubling` is ignored). The peak of cycle c is
/// max(lr_max0 * decay^c, lr_min).
struct CosineRestartConfig {
  double lr_max0 = 0.02;
  double lr_min = 5e-6;
  double decay = 0.8;
  std::int64_t cycle0_steps = 1;
  bool doubling = true;
  std::optional<std::int64_t> fixed_period_steps;

  /// First training stage: cycle0 = one epoch in steps, doubling cycles.
  static CosineRestartConfig StageOne(std::int64_t steps_per_epoch);
  /// Large-margin fine-tuning: peak 1e-4, restart every 11000 steps, no decay.
  static CosineRestartConfig LargeMarginFineTune();
};

/// Throws InvalidArgument unless lr_max0 > lr_min > 0, 0 < decay <= 1 and
/// cycle lengths are >= 1.
void ValidateSchedule(const CosineRestartConfig &cfg);

struct LrPoint {
  double lr;
  std::int64_t cycle;
};

LrPoint LrAt(const CosineRestartConfig &cfg, std::int64_t step);

/// First step of cycle `cycle`.
std::int64_t CycleStart(const CosineRestartConfig &cfg, std::int64_t cycle);
std::int64_t CycleLength(const CosineRestartConfig &cfg, std::int64_t cycle);

/// Flat "key = value" file with keys lr_max, lr_min, decay, cycle0_steps,
/// doubling (true/false), fixed_period_steps. Unknown keys are errors.
CosineRestartConfig LoadScheduleConfig(const std::string &path);

}  // namespace svtk

#endif  // SVTK_SCHEDULE_H_
