// src/schedule.cc

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

#include "svtk/schedule.h"

#include <cmath>
#include <limits>
#include <numbers>

#include "svtk/error.h"
#include "svtk/pipeline_config.h"

namespace svtk {

CosineRestartConfig CosineRestartConfig::StageOne(std::int64_t steps_per_epoch) {
  CosineRestartConfig cfg;
  cfg.cycle0_steps = steps_per_epoch;
  return cfg;
}

CosineRestartConfig CosineRestartConfig::LargeMarginFineTune() {
  CosineRestartConfig cfg;
  cfg.lr_max0 = 1e-4;
  cfg.decay = 1.0;
  cfg.doubling = false;
  cfg.cycle0_steps = 11000;
  cfg.fixed_period_steps = 11000;
  return cfg;
}

void ValidateSchedule(const CosineRestartConfig &cfg) {
  if (!(cfg.lr_min > 0.0) || !(cfg.lr_max0 > cfg.lr_min) || !std::isfinite(cfg.lr_max0))
    throw InvalidArgument("schedule requires lr_max > lr_min > 0");
  if (!(cfg.decay > 0.0 && cfg.decay <= 1.0))
    throw InvalidArgument("schedule decay must lie in (0, 1]");
  if (cfg.cycle0_steps < 1) throw InvalidArgument("cycle0_steps must be >= 1");
  if (cfg.fixed_period_steps && *cfg.fixed_period_steps < 1)
    throw InvalidArgument("fixed_period_steps must be >= 1");
}

namespace {

constexpr std::int64_t kMaxStep = std::numeric_limits<std::int64_t>::max();

bool Doubles(const CosineRestartConfig &cfg) {
  return !cfg.fixed_period_steps && cfg.doubling;
}

std::int64_t BaseLength(const CosineRestartConfig &cfg) {
  return cfg.fixed_period_steps ? *cfg.fixed_period_steps : cfg.cycle0_steps;
}

}  // namespace

std::int64_t CycleLength(const CosineRestartConfig &cfg, std::int64_t cycle) {
  if (cycle < 0) throw InvalidArgument("negative cycle index");
  const std::int64_t base = BaseLength(cfg);
  if (!Doubles(cfg)) return base;
  if (cycle >= 63 || base > (kMaxStep >> cycle)) return kMaxStep;
  return base << cycle;
}

std::int64_t CycleStart(const CosineRestartConfig &cfg, std::int64_t cycle) {
  if (cycle < 0) throw InvalidArgument("negative cycle index");
  const std::int64_t base = BaseLength(cfg);
  if (!Doubles(cfg)) {
    if (cycle > 0 && base > kMaxStep / cycle) return kMaxStep;
    return base * cycle;
  }
  // base * (2^c - 1)
  if (cycle >= 63) return kMaxStep;
  const std::int64_t factor = (std::int64_t{1} << cycle) - 1;
  if (factor > 0 && base > kMaxStep / factor) return kMaxStep;
  return base * factor;
}

LrPoint LrAt(const CosineRestartConfig &cfg, std::int64_t step) {
  ValidateSchedule(cfg);
  if (step < 0) throw InvalidArgument("step must be non-negative");
  std::int64_t cycle;
  if (Doubles(cfg)) {
    cycle = 0;
    while (cycle < 62 && CycleStart(cfg, cycle + 1) <= step) ++cycle;
  } else {
    cycle = step / BaseLength(cfg);
  }
  const std::int64_t start = CycleStart(cfg, cycle);
  const std::int64_t length = CycleLength(cfg, cycle);
  const double frac = static_cast<double>(step - start) / static_cast<double>(length);
  const double peak =
      std::max(cfg.lr_max0 * std::pow(cfg.decay, static_cast<double>(cycle)), cfg.lr_min);
  const double lr =
      cfg.lr_min + 0.5 * (peak - cfg.lr_min) * (1.0 + std::cos(std::numbers::pi * frac));
  return {lr, cycle};
}

CosineRestartConfig LoadScheduleConfig(const std::string &path) {
  const KeyValueFile kv = ReadKeyValueFile(path);
  CosineRestartConfig cfg;
  for (const auto &[key, entry] : kv.entries) {
    if (key == "lr_max")
      cfg.lr_max0 = ParseDouble(entry);
    else if (key == "lr_min")
      cfg.lr_min = ParseDouble(entry);
    else if (key == "decay")
      cfg.decay = ParseDouble(entry);
    else if (key == "cycle0_steps")
      cfg.cycle0_steps = ParseInt(entry);
    else if (key == "doubling")
      cfg.doubling = ParseBool(entry);
    else if (key == "fixed_period_steps")
      cfg.fixed_period_steps = ParseInt(entry);
    else
      throw ParseError(entry.line, "unknown schedule key \"" + key + "\"");
  }
  ValidateSchedule(cfg);
  return cfg;
}

}  // namespace svtk
