// include/svtk/random.h

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

#ifndef SVTK_RANDOM_H_
#define SVTK_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace svtk {

/// The single generator type used everywhere a seed is accepted.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits of one draw. Unlike
/// std::uniform_real_distribution the result is fixed across standard
/// library implementations.
double UniformUnit(Rng &rng);

/// Uniform double in [lo, hi).
double UniformReal(Rng &rng, double lo, double hi);

/// Uniform integer in [lo, hi] (inclusive), unbiased by rejection.
std::int64_t UniformInt(Rng &rng, std::int64_t lo, std::int64_t hi);

/// Standard normal draw (Marsaglia polar method, no cached second value).
double StandardNormal(Rng &rng);

std::uint64_t SplitMix64(std::uint64_t x);

/// 64-bit FNV-1a of a stage name.
std::uint64_t Fnv1a64(std::string_view text);

/// Per-stage seed derived from the global seed:
/// SplitMix64(global_seed ^ Fnv1a64(stage)).
std::uint64_t StageSeed(std::uint64_t global_seed, std::string_view stage);

}  // namespace svtk

#endif  // SVTK_RANDOM_H_
