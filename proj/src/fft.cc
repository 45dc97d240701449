// src/fft.cc

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

#include "fft.h"

#include <algorithm>

namespace svtk::internal {

std::mutex &PlannerMutex() {
  static std::mutex m;
  return m;
}

namespace {

std::size_t NextFastSize(std::size_t n) {
  std::size_t size = 1;
  while (size < n) size <<= 1;
  return size;
}

std::vector<double> DirectConvolve(std::span<const double> a,
                                   std::span<const double> b,
                                   std::size_t out_len) {
  std::vector<double> out(out_len, 0.0);
  for (std::size_t i = 0; i < std::min(a.size(), out_len); ++i) {
    const std::size_t jmax = std::min(b.size(), out_len - i);
    for (std::size_t j = 0; j < jmax; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

}  // namespace

std::vector<double> LinearConvolve(std::span<const double> a,
                                   std::span<const double> b,
                                   std::size_t out_len) {
  if (a.empty() || b.empty()) return std::vector<double>(out_len, 0.0);
  if (a.size() * b.size() <= 65536) return DirectConvolve(a, b, out_len);

  const std::size_t n = NextFastSize(a.size() + b.size() - 1);
  const std::size_t bins = n / 2 + 1;
  auto ra = FftwAlloc<double>(n);
  auto rb = FftwAlloc<double>(n);
  auto fa = FftwAlloc<fftw_complex>(bins);
  auto fb = FftwAlloc<fftw_complex>(bins);
  fftw_plan forward, inverse;
  {
    std::lock_guard lock(PlannerMutex());
    forward = fftw_plan_dft_r2c_1d(static_cast<int>(n), ra.get(), fa.get(),
                                   FFTW_ESTIMATE);
    inverse = fftw_plan_dft_c2r_1d(static_cast<int>(n), fa.get(), ra.get(),
                                   FFTW_ESTIMATE);
  }
  std::fill(ra.get(), ra.get() + n, 0.0);
  std::fill(rb.get(), rb.get() + n, 0.0);
  std::copy(a.begin(), a.end(), ra.get());
  std::copy(b.begin(), b.end(), rb.get());
  fftw_execute_dft_r2c(forward, ra.get(), fa.get());
  fftw_execute_dft_r2c(forward, rb.get(), fb.get());
  for (std::size_t k = 0; k < bins; ++k) {
    const double re = fa[k][0] * fb[k][0] - fa[k][1] * fb[k][1];
    const double im = fa[k][0] * fb[k][1] + fa[k][1] * fb[k][0];
    fa[k][0] = re;
    fa[k][1] = im;
  }
  // c2r destroys its input; fa is not reused.
  fftw_execute_dft_c2r(inverse, fa.get(), ra.get());
  {
    std::lock_guard lock(PlannerMutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(inverse);
  }
  std::vector<double> out(out_len, 0.0);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < std::min(out_len, n); ++i) out[i] = ra[i] * scale;
  return out;
}

}  // namespace svtk::internal
