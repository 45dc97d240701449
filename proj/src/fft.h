#ifndef SVTK_SRC_FFT_H_
#define SVTK_SRC_FFT_H_

#include <fftw3.h>

#include <memory>
#include <mutex>
#include <new>
#include <span>
#include <vector>

namespace svtk::internal {

// The FFTW planner is not re-entrant; plan creation and destruction are
// serialized. Executing an existing plan on fresh aligned buffers is safe
// from any thread.
std::mutex &PlannerMutex();

template <typename T>
struct FftwFree {
  void operator()(T *p) const { fftw_free(p); }
};
template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree<T>>;

template <typename T>
FftwBuffer<T> FftwAlloc(std::size_t n) {
  auto *p = static_cast<T *>(fftw_malloc(sizeof(T) * (n == 0 ? 1 : n)));
  if (!p) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

// First `out_len` samples of the full linear convolution a * b.
std::vector<double> LinearConvolve(std::span<const double> a,
                                   std::span<const double> b,
                                   std::size_t out_len);

}  // namespace svtk::internal

#endif  // SVTK_SRC_FFT_H_
