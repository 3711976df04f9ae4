#pragma once

// Small internal FFTW helpers. Not installed.

#include <fftw3.h>

#include <mutex>
#include <new>

namespace fracstep::detail {

inline void ensure_planner_thread_safe() {
  static std::once_flag once;
  std::call_once(once, [] { fftw_make_planner_thread_safe(); });
}

struct FftwBuf {
  double* p = nullptr;
  explicit FftwBuf(std::size_t n)
      : p(static_cast<double*>(fftw_malloc(n * sizeof(double)))) {
    if (!p) throw std::bad_alloc();
  }
  ~FftwBuf() { fftw_free(p); }
  FftwBuf(const FftwBuf&) = delete;
  FftwBuf& operator=(const FftwBuf&) = delete;
};

struct FftwComplexBuf {
  fftw_complex* p = nullptr;
  explicit FftwComplexBuf(std::size_t n)
      : p(static_cast<fftw_complex*>(fftw_malloc(n * sizeof(fftw_complex)))) {
    if (!p) throw std::bad_alloc();
  }
  ~FftwComplexBuf() { fftw_free(p); }
  FftwComplexBuf(const FftwComplexBuf&) = delete;
  FftwComplexBuf& operator=(const FftwComplexBuf&) = delete;
};

}  // namespace fracstep::detail
