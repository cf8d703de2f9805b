#pragma once

#include <cstdint>

#include "panogan/kernels/kernels.hpp"

// Plain single-threaded loop implementations of the hot kernels. These are
// the reference the parallel kernels are tested and benchmarked against;
// nothing in the production path calls them.
namespace panogan::kernels::serial {

template <class T>
void gemm(bool ta, bool tb, int64_t m, int64_t n, int64_t k, T alpha, const T* a, int64_t lda,
          const T* b, int64_t ldb, T beta, T* c, int64_t ldc);

template <class T>
void conv2d_fwd(const T* x, Shape xs, const T* w, const T* bias, T* y, const ConvGeom& g);

template <class T>
void conv2d_igrad(const T* gy, Shape ys, const T* w, T* gx, Shape xs, const ConvGeom& g);

template <class T>
void conv2d_wgrad(const T* x, Shape xs, const T* gy, Shape ys, T* gw, T* gbias,
                  const ConvGeom& g);

template <class T>
void avgpool2_fwd(const T* x, Shape xs, T* y);

template <class T>
void upsample2_fwd(const T* x, Shape xs, T* y);

template <class T>
double sum(const T* x, int64_t n);

}  // namespace panogan::kernels::serial
