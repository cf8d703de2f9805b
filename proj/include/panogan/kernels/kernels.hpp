#pragma once

#include <cstdint>

#include "panogan/core/shape.hpp"

namespace panogan::kernels {

// Geometry of a 2-D convolution. Kernels treat inputs as row-major
// (n, c, h, w) buffers.
struct ConvGeom {
    int64_t ci = 1, co = 1;   // channels in/out
    int64_t kh = 3, kw = 3;   // kernel size
    int64_t sh = 1, sw = 1;   // stride
    int64_t ph = 1, pw = 1;   // zero padding

    int64_t out_h(int64_t h) const { return (h + 2 * ph - kh) / sh + 1; }
    int64_t out_w(int64_t w) const { return (w + 2 * pw - kw) / sw + 1; }
};

// C(M,N) = alpha * op(A) * op(B) + beta * C.
// op(A) is A (M,K) when ta=false, otherwise A is stored (K,M) and read
// transposed; likewise for B. Leading dimensions are row strides.
// Blocked and OpenMP-parallel over output tiles; every C element is
// accumulated by exactly one thread in a fixed order, so results do not
// depend on the thread count.
template <class T>
void gemm(bool ta, bool tb, int64_t m, int64_t n, int64_t k, T alpha, const T* a, int64_t lda,
          const T* b, int64_t ldb, T beta, T* c, int64_t ldc);

// y(n, co, oh, ow) = conv(x(n, ci, h, w), w(co, ci, kh, kw)) + bias.
// bias may be null.
template <class T>
void conv2d_fwd(const T* x, Shape xs, const T* w, const T* bias, T* y, const ConvGeom& g);

// gx = adjoint of conv2d_fwd with respect to x, applied to gy.
template <class T>
void conv2d_igrad(const T* gy, Shape ys, const T* w, T* gx, Shape xs, const ConvGeom& g);

// gw (and gbias when non-null) = adjoint with respect to the weights.
// Accumulation over batch images runs in a fixed chunk order.
template <class T>
void conv2d_wgrad(const T* x, Shape xs, const T* gy, Shape ys, T* gw, T* gbias,
                  const ConvGeom& g);

// 2x2 average pooling, stride 2. h and w must be even.
template <class T>
void avgpool2_fwd(const T* x, Shape xs, T* y);

// 2x nearest-neighbour upsampling.
template <class T>
void upsample2_fwd(const T* x, Shape xs, T* y);

// Deterministic sum: fixed-size chunk partials combined in order, so the
// result is independent of the thread count.
template <class T>
double sum(const T* x, int64_t n);

}  // namespace panogan::kernels
