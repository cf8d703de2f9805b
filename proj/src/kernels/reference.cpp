#include "panogan/kernels/reference.hpp"

#include <algorithm>

namespace panogan::kernels::serial {

namespace {
template <class T>
inline T get(bool trans, const T* a, int64_t ld, int64_t i, int64_t k) {
    return trans ? a[k * ld + i] : a[i * ld + k];
}
}  // namespace

template <class T>
void gemm(bool ta, bool tb, int64_t m, int64_t n, int64_t k, T alpha, const T* a, int64_t lda,
          const T* b, int64_t ldb, T beta, T* c, int64_t ldc) {
    for (int64_t i = 0; i < m; ++i) {
        for (int64_t j = 0; j < n; ++j) {
            T acc = T(0);
            for (int64_t p = 0; p < k; ++p) acc += get(ta, a, lda, i, p) * get(tb, b, ldb, p, j);
            T& out = c[i * ldc + j];
            out = (beta == T(0)) ? alpha * acc : beta * out + alpha * acc;
        }
    }
}

template <class T>
void conv2d_fwd(const T* x, Shape xs, const T* w, const T* bias, T* y, const ConvGeom& g) {
    const int64_t oh = g.out_h(xs.h), ow = g.out_w(xs.w);
    for (int64_t n = 0; n < xs.n; ++n)
        for (int64_t co = 0; co < g.co; ++co)
            for (int64_t oy = 0; oy < oh; ++oy)
                for (int64_t ox = 0; ox < ow; ++ox) {
                    T acc = bias ? bias[co] : T(0);
                    for (int64_t ci = 0; ci < g.ci; ++ci)
                        for (int64_t a = 0; a < g.kh; ++a)
                            for (int64_t b = 0; b < g.kw; ++b) {
                                const int64_t iy = oy * g.sh + a - g.ph;
                                const int64_t ix = ox * g.sw + b - g.pw;
                                if (iy < 0 || iy >= xs.h || ix < 0 || ix >= xs.w) continue;
                                acc += x[((n * xs.c + ci) * xs.h + iy) * xs.w + ix] *
                                       w[((co * g.ci + ci) * g.kh + a) * g.kw + b];
                            }
                    y[((n * g.co + co) * oh + oy) * ow + ox] = acc;
                }
}

template <class T>
void conv2d_igrad(const T* gy, Shape ys, const T* w, T* gx, Shape xs, const ConvGeom& g) {
    std::fill(gx, gx + xs.numel(), T(0));
    for (int64_t n = 0; n < xs.n; ++n)
        for (int64_t co = 0; co < g.co; ++co)
            for (int64_t oy = 0; oy < ys.h; ++oy)
                for (int64_t ox = 0; ox < ys.w; ++ox) {
                    const T gv = gy[((n * g.co + co) * ys.h + oy) * ys.w + ox];
                    for (int64_t ci = 0; ci < g.ci; ++ci)
                        for (int64_t a = 0; a < g.kh; ++a)
                            for (int64_t b = 0; b < g.kw; ++b) {
                                const int64_t iy = oy * g.sh + a - g.ph;
                                const int64_t ix = ox * g.sw + b - g.pw;
                                if (iy < 0 || iy >= xs.h || ix < 0 || ix >= xs.w) continue;
                                gx[((n * xs.c + ci) * xs.h + iy) * xs.w + ix] +=
                                    gv * w[((co * g.ci + ci) * g.kh + a) * g.kw + b];
                            }
                }
}

template <class T>
void conv2d_wgrad(const T* x, Shape xs, const T* gy, Shape ys, T* gw, T* gbias,
                  const ConvGeom& g) {
    std::fill(gw, gw + g.co * g.ci * g.kh * g.kw, T(0));
    if (gbias) std::fill(gbias, gbias + g.co, T(0));
    for (int64_t n = 0; n < xs.n; ++n)
        for (int64_t co = 0; co < g.co; ++co)
            for (int64_t oy = 0; oy < ys.h; ++oy)
                for (int64_t ox = 0; ox < ys.w; ++ox) {
                    const T gv = gy[((n * g.co + co) * ys.h + oy) * ys.w + ox];
                    if (gbias) gbias[co] += gv;
                    for (int64_t ci = 0; ci < g.ci; ++ci)
                        for (int64_t a = 0; a < g.kh; ++a)
                            for (int64_t b = 0; b < g.kw; ++b) {
                                const int64_t iy = oy * g.sh + a - g.ph;
                                const int64_t ix = ox * g.sw + b - g.pw;
                                if (iy < 0 || iy >= xs.h || ix < 0 || ix >= xs.w) continue;
                                gw[((co * g.ci + ci) * g.kh + a) * g.kw + b] +=
                                    gv * x[((n * xs.c + ci) * xs.h + iy) * xs.w + ix];
                            }
                }
}

template <class T>
void avgpool2_fwd(const T* x, Shape xs, T* y) {
    const int64_t oh = xs.h / 2, ow = xs.w / 2;
    for (int64_t p = 0; p < xs.n * xs.c; ++p)
        for (int64_t i = 0; i < oh; ++i)
            for (int64_t j = 0; j < ow; ++j) {
                const T* src = x + p * xs.h * xs.w;
                y[p * oh * ow + i * ow + j] =
                    (src[2 * i * xs.w + 2 * j] + src[2 * i * xs.w + 2 * j + 1] +
                     src[(2 * i + 1) * xs.w + 2 * j] + src[(2 * i + 1) * xs.w + 2 * j + 1]) /
                    T(4);
            }
}

template <class T>
void upsample2_fwd(const T* x, Shape xs, T* y) {
    const int64_t oh = xs.h * 2, ow = xs.w * 2;
    for (int64_t p = 0; p < xs.n * xs.c; ++p)
        for (int64_t i = 0; i < oh; ++i)
            for (int64_t j = 0; j < ow; ++j)
                y[p * oh * ow + i * ow + j] = x[p * xs.h * xs.w + (i / 2) * xs.w + (j / 2)];
}

template <class T>
double sum(const T* x, int64_t n) {
    double s = 0;
    for (int64_t i = 0; i < n; ++i) s += (double)x[i];
    return s;
}

#define PANOGAN_INSTANTIATE(T)                                                                  \
    template void gemm<T>(bool, bool, int64_t, int64_t, int64_t, T, const T*, int64_t, const T*, \
                          int64_t, T, T*, int64_t);                                             \
    template void conv2d_fwd<T>(const T*, Shape, const T*, const T*, T*, const ConvGeom&);      \
    template void conv2d_igrad<T>(const T*, Shape, const T*, T*, Shape, const ConvGeom&);       \
    template void conv2d_wgrad<T>(const T*, Shape, const T*, Shape, T*, T*, const ConvGeom&);   \
    template void avgpool2_fwd<T>(const T*, Shape, T*);                                         \
    template void upsample2_fwd<T>(const T*, Shape, T*);                                        \
    template double sum<T>(const T*, int64_t);

PANOGAN_INSTANTIATE(float)
PANOGAN_INSTANTIATE(double)
#undef PANOGAN_INSTANTIATE

}  // namespace panogan::kernels::serial
