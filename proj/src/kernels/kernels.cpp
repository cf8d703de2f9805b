#include "panogan/kernels/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "panogan/core/threading.hpp"

namespace panogan::kernels {

namespace {

// Microkernel tile sizes. NR is a multiple of the vector width so the inner
// loop maps onto fused multiply-adds; the accumulator block stays resident
// across the k loop.
template <class T>
struct Tile;
template <>
struct Tile<float> {
    static constexpr int MR = 8, NR = 32;
    static constexpr int64_t MC = 64, NC = 512, KC = 320;
};
template <>
struct Tile<double> {
    static constexpr int MR = 8, NR = 16;
    static constexpr int64_t MC = 64, NC = 256, KC = 256;
};

template <class T, int MR, int NR>
inline void microkernel(int64_t kc, const T* __restrict ap, const T* __restrict bp,
                        T* __restrict acc) {
    for (int64_t p = 0; p < kc; ++p) {
        const T* __restrict arow = ap + p * MR;
        const T* __restrict brow = bp + p * NR;
#pragma GCC unroll 8
        for (int i = 0; i < MR; ++i) {
            const T av = arow[i];
            T* __restrict accrow = acc + i * NR;
#pragma omp simd
            for (int j = 0; j < NR; ++j) accrow[j] = std::fma(av, brow[j], accrow[j]);
        }
    }
}

// Packs op(A)[i0..i0+mc) x [p0..p0+kc) as [rowblock][k][MR], zero-padded.
template <class T, int MR>
void pack_a(bool ta, const T* a, int64_t lda, int64_t i0, int64_t mc, int64_t p0, int64_t kc,
            T* out) {
    for (int64_t ib = 0; ib < mc; ib += MR) {
        const int rows = (int)std::min<int64_t>(MR, mc - ib);
        for (int64_t p = 0; p < kc; ++p) {
            T* dst = out + (ib / MR) * (kc * MR) + p * MR;
            for (int r = 0; r < rows; ++r) {
                const int64_t i = i0 + ib + r;
                const int64_t k = p0 + p;
                dst[r] = ta ? a[k * lda + i] : a[i * lda + k];
            }
            for (int r = rows; r < MR; ++r) dst[r] = T(0);
        }
    }
}

// Packs op(B)[p0..p0+kc) x [j0..j0+nc) as [colblock][k][NR], zero-padded.
template <class T, int NR>
void pack_b(bool tb, const T* b, int64_t ldb, int64_t p0, int64_t kc, int64_t j0, int64_t nc,
            T* out) {
    for (int64_t jb = 0; jb < nc; jb += NR) {
        const int cols = (int)std::min<int64_t>(NR, nc - jb);
        for (int64_t p = 0; p < kc; ++p) {
            T* dst = out + (jb / NR) * (kc * NR) + p * NR;
            const int64_t k = p0 + p;
            if (!tb) {
                const T* src = b + k * ldb + j0 + jb;
                for (int cidx = 0; cidx < cols; ++cidx) dst[cidx] = src[cidx];
            } else {
                for (int cidx = 0; cidx < cols; ++cidx) dst[cidx] = b[(j0 + jb + cidx) * ldb + k];
            }
            for (int cidx = cols; cidx < NR; ++cidx) dst[cidx] = T(0);
        }
    }
}

template <class T>
struct Scratch {
    std::vector<T> pa, pb;
};
template <class T>
Scratch<T>& scratch() {
    thread_local Scratch<T> s;
    return s;
}

}  // namespace

template <class T>
void gemm(bool ta, bool tb, int64_t m, int64_t n, int64_t k, T alpha, const T* a, int64_t lda,
          const T* b, int64_t ldb, T beta, T* c, int64_t ldc) {
    using TT = Tile<T>;
    constexpr int MR = TT::MR, NR = TT::NR;
    const int64_t mc_blocks = (m + TT::MC - 1) / TT::MC;
    const int64_t nc_blocks = (n + TT::NC - 1) / TT::NC;
    const int64_t tiles = mc_blocks * nc_blocks;
    const int threads = num_threads();

#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1 && tiles > 1)
    for (int64_t tile = 0; tile < tiles; ++tile) {
        const int64_t ic = (tile / nc_blocks) * TT::MC;
        const int64_t jc = (tile % nc_blocks) * TT::NC;
        const int64_t mc = std::min<int64_t>(TT::MC, m - ic);
        const int64_t nc = std::min<int64_t>(TT::NC, n - jc);
        const int64_t mb = (mc + MR - 1) / MR;
        const int64_t nb = (nc + NR - 1) / NR;

        auto& sc = scratch<T>();
        sc.pa.resize((size_t)(mb * MR) * TT::KC);
        sc.pb.resize((size_t)(nb * NR) * TT::KC);

        for (int64_t pc = 0; pc < k; pc += TT::KC) {
            const int64_t kc = std::min<int64_t>(TT::KC, k - pc);
            pack_a<T, MR>(ta, a, lda, ic, mc, pc, kc, sc.pa.data());
            pack_b<T, NR>(tb, b, ldb, pc, kc, jc, nc, sc.pb.data());
            const bool first = (pc == 0);

            for (int64_t jb = 0; jb < nb; ++jb) {
                for (int64_t ib = 0; ib < mb; ++ib) {
                    alignas(64) T acc[MR * NR] = {};
                    microkernel<T, MR, NR>(kc, sc.pa.data() + ib * (kc * MR),
                                           sc.pb.data() + jb * (kc * NR), acc);
                    const int64_t i1 = ic + ib * MR;
                    const int64_t j1 = jc + jb * NR;
                    const int rows = (int)std::min<int64_t>(MR, m - i1);
                    const int cols = (int)std::min<int64_t>(NR, n - j1);
                    for (int i = 0; i < rows; ++i) {
                        T* crow = c + (i1 + i) * ldc + j1;
                        const T* arow = acc + i * NR;
                        if (first) {
                            if (beta == T(0))
                                for (int j = 0; j < cols; ++j) crow[j] = alpha * arow[j];
                            else
                                for (int j = 0; j < cols; ++j)
                                    crow[j] = beta * crow[j] + alpha * arow[j];
                        } else {
                            for (int j = 0; j < cols; ++j) crow[j] += alpha * arow[j];
                        }
                    }
                }
            }
        }
    }
}

namespace {

// col(ci*kh*kw, oh*ow) layout for one image.
template <class T>
void im2col(const T* x, int64_t ci, int64_t h, int64_t w, const ConvGeom& g, T* col) {
    const int64_t oh = g.out_h(h), ow = g.out_w(w);
    for (int64_t c = 0; c < ci; ++c) {
        const T* plane = x + c * h * w;
        for (int64_t a = 0; a < g.kh; ++a) {
            for (int64_t b = 0; b < g.kw; ++b) {
                T* dst = col + ((c * g.kh + a) * g.kw + b) * (oh * ow);
                for (int64_t oy = 0; oy < oh; ++oy) {
                    const int64_t iy = oy * g.sh + a - g.ph;
                    if (iy < 0 || iy >= h) {
                        std::fill(dst + oy * ow, dst + (oy + 1) * ow, T(0));
                        continue;
                    }
                    for (int64_t ox = 0; ox < ow; ++ox) {
                        const int64_t ix = ox * g.sw + b - g.pw;
                        dst[oy * ow + ox] = (ix >= 0 && ix < w) ? plane[iy * w + ix] : T(0);
                    }
                }
            }
        }
    }
}

template <class T>
void col2im_add(const T* col, int64_t ci, int64_t h, int64_t w, const ConvGeom& g, T* x) {
    const int64_t oh = g.out_h(h), ow = g.out_w(w);
    for (int64_t c = 0; c < ci; ++c) {
        T* plane = x + c * h * w;
        for (int64_t a = 0; a < g.kh; ++a) {
            for (int64_t b = 0; b < g.kw; ++b) {
                const T* src = col + ((c * g.kh + a) * g.kw + b) * (oh * ow);
                for (int64_t oy = 0; oy < oh; ++oy) {
                    const int64_t iy = oy * g.sh + a - g.ph;
                    if (iy < 0 || iy >= h) continue;
                    for (int64_t ox = 0; ox < ow; ++ox) {
                        const int64_t ix = ox * g.sw + b - g.pw;
                        if (ix >= 0 && ix < w) plane[iy * w + ix] += src[oy * ow + ox];
                    }
                }
            }
        }
    }
}

template <class T>
std::vector<T>& col_scratch() {
    thread_local std::vector<T> buf;
    return buf;
}

}  // namespace

template <class T>
void conv2d_fwd(const T* x, Shape xs, const T* w, const T* bias, T* y, const ConvGeom& g) {
    const int64_t oh = g.out_h(xs.h), ow = g.out_w(xs.w);
    const int64_t kk = g.ci * g.kh * g.kw;
    const int threads = num_threads();
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1 && xs.n > 1)
    for (int64_t n = 0; n < xs.n; ++n) {
        auto& col = col_scratch<T>();
        col.resize((size_t)(kk * oh * ow));
        im2col(x + n * xs.c * xs.h * xs.w, g.ci, xs.h, xs.w, g, col.data());
        T* yn = y + n * g.co * oh * ow;
        gemm<T>(false, false, g.co, oh * ow, kk, T(1), w, kk, col.data(), oh * ow, T(0), yn,
                oh * ow);
        if (bias) {
            for (int64_t c = 0; c < g.co; ++c) {
                const T bv = bias[c];
                T* row = yn + c * oh * ow;
                for (int64_t i = 0; i < oh * ow; ++i) row[i] += bv;
            }
        }
    }
}

template <class T>
void conv2d_igrad(const T* gy, Shape ys, const T* w, T* gx, Shape xs, const ConvGeom& g) {
    const int64_t oh = ys.h, ow = ys.w;
    const int64_t kk = g.ci * g.kh * g.kw;
    const int threads = num_threads();
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1 && xs.n > 1)
    for (int64_t n = 0; n < xs.n; ++n) {
        auto& col = col_scratch<T>();
        col.resize((size_t)(kk * oh * ow));
        // colg = W^T * gy_n
        gemm<T>(true, false, kk, oh * ow, g.co, T(1), w, kk, gy + n * g.co * oh * ow, oh * ow,
                T(0), col.data(), oh * ow);
        T* gxn = gx + n * xs.c * xs.h * xs.w;
        std::fill(gxn, gxn + xs.c * xs.h * xs.w, T(0));
        col2im_add(col.data(), g.ci, xs.h, xs.w, g, gxn);
    }
}

template <class T>
void conv2d_wgrad(const T* x, Shape xs, const T* gy, Shape ys, T* gw, T* gbias,
                  const ConvGeom& g) {
    const int64_t oh = ys.h, ow = ys.w;
    const int64_t kk = g.ci * g.kh * g.kw;
    const int64_t wlen = g.co * kk;
    // Fixed image chunking: partials are combined in chunk order, so the
    // result is the same for any thread count.
    const int64_t nchunks = std::min<int64_t>(8, xs.n);
    std::vector<std::vector<T>> wparts((size_t)nchunks);
    std::vector<std::vector<T>> bparts((size_t)nchunks);
    const int threads = num_threads();
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1 && nchunks > 1)
    for (int64_t ch = 0; ch < nchunks; ++ch) {
        auto& wp = wparts[ch];
        wp.assign((size_t)wlen, T(0));
        auto& bp = bparts[ch];
        bp.assign((size_t)g.co, T(0));
        const int64_t lo = ch * xs.n / nchunks, hi = (ch + 1) * xs.n / nchunks;
        auto& col = col_scratch<T>();
        col.resize((size_t)(kk * oh * ow));
        for (int64_t n = lo; n < hi; ++n) {
            im2col(x + n * xs.c * xs.h * xs.w, g.ci, xs.h, xs.w, g, col.data());
            const T* gyn = gy + n * g.co * oh * ow;
            // wp += gy_n * col^T
            gemm<T>(false, true, g.co, kk, oh * ow, T(1), gyn, oh * ow, col.data(), oh * ow, T(1),
                    wp.data(), kk);
            for (int64_t c = 0; c < g.co; ++c) {
                T s = T(0);
                const T* row = gyn + c * oh * ow;
                for (int64_t i = 0; i < oh * ow; ++i) s += row[i];
                bp[c] += s;
            }
        }
    }
    std::fill(gw, gw + wlen, T(0));
    if (gbias) std::fill(gbias, gbias + g.co, T(0));
    for (int64_t ch = 0; ch < nchunks; ++ch) {
        for (int64_t i = 0; i < wlen; ++i) gw[i] += wparts[ch][i];
        if (gbias)
            for (int64_t c = 0; c < g.co; ++c) gbias[c] += bparts[ch][c];
    }
}

template <class T>
void avgpool2_fwd(const T* x, Shape xs, T* y) {
    const int64_t planes = xs.n * xs.c, oh = xs.h / 2, ow = xs.w / 2;
    const int threads = num_threads();
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1 && planes > 1)
    for (int64_t p = 0; p < planes; ++p) {
        const T* src = x + p * xs.h * xs.w;
        T* dst = y + p * oh * ow;
        for (int64_t i = 0; i < oh; ++i)
            for (int64_t j = 0; j < ow; ++j)
                dst[i * ow + j] =
                    (src[2 * i * xs.w + 2 * j] + src[2 * i * xs.w + 2 * j + 1] +
                     src[(2 * i + 1) * xs.w + 2 * j] + src[(2 * i + 1) * xs.w + 2 * j + 1]) *
                    T(0.25);
    }
}

template <class T>
void upsample2_fwd(const T* x, Shape xs, T* y) {
    const int64_t planes = xs.n * xs.c, oh = xs.h * 2, ow = xs.w * 2;
    const int threads = num_threads();
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1 && planes > 1)
    for (int64_t p = 0; p < planes; ++p) {
        const T* src = x + p * xs.h * xs.w;
        T* dst = y + p * oh * ow;
        for (int64_t i = 0; i < oh; ++i)
            for (int64_t j = 0; j < ow; ++j) dst[i * ow + j] = src[(i / 2) * xs.w + (j / 2)];
    }
}

template <class T>
double sum(const T* x, int64_t n) {
    constexpr int64_t chunk = 8192;
    const int64_t nchunks = (n + chunk - 1) / chunk;
    if (nchunks <= 1) {
        double s = 0;
        for (int64_t i = 0; i < n; ++i) s += (double)x[i];
        return s;
    }
    std::vector<double> parts((size_t)nchunks, 0.0);
    const int threads = num_threads();
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1)
    for (int64_t c = 0; c < nchunks; ++c) {
        const int64_t lo = c * chunk, hi = std::min(n, lo + chunk);
        double s = 0;
        for (int64_t i = lo; i < hi; ++i) s += (double)x[i];
        parts[c] = s;
    }
    double s = 0;
    for (double p : parts) s += p;
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

}  // namespace panogan::kernels
