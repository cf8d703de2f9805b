#include "panogan/ad/ops.hpp"

#include <cmath>
#include <cstring>
#include <unordered_map>

#include "panogan/core/threading.hpp"

namespace panogan::ad {

namespace {

struct Strides {
    int64_t s[4];
};

Strides strides_for(const Shape& s, const Shape& out) {
    // Stride 0 on broadcast axes.
    Strides st{};
    int64_t acc = 1;
    for (int a = 3; a >= 0; --a) {
        st.s[a] = (s[a] == 1 && out[a] != 1) ? 0 : acc;
        acc *= s[a];
    }
    return st;
}

template <class T, class F>
Tensor<T> ewise2(const Tensor<T>& a, const Tensor<T>& b, F f) {
    const Shape os = broadcast_shape(a.shape(), b.shape());
    Tensor<T> out(os);
    const T* pa = a.data();
    const T* pb = b.data();
    T* po = out.data();
    if (a.shape() == b.shape()) {
        const int64_t n = os.numel();
        const int threads = num_threads();
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1 && n > 65536)
        for (int64_t i = 0; i < n; ++i) po[i] = f(pa[i], pb[i]);
        return out;
    }
    const Strides sa = strides_for(a.shape(), os);
    const Strides sb = strides_for(b.shape(), os);
    const int64_t N = os.n, C = os.c, H = os.h, W = os.w;
    const int threads = num_threads();
#pragma omp parallel for collapse(2) schedule(static) num_threads(threads) \
    if (threads > 1 && N * C > 1 && os.numel() > 65536)
    for (int64_t n = 0; n < N; ++n)
        for (int64_t c = 0; c < C; ++c) {
            const T* ra = pa + n * sa.s[0] + c * sa.s[1];
            const T* rb = pb + n * sb.s[0] + c * sb.s[1];
            T* ro = po + (n * C + c) * H * W;
            for (int64_t h = 0; h < H; ++h)
                for (int64_t w = 0; w < W; ++w)
                    ro[h * W + w] = f(ra[h * sa.s[2] + w * sa.s[3]], rb[h * sb.s[2] + w * sb.s[3]]);
        }
    return out;
}

template <class T, class F>
Tensor<T> ewise1(const Tensor<T>& x, F f) {
    Tensor<T> out(x.shape());
    const T* px = x.data();
    T* po = out.data();
    const int64_t n = x.numel();
    const int threads = num_threads();
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1 && n > 65536)
    for (int64_t i = 0; i < n; ++i) po[i] = f(px[i]);
    return out;
}

// Output-parallel reduction; each output element accumulates its input slice
// in a fixed order.
template <class T>
Tensor<T> reduce_sum(const Tensor<T>& x, std::array<bool, 4> axes) {
    Shape os = x.shape();
    for (int a = 0; a < 4; ++a)
        if (axes[a]) os.axis(a) = 1;
    Tensor<T> out(os);
    const Shape xs = x.shape();
    const int64_t rn = axes[0] ? xs.n : 1, rc = axes[1] ? xs.c : 1, rh = axes[2] ? xs.h : 1,
                  rw = axes[3] ? xs.w : 1;
    const T* px = x.data();
    T* po = out.data();
    const int64_t outC = os.c, outH = os.h, outW = os.w;
    const int64_t total_out = os.numel();
    const int threads = num_threads();
#pragma omp parallel for schedule(static) num_threads(threads) \
    if (threads > 1 && total_out > 1 && x.numel() > 65536)
    for (int64_t oi = 0; oi < total_out; ++oi) {
        const int64_t ow = oi % outW, oh = (oi / outW) % outH, oc = (oi / (outW * outH)) % outC,
                      on = oi / (outW * outH * outC);
        T acc = T(0);
        for (int64_t n = 0; n < rn; ++n)
            for (int64_t c = 0; c < rc; ++c)
                for (int64_t h = 0; h < rh; ++h)
                    for (int64_t w = 0; w < rw; ++w) {
                        const int64_t in = axes[0] ? n : on, ic = axes[1] ? c : oc,
                                      ih = axes[2] ? h : oh, iw = axes[3] ? w : ow;
                        acc += px[((in * xs.c + ic) * xs.h + ih) * xs.w + iw];
                    }
        po[oi] = acc;
    }
    return out;
}

template <class T>
Tensor<T> expand_fwd(const Tensor<T>& x, const Shape& target) {
    Tensor<T> out(target);
    const Strides sx = strides_for(x.shape(), target);
    const T* px = x.data();
    T* po = out.data();
    const int64_t N = target.n, C = target.c, H = target.h, W = target.w;
    const int threads = num_threads();
#pragma omp parallel for collapse(2) schedule(static) num_threads(threads) \
    if (threads > 1 && N * C > 1 && target.numel() > 65536)
    for (int64_t n = 0; n < N; ++n)
        for (int64_t c = 0; c < C; ++c) {
            const T* rx = px + n * sx.s[0] + c * sx.s[1];
            T* ro = po + (n * C + c) * H * W;
            for (int64_t h = 0; h < H; ++h)
                for (int64_t w = 0; w < W; ++w) ro[h * W + w] = rx[h * sx.s[2] + w * sx.s[3]];
        }
    return out;
}

}  // namespace

Shape broadcast_shape(const Shape& a, const Shape& b) {
    Shape o;
    for (int ax = 0; ax < 4; ++ax) {
        const int64_t la = a[ax], lb = b[ax];
        if (la == lb)
            o.axis(ax) = la;
        else if (la == 1)
            o.axis(ax) = lb;
        else if (lb == 1)
            o.axis(ax) = la;
        else
            throw std::invalid_argument("shapes not broadcastable: " + a.str() + " vs " + b.str());
    }
    return o;
}

template <class T>
int reduce_to(Tape<T>& t, int gy, Shape target) {
    if (t.val(gy).shape() == target) return gy;
    std::array<bool, 4> axes{};
    const Shape gs = t.val(gy).shape();
    for (int a = 0; a < 4; ++a) axes[(size_t)a] = (target[a] == 1 && gs[a] != 1);
    return sum_axes(t, gy, axes);
}

template <class T>
int add(Tape<T>& t, int a, int b) {
    const Shape as = t.val(a).shape(), bs = t.val(b).shape();
    return t.emit(
        ewise2(t.val(a), t.val(b), [](T x, T y) { return x + y; }), {a, b},
        [as, bs](Tape<T>& tt, int self, int gy) {
            const auto ins = tt.mutable_node(self).inputs;
            int ga = tt.requires_grad(ins[0]) ? reduce_to(tt, gy, as) : -1;
            int gb = tt.requires_grad(ins[1]) ? reduce_to(tt, gy, bs) : -1;
            return std::vector<int>{ga, gb};
        },
        "add");
}

template <class T>
int sub(Tape<T>& t, int a, int b) {
    const Shape as = t.val(a).shape(), bs = t.val(b).shape();
    return t.emit(
        ewise2(t.val(a), t.val(b), [](T x, T y) { return x - y; }), {a, b},
        [as, bs](Tape<T>& tt, int self, int gy) {
            const auto ins = tt.mutable_node(self).inputs;
            int ga = tt.requires_grad(ins[0]) ? reduce_to(tt, gy, as) : -1;
            int gb = tt.requires_grad(ins[1]) ? reduce_to(tt, neg(tt, gy), bs) : -1;
            return std::vector<int>{ga, gb};
        },
        "sub");
}

template <class T>
int mul(Tape<T>& t, int a, int b) {
    const Shape as = t.val(a).shape(), bs = t.val(b).shape();
    return t.emit(
        ewise2(t.val(a), t.val(b), [](T x, T y) { return x * y; }), {a, b},
        [as, bs](Tape<T>& tt, int self, int gy) {
            const auto ins = tt.mutable_node(self).inputs;
            int ga = tt.requires_grad(ins[0]) ? reduce_to(tt, mul(tt, gy, ins[1]), as) : -1;
            int gb = tt.requires_grad(ins[1]) ? reduce_to(tt, mul(tt, gy, ins[0]), bs) : -1;
            return std::vector<int>{ga, gb};
        },
        "mul");
}

template <class T>
int div(Tape<T>& t, int a, int b) {
    const Shape as = t.val(a).shape(), bs = t.val(b).shape();
    return t.emit(
        ewise2(t.val(a), t.val(b), [](T x, T y) { return x / y; }), {a, b},
        [as, bs](Tape<T>& tt, int self, int gy) {
            const auto ins = tt.mutable_node(self).inputs;
            int ga = tt.requires_grad(ins[0]) ? reduce_to(tt, div(tt, gy, ins[1]), as) : -1;
            int gb = -1;
            if (tt.requires_grad(ins[1]))
                gb = reduce_to(tt, neg(tt, div(tt, mul(tt, gy, self), ins[1])), bs);
            return std::vector<int>{ga, gb};
        },
        "div");
}

template <class T>
int scale(Tape<T>& t, int x, double c) {
    const T cc = (T)c;
    return t.emit(
        ewise1(t.val(x), [cc](T v) { return cc * v; }), {x},
        [c](Tape<T>& tt, int, int gy) { return std::vector<int>{scale(tt, gy, c)}; }, "scale");
}

template <class T>
int add_const(Tape<T>& t, int x, double c) {
    const T cc = (T)c;
    return t.emit(
        ewise1(t.val(x), [cc](T v) { return v + cc; }), {x},
        [](Tape<T>&, int, int gy) { return std::vector<int>{gy}; }, "add_const");
}

template <class T>
int neg(Tape<T>& t, int x) {
    return scale(t, x, -1.0);
}

template <class T>
int square(Tape<T>& t, int x) {
    return t.emit(
        ewise1(t.val(x), [](T v) { return v * v; }), {x},
        [](Tape<T>& tt, int self, int gy) {
            const int xin = tt.mutable_node(self).inputs[0];
            return std::vector<int>{mul(tt, scale(tt, gy, 2.0), xin)};
        },
        "square");
}

template <class T>
int sqrt_op(Tape<T>& t, int x) {
    return t.emit(
        ewise1(t.val(x), [](T v) { return std::sqrt(v); }), {x},
        [](Tape<T>& tt, int self, int gy) {
            return std::vector<int>{div(tt, scale(tt, gy, 0.5), self)};
        },
        "sqrt");
}

template <class T>
int tanh_op(Tape<T>& t, int x) {
    return t.emit(
        ewise1(t.val(x), [](T v) { return std::tanh(v); }), {x},
        [](Tape<T>& tt, int self, int gy) {
            // gy * (1 - y^2)
            return std::vector<int>{mul(tt, gy, add_const(tt, neg(tt, square(tt, self)), 1.0))};
        },
        "tanh");
}

namespace {
// gy * (x > 0 ? 1 : slope); the mask is piecewise constant, so no gradient
// flows to x from here.
template <class T>
int lrelu_bwd(Tape<T>& t, int x, int gy, double slope) {
    const T s = (T)slope;
    return t.emit(
        ewise2(t.val(x), t.val(gy), [s](T xv, T gv) { return xv > T(0) ? gv : s * gv; }),
        {x, gy},
        [slope](Tape<T>& tt, int self, int u) {
            const auto ins = tt.mutable_node(self).inputs;
            int ggy = tt.requires_grad(ins[1]) ? lrelu_bwd(tt, ins[0], u, slope) : -1;
            return std::vector<int>{-1, ggy};
        },
        "lrelu_bwd");
}
}  // namespace

template <class T>
int leaky_relu(Tape<T>& t, int x, double slope) {
    const T s = (T)slope;
    return t.emit(
        ewise1(t.val(x), [s](T v) { return v > T(0) ? v : s * v; }), {x},
        [slope](Tape<T>& tt, int self, int gy) {
            const int xin = tt.mutable_node(self).inputs[0];
            return std::vector<int>{lrelu_bwd(tt, xin, gy, slope)};
        },
        "leaky_relu");
}

template <class T>
int relu(Tape<T>& t, int x) {
    return leaky_relu(t, x, 0.0);
}

template <class T>
int sum_axes(Tape<T>& t, int x, std::array<bool, 4> axes) {
    const Shape xs = t.val(x).shape();
    return t.emit(
        reduce_sum(t.val(x), axes), {x},
        [xs](Tape<T>& tt, int, int gy) { return std::vector<int>{expand(tt, gy, xs)}; },
        "sum_axes");
}

template <class T>
int expand(Tape<T>& t, int x, Shape target) {
    const Shape xs = t.val(x).shape();
    (void)broadcast_shape(xs, target);  // validate
    return t.emit(
        expand_fwd(t.val(x), target), {x},
        [xs](Tape<T>& tt, int, int gy) { return std::vector<int>{reduce_to(tt, gy, xs)}; },
        "expand");
}

template <class T>
int sum_all(Tape<T>& t, int x) {
    return sum_axes(t, x, {true, true, true, true});
}

template <class T>
int mean_all(Tape<T>& t, int x) {
    const double inv = 1.0 / (double)t.val(x).numel();
    return scale(t, sum_all(t, x), inv);
}

template <class T>
int reshape(Tape<T>& t, int x, Shape s) {
    const Shape xs = t.val(x).shape();
    return t.emit(
        t.val(x).reshaped(s), {x},
        [xs](Tape<T>& tt, int, int gy) { return std::vector<int>{reshape(tt, gy, xs)}; },
        "reshape");
}

template <class T>
int concat_c(Tape<T>& t, int a, int b) {
    const Tensor<T>&va = t.val(a), &vb = t.val(b);
    const Shape as = va.shape(), bs = vb.shape();
    if (as.n != bs.n || as.h != bs.h || as.w != bs.w)
        throw std::invalid_argument("concat_c shape mismatch");
    Tensor<T> out(Shape{as.n, as.c + bs.c, as.h, as.w});
    const int64_t hw = as.h * as.w;
    for (int64_t n = 0; n < as.n; ++n) {
        std::memcpy(out.data() + n * (as.c + bs.c) * hw, va.data() + n * as.c * hw,
                    sizeof(T) * (size_t)(as.c * hw));
        std::memcpy(out.data() + (n * (as.c + bs.c) + as.c) * hw, vb.data() + n * bs.c * hw,
                    sizeof(T) * (size_t)(bs.c * hw));
    }
    return t.emit(
        std::move(out), {a, b},
        [as, bs](Tape<T>& tt, int self, int gy) {
            const auto ins = tt.mutable_node(self).inputs;
            int ga = tt.requires_grad(ins[0]) ? slice_c(tt, gy, 0, as.c) : -1;
            int gb = tt.requires_grad(ins[1]) ? slice_c(tt, gy, as.c, bs.c) : -1;
            return std::vector<int>{ga, gb};
        },
        "concat_c");
}

template <class T>
int slice_c(Tape<T>& t, int x, int64_t c0, int64_t len) {
    const Tensor<T>& vx = t.val(x);
    const Shape xs = vx.shape();
    if (c0 < 0 || c0 + len > xs.c) throw std::invalid_argument("slice_c out of range");
    Tensor<T> out(Shape{xs.n, len, xs.h, xs.w});
    const int64_t hw = xs.h * xs.w;
    for (int64_t n = 0; n < xs.n; ++n)
        std::memcpy(out.data() + n * len * hw, vx.data() + (n * xs.c + c0) * hw,
                    sizeof(T) * (size_t)(len * hw));
    return t.emit(
        std::move(out), {x},
        [c0, xs](Tape<T>& tt, int, int gy) {
            return std::vector<int>{embed_c(tt, gy, c0, xs.c)};
        },
        "slice_c");
}

template <class T>
int embed_c(Tape<T>& t, int x, int64_t c0, int64_t total_c) {
    const Tensor<T>& vx = t.val(x);
    const Shape xs = vx.shape();
    if (c0 < 0 || c0 + xs.c > total_c) throw std::invalid_argument("embed_c out of range");
    Tensor<T> out(Shape{xs.n, total_c, xs.h, xs.w});  // zero-initialised
    const int64_t hw = xs.h * xs.w;
    for (int64_t n = 0; n < xs.n; ++n)
        std::memcpy(out.data() + (n * total_c + c0) * hw, vx.data() + n * xs.c * hw,
                    sizeof(T) * (size_t)(xs.c * hw));
    return t.emit(
        std::move(out), {x},
        [c0, xs](Tape<T>& tt, int, int gy) {
            return std::vector<int>{slice_c(tt, gy, c0, xs.c)};
        },
        "embed_c");
}

template <class T>
int matmul(Tape<T>& t, int a, int b, bool ta, bool tb) {
    const Tensor<T>&va = t.val(a), &vb = t.val(b);
    if (va.shape().h != 1 || va.shape().w != 1 || vb.shape().h != 1 || vb.shape().w != 1)
        throw std::invalid_argument("matmul operands must be 2-D (n, d, 1, 1); reshape first");
    const int64_t ar = va.shape().n, ac = va.shape().c;
    const int64_t br = vb.shape().n, bc = vb.shape().c;
    const int64_t m = ta ? ac : ar, k = ta ? ar : ac, n = tb ? br : bc;
    if ((tb ? bc : br) != k)
        throw std::invalid_argument("matmul inner dimension mismatch");
    Tensor<T> out(Shape{m, n, 1, 1});
    kernels::gemm<T>(ta, tb, m, n, k, T(1), va.data(), ac, vb.data(), bc, T(0), out.data(), n);
    return t.emit(
        std::move(out), {a, b},
        [ta, tb](Tape<T>& tt, int self, int gy) {
            const auto ins = tt.mutable_node(self).inputs;
            int ga = -1, gb = -1;
            if (tt.requires_grad(ins[0]))
                ga = ta ? matmul(tt, ins[1], gy, tb, true) : matmul(tt, gy, ins[1], false, !tb);
            if (tt.requires_grad(ins[1]))
                gb = tb ? matmul(tt, gy, ins[0], true, ta) : matmul(tt, ins[0], gy, !ta, false);
            return std::vector<int>{ga, gb};
        },
        "matmul");
}

template <class T>
int conv2d(Tape<T>& t, int x, int w, kernels::ConvGeom g) {
    const Tensor<T>&vx = t.val(x), &vw = t.val(w);
    const Shape xs = vx.shape(), ws = vw.shape();
    if (xs.c != g.ci || ws != Shape{g.co, g.ci, g.kh, g.kw})
        throw std::invalid_argument("conv2d geometry mismatch");
    Tensor<T> out(Shape{xs.n, g.co, g.out_h(xs.h), g.out_w(xs.w)});
    kernels::conv2d_fwd<T>(vx.data(), xs, vw.data(), nullptr, out.data(), g);
    return t.emit(
        std::move(out), {x, w},
        [g, xs, ws](Tape<T>& tt, int self, int gy) {
            const auto ins = tt.mutable_node(self).inputs;
            int gx = tt.requires_grad(ins[0]) ? conv2d_igrad_op(tt, gy, ins[1], g, xs) : -1;
            int gw = tt.requires_grad(ins[1]) ? conv2d_wgrad_op(tt, ins[0], gy, g, ws) : -1;
            return std::vector<int>{gx, gw};
        },
        "conv2d");
}

template <class T>
int conv2d_igrad_op(Tape<T>& t, int gy, int w, kernels::ConvGeom g, Shape xshape) {
    const Tensor<T>&vgy = t.val(gy), &vw = t.val(w);
    Tensor<T> out(xshape);
    kernels::conv2d_igrad<T>(vgy.data(), vgy.shape(), vw.data(), out.data(), xshape, g);
    return t.emit(
        std::move(out), {gy, w},
        [g, xshape](Tape<T>& tt, int self, int u) {
            const auto ins = tt.mutable_node(self).inputs;
            const Shape wshape = tt.val(ins[1]).shape();
            int ggy = tt.requires_grad(ins[0]) ? conv2d(tt, u, ins[1], g) : -1;
            int gw = tt.requires_grad(ins[1]) ? conv2d_wgrad_op(tt, u, ins[0], g, wshape) : -1;
            return std::vector<int>{ggy, gw};
        },
        "conv2d_igrad");
}

template <class T>
int conv2d_wgrad_op(Tape<T>& t, int x, int gy, kernels::ConvGeom g, Shape wshape) {
    const Tensor<T>&vx = t.val(x), &vgy = t.val(gy);
    Tensor<T> out(wshape);
    kernels::conv2d_wgrad<T>(vx.data(), vx.shape(), vgy.data(), vgy.shape(), out.data(), nullptr,
                             g);
    const Shape xs = vx.shape();
    return t.emit(
        std::move(out), {x, gy},
        [g, xs](Tape<T>& tt, int self, int u) {
            const auto ins = tt.mutable_node(self).inputs;
            int gx = tt.requires_grad(ins[0]) ? conv2d_igrad_op(tt, ins[1], u, g, xs) : -1;
            int ggy = tt.requires_grad(ins[1]) ? conv2d(tt, ins[0], u, g) : -1;
            return std::vector<int>{gx, ggy};
        },
        "conv2d_wgrad");
}

template <class T>
int avgpool2(Tape<T>& t, int x) {
    const Tensor<T>& vx = t.val(x);
    const Shape xs = vx.shape();
    if (xs.h % 2 || xs.w % 2) throw std::invalid_argument("avgpool2 requires even h, w");
    Tensor<T> out(Shape{xs.n, xs.c, xs.h / 2, xs.w / 2});
    kernels::avgpool2_fwd<T>(vx.data(), xs, out.data());
    return t.emit(
        std::move(out), {x},
        [](Tape<T>& tt, int, int gy) {
            return std::vector<int>{scale(tt, upsample2(tt, gy), 0.25)};
        },
        "avgpool2");
}

template <class T>
int upsample2(Tape<T>& t, int x) {
    const Tensor<T>& vx = t.val(x);
    const Shape xs = vx.shape();
    Tensor<T> out(Shape{xs.n, xs.c, xs.h * 2, xs.w * 2});
    kernels::upsample2_fwd<T>(vx.data(), xs, out.data());
    return t.emit(
        std::move(out), {x},
        [](Tape<T>& tt, int, int gy) {
            return std::vector<int>{scale(tt, avgpool2(tt, gy), 4.0)};
        },
        "upsample2");
}

template <class T>
int pixel_norm(Tape<T>& t, int x, double eps) {
    const int64_t c = t.val(x).shape().c;
    int ms = scale(t, sum_axes(t, square(t, x), {false, true, false, false}), 1.0 / (double)c);
    return div(t, x, sqrt_op(t, add_const(t, ms, eps)));
}

// ---------------------------------------------------------------------------

template <class T>
std::vector<int> backward(Tape<T>& tape, int root, bool free_forward) {
    if (tape.val(root).numel() != 1) throw std::logic_error("backward root must be scalar");
    if (!tape.requires_grad(root))
        throw std::logic_error("backward root does not depend on any parameter");

    const int n0 = tape.size();
    std::vector<int> grad((size_t)n0, -1);
    std::unordered_map<int, int> uses;

    auto release_if_dead = [&](int id) {
        if (free_forward && uses[id] == 0) tape.mutable_node(id).value.release();
    };
    auto assign = [&](int in, int g) {
        ++uses[g];
        if (grad[(size_t)in] < 0) {
            grad[(size_t)in] = g;
            return;
        }
        const int old = grad[(size_t)in];
        const int r = add(tape, old, g);
        grad[(size_t)in] = r;
        ++uses[r];
        --uses[old];
        release_if_dead(old);
        --uses[g];
        release_if_dead(g);
    };

    grad[(size_t)root] = tape.constant(Tensor<T>::scalar(T(1)));
    uses[grad[(size_t)root]] = 1;

    for (int i = root; i >= 0; --i) {
        if (!tape.requires_grad(i) || grad[(size_t)i] < 0) continue;
        // Copy out what we need: emitting ops may reallocate the node vector.
        typename Tape<T>::BackwardFn fn = tape.mutable_node(i).backward;
        const std::vector<int> inputs = tape.mutable_node(i).inputs;
        if (!fn) continue;  // leaf: keep grad for extraction
        const int gy = grad[(size_t)i];
        std::vector<int> gs = fn(tape, i, gy);
        for (size_t slot = 0; slot < gs.size(); ++slot) {
            const int in = inputs[slot];
            const int g = gs[slot];
            if (g < 0 || !tape.requires_grad(in)) continue;
            assign(in, g);
        }
        if (free_forward) {
            if (i != root) tape.mutable_node(i).value.release();
            --uses[gy];
            release_if_dead(gy);
        }
    }
    return grad;
}

// ---------------------------------------------------------------------------

#define PANOGAN_ADOPS(T)                                                              \
    template int add<T>(Tape<T>&, int, int);                                          \
    template int sub<T>(Tape<T>&, int, int);                                          \
    template int mul<T>(Tape<T>&, int, int);                                          \
    template int div<T>(Tape<T>&, int, int);                                          \
    template int scale<T>(Tape<T>&, int, double);                                     \
    template int add_const<T>(Tape<T>&, int, double);                                 \
    template int neg<T>(Tape<T>&, int);                                               \
    template int square<T>(Tape<T>&, int);                                            \
    template int sqrt_op<T>(Tape<T>&, int);                                           \
    template int tanh_op<T>(Tape<T>&, int);                                           \
    template int leaky_relu<T>(Tape<T>&, int, double);                                \
    template int relu<T>(Tape<T>&, int);                                              \
    template int sum_axes<T>(Tape<T>&, int, std::array<bool, 4>);                     \
    template int expand<T>(Tape<T>&, int, Shape);                                     \
    template int reduce_to<T>(Tape<T>&, int, Shape);                                  \
    template int sum_all<T>(Tape<T>&, int);                                           \
    template int mean_all<T>(Tape<T>&, int);                                          \
    template int reshape<T>(Tape<T>&, int, Shape);                                    \
    template int concat_c<T>(Tape<T>&, int, int);                                     \
    template int slice_c<T>(Tape<T>&, int, int64_t, int64_t);                         \
    template int embed_c<T>(Tape<T>&, int, int64_t, int64_t);                         \
    template int matmul<T>(Tape<T>&, int, int, bool, bool);                           \
    template int conv2d<T>(Tape<T>&, int, int, kernels::ConvGeom);                    \
    template int conv2d_igrad_op<T>(Tape<T>&, int, int, kernels::ConvGeom, Shape);    \
    template int conv2d_wgrad_op<T>(Tape<T>&, int, int, kernels::ConvGeom, Shape);    \
    template int avgpool2<T>(Tape<T>&, int);                                          \
    template int upsample2<T>(Tape<T>&, int);                                         \
    template int pixel_norm<T>(Tape<T>&, int, double);                                \
    template std::vector<int> backward<T>(Tape<T>&, int, bool);

PANOGAN_ADOPS(float)
PANOGAN_ADOPS(double)
#undef PANOGAN_ADOPS

}  // namespace panogan::ad
