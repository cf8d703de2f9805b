#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "panogan/core/rng.hpp"
#include "panogan/core/threading.hpp"
#include "panogan/kernels/kernels.hpp"
#include "panogan/kernels/reference.hpp"

using namespace panogan;

namespace {

template <class T>
std::vector<T> random_vec(size_t n, uint64_t seed) {
    Rng rng(seed);
    std::vector<T> v(n);
    for (auto& x : v) x = (T)rng.uniform(-1.0, 1.0);
    return v;
}

template <class T>
void check_close(const std::vector<T>& a, const std::vector<T>& b, double tol) {
    REQUIRE(a.size() == b.size());
    double worst = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        double d = std::abs((double)a[i] - (double)b[i]);
        double s = std::max(1.0, std::abs((double)b[i]));
        worst = std::max(worst, d / s);
    }
    CHECK(worst < tol);
}

}  // namespace

TEST_CASE("gemm matches serial reference across transpose variants") {
    set_num_threads(3);
    const int64_t m = 37, n = 53, k = 29;
    auto c0 = random_vec<double>((size_t)(m * n), 5);
    for (bool ta : {false, true}) {
        for (bool tb : {false, true}) {
            auto a = random_vec<double>((size_t)(m * k), 1);
            auto b = random_vec<double>((size_t)(k * n), 2);
            const int64_t lda = ta ? m : k, ldb = tb ? k : n;
            auto c = c0, cref = c0;
            kernels::gemm<double>(ta, tb, m, n, k, 1.5, a.data(), lda, b.data(), ldb, 0.5,
                                  c.data(), n);
            kernels::serial::gemm<double>(ta, tb, m, n, k, 1.5, a.data(), lda, b.data(), ldb, 0.5,
                                          cref.data(), n);
            check_close(c, cref, 1e-12);
        }
    }
}

TEST_CASE("gemm results are identical for every thread count") {
    const int64_t m = 65, n = 130, k = 77;
    auto a = random_vec<float>((size_t)(m * k), 11);
    auto b = random_vec<float>((size_t)(k * n), 12);
    std::vector<float> c1((size_t)(m * n)), c4((size_t)(m * n));
    set_num_threads(1);
    kernels::gemm<float>(false, false, m, n, k, 1.f, a.data(), k, b.data(), n, 0.f, c1.data(), n);
    set_num_threads(4);
    kernels::gemm<float>(false, false, m, n, k, 1.f, a.data(), k, b.data(), n, 0.f, c4.data(), n);
    CHECK(std::memcmp(c1.data(), c4.data(), c1.size() * sizeof(float)) == 0);
    set_num_threads(1);
}

TEST_CASE("conv2d forward/igrad/wgrad match serial reference") {
    set_num_threads(2);
    for (auto [stride, pad, ksz] : {std::tuple{1, 1, 3}, {2, 1, 3}, {1, 0, 1}, {1, 3, 7}}) {
        kernels::ConvGeom g{3, 5, ksz, ksz, stride, stride, pad, pad};
        Shape xs{4, 3, 12, 10};
        Shape ys{4, 5, g.out_h(xs.h), g.out_w(xs.w)};
        auto x = random_vec<double>((size_t)xs.numel(), 21);
        auto w = random_vec<double>((size_t)(g.co * g.ci * g.kh * g.kw), 22);
        auto bias = random_vec<double>((size_t)g.co, 23);
        auto gy = random_vec<double>((size_t)ys.numel(), 24);

        std::vector<double> y((size_t)ys.numel()), yref((size_t)ys.numel());
        kernels::conv2d_fwd<double>(x.data(), xs, w.data(), bias.data(), y.data(), g);
        kernels::serial::conv2d_fwd<double>(x.data(), xs, w.data(), bias.data(), yref.data(), g);
        check_close(y, yref, 1e-12);

        std::vector<double> gx((size_t)xs.numel()), gxref((size_t)xs.numel());
        kernels::conv2d_igrad<double>(gy.data(), ys, w.data(), gx.data(), xs, g);
        kernels::serial::conv2d_igrad<double>(gy.data(), ys, w.data(), gxref.data(), xs, g);
        check_close(gx, gxref, 1e-12);

        std::vector<double> gw(w.size()), gwref(w.size()), gb(bias.size()), gbref(bias.size());
        kernels::conv2d_wgrad<double>(x.data(), xs, gy.data(), ys, gw.data(), gb.data(), g);
        kernels::serial::conv2d_wgrad<double>(x.data(), xs, gy.data(), ys, gwref.data(),
                                              gbref.data(), g);
        check_close(gw, gwref, 1e-12);
        check_close(gb, gbref, 1e-12);
    }
    set_num_threads(1);
}

TEST_CASE("conv adjoint identity <conv(x,w),gy> == <x,igrad(gy,w)>") {
    kernels::ConvGeom g{2, 3, 3, 3, 1, 1, 1, 1};
    Shape xs{2, 2, 8, 8};
    Shape ys{2, 3, 8, 8};
    auto x = random_vec<double>((size_t)xs.numel(), 31);
    auto w = random_vec<double>((size_t)(g.co * g.ci * 9), 32);
    auto gy = random_vec<double>((size_t)ys.numel(), 33);
    std::vector<double> y((size_t)ys.numel()), gx((size_t)xs.numel());
    kernels::conv2d_fwd<double>(x.data(), xs, w.data(), nullptr, y.data(), g);
    kernels::conv2d_igrad<double>(gy.data(), ys, w.data(), gx.data(), xs, g);
    double lhs = 0, rhs = 0;
    for (size_t i = 0; i < y.size(); ++i) lhs += y[i] * gy[i];
    for (size_t i = 0; i < x.size(); ++i) rhs += x[i] * gx[i];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("pool and upsample are mutually consistent") {
    Shape xs{2, 3, 6, 6};
    auto x = random_vec<float>((size_t)xs.numel(), 41);
    std::vector<float> y((size_t)(xs.numel() / 4)), yref(y.size());
    kernels::avgpool2_fwd<float>(x.data(), xs, y.data());
    kernels::serial::avgpool2_fwd<float>(x.data(), xs, yref.data());
    check_close(y, yref, 1e-6);

    std::vector<float> up((size_t)xs.numel() * 4), upref(up.size());
    kernels::upsample2_fwd<float>(x.data(), xs, up.data());
    kernels::serial::upsample2_fwd<float>(x.data(), xs, upref.data());
    CHECK(std::memcmp(up.data(), upref.data(), up.size() * sizeof(float)) == 0);

    // pooling an upsampled image gives it back exactly
    Shape us{2, 3, 12, 12};
    std::vector<float> roundtrip((size_t)xs.numel());
    kernels::avgpool2_fwd<float>(up.data(), us, roundtrip.data());
    for (size_t i = 0; i < roundtrip.size(); ++i)
        CHECK(roundtrip[i] == doctest::Approx(x[i]).epsilon(1e-6));
}

TEST_CASE("deterministic sum is thread-count invariant") {
    auto v = random_vec<float>(100000, 51);
    set_num_threads(1);
    double s1 = kernels::sum(v.data(), (int64_t)v.size());
    set_num_threads(5);
    double s5 = kernels::sum(v.data(), (int64_t)v.size());
    CHECK(s1 == s5);
    double sref = kernels::serial::sum(v.data(), (int64_t)v.size());
    CHECK(s1 == doctest::Approx(sref).epsilon(1e-9));
    set_num_threads(1);
}

TEST_CASE("conv2d is thread-count invariant bitwise") {
    kernels::ConvGeom g{8, 8, 3, 3, 1, 1, 1, 1};
    Shape xs{6, 8, 16, 16};
    auto x = random_vec<float>((size_t)xs.numel(), 61);
    auto w = random_vec<float>((size_t)(8 * 8 * 9), 62);
    std::vector<float> y1((size_t)(6 * 8 * 16 * 16)), y3(y1.size());
    set_num_threads(1);
    kernels::conv2d_fwd<float>(x.data(), xs, w.data(), nullptr, y1.data(), g);
    set_num_threads(3);
    kernels::conv2d_fwd<float>(x.data(), xs, w.data(), nullptr, y3.data(), g);
    CHECK(std::memcmp(y1.data(), y3.data(), y1.size() * sizeof(float)) == 0);

    std::vector<float> gw1((size_t)(8 * 8 * 9)), gw3(gw1.size()), gb1(8), gb3(8);
    auto gy = random_vec<float>(y1.size(), 63);
    set_num_threads(1);
    kernels::conv2d_wgrad<float>(x.data(), xs, gy.data(), Shape{6, 8, 16, 16}, gw1.data(),
                                 gb1.data(), g);
    set_num_threads(3);
    kernels::conv2d_wgrad<float>(x.data(), xs, gy.data(), Shape{6, 8, 16, 16}, gw3.data(),
                                 gb3.data(), g);
    CHECK(std::memcmp(gw1.data(), gw3.data(), gw1.size() * sizeof(float)) == 0);
    CHECK(std::memcmp(gb1.data(), gb3.data(), gb1.size() * sizeof(float)) == 0);
    set_num_threads(1);
}
