// Times the parallel kernels against the serial reference at shapes the
// training loop actually hits. Run with --quick for a smoke pass.
#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "panogan/core/rng.hpp"
#include "panogan/core/threading.hpp"
#include "panogan/kernels/kernels.hpp"
#include "panogan/kernels/reference.hpp"

using namespace panogan;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class F>
double time_best(F&& fn, int reps) {
    double best = 1e30;
    for (int r = 0; r < reps; ++r) {
        auto t0 = Clock::now();
        fn();
        best = std::min(best, seconds_since(t0));
    }
    return best;
}

void fill_random(std::vector<float>& v, Rng& rng) {
    for (auto& x : v) x = (float)rng.uniform(-1.0, 1.0);
}

void bench_gemm(int64_t m, int64_t n, int64_t k, int reps, bool with_serial) {
    std::vector<float> a((size_t)(m * k)), b((size_t)(k * n)), c((size_t)(m * n)),
        cref((size_t)(m * n));
    Rng rng(42);
    fill_random(a, rng);
    fill_random(b, rng);

    const double flops = 2.0 * (double)m * (double)n * (double)k;
    double t_par = time_best(
        [&] { kernels::gemm<float>(false, false, m, n, k, 1.f, a.data(), k, b.data(), n, 0.f,
                                   c.data(), n); },
        reps);
    std::printf("gemm %5ldx%5ldx%5ld  parallel %8.3f ms  %7.2f GFLOP/s", (long)m, (long)n,
                (long)k, t_par * 1e3, flops / t_par * 1e-9);
    if (with_serial) {
        double t_ser = time_best(
            [&] { kernels::serial::gemm<float>(false, false, m, n, k, 1.f, a.data(), k, b.data(),
                                               n, 0.f, cref.data(), n); },
            1);
        double max_rel = 0;
        for (size_t i = 0; i < c.size(); ++i) {
            double d = std::abs((double)c[i] - (double)cref[i]);
            double s = std::max(1.0, std::abs((double)cref[i]));
            max_rel = std::max(max_rel, d / s);
        }
        std::printf("  | serial %8.3f ms  %7.2f GFLOP/s  (speedup %.2fx, max rel err %.2e)",
                    t_ser * 1e3, flops / t_ser * 1e-9, t_ser / t_par, max_rel);
    }
    std::printf("\n");
}

void bench_conv(int64_t nimg, int64_t ci, int64_t co, int64_t hw, int reps, bool with_serial) {
    kernels::ConvGeom g{ci, co, 3, 3, 1, 1, 1, 1};
    Shape xs{nimg, ci, hw, hw};
    Shape ys{nimg, co, hw, hw};
    std::vector<float> x((size_t)xs.numel()), w((size_t)(co * ci * 9)), bias((size_t)co),
        y((size_t)ys.numel()), yref((size_t)ys.numel());
    Rng rng(7);
    fill_random(x, rng);
    fill_random(w, rng);
    fill_random(bias, rng);

    const double flops = 2.0 * (double)ys.numel() * (double)(ci * 9);
    double t_par = time_best(
        [&] { kernels::conv2d_fwd<float>(x.data(), xs, w.data(), bias.data(), y.data(), g); },
        reps);
    std::printf("conv n=%2ld %3ldx%3ld %3ld->%3ld  parallel %8.3f ms  %7.2f GFLOP/s", (long)nimg,
                (long)hw, (long)hw, (long)ci, (long)co, t_par * 1e3, flops / t_par * 1e-9);
    if (with_serial) {
        double t_ser = time_best(
            [&] {
                kernels::serial::conv2d_fwd<float>(x.data(), xs, w.data(), bias.data(),
                                                   yref.data(), g);
            },
            1);
        double max_rel = 0;
        for (size_t i = 0; i < y.size(); ++i) {
            double d = std::abs((double)y[i] - (double)yref[i]);
            double s = std::max(1.0, std::abs((double)yref[i]));
            max_rel = std::max(max_rel, d / s);
        }
        std::printf("  | serial %8.3f ms  (speedup %.2fx, max rel err %.2e)", t_ser * 1e3,
                    t_ser / t_par, max_rel);
    }
    std::printf("\n");
}

}  // namespace

int main(int argc, char** argv) {
    bool quick = false;
    int threads = 0;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--quick")) quick = true;
        if (!std::strcmp(argv[i], "--threads") && i + 1 < argc) threads = std::atoi(argv[++i]);
    }
    if (threads > 0) set_num_threads(threads);
    std::printf("threads: %d\n", num_threads());

    if (quick) {
        bench_gemm(64, 256, 128, 2, true);
        bench_conv(2, 16, 16, 32, 2, true);
        return 0;
    }

    bench_gemm(32, 4096, 288, 8, true);    // conv 3x3 32ch at 64x64
    bench_gemm(64, 1024, 576, 8, true);    // conv 3x3 64ch at 32x32
    bench_gemm(256, 256, 256, 8, true);
    bench_gemm(512, 512, 512, 5, true);
    bench_gemm(1024, 1024, 1024, 3, false);
    bench_conv(16, 32, 32, 64, 5, true);
    bench_conv(16, 64, 64, 32, 5, true);
    bench_conv(64, 16, 16, 64, 3, true);
    return 0;
}
