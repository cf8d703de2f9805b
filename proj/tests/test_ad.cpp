#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gradcheck.hpp"
#include "panogan/ad/ops.hpp"
#include "panogan/ad/optim.hpp"
#include "panogan/core/rng.hpp"
#include "panogan/core/threading.hpp"

using namespace panogan;
using namespace panogan::ad;

namespace {

Tensor<double> random_tensor(Shape s, uint64_t seed, double lo = -1.0, double hi = 1.0) {
    Rng rng(seed);
    Tensor<double> t(s);
    for (int64_t i = 0; i < t.numel(); ++i) t.data()[i] = rng.uniform(lo, hi);
    return t;
}

}  // namespace

TEST_CASE("pixel_norm normalises per-pixel channel vectors") {
    Tape<double> t;
    SUBCASE("single channel value 3") {
        int x = t.constant(Tensor<double>(Shape{1, 1, 1, 1}, std::vector<double>{3.0}));
        int y = pixel_norm(t, x);
        CHECK(t.val(y).data()[0] == doctest::Approx(3.0 / std::sqrt(9.0 + 1e-8)).epsilon(1e-12));
    }
    SUBCASE("all-ones vector unchanged") {
        int x = t.constant(Tensor<double>(Shape{1, 4, 1, 1}, std::vector<double>(4, 1.0)));
        int y = pixel_norm(t, x);
        for (int i = 0; i < 4; ++i)
            CHECK(t.val(y).data()[i] == doctest::Approx(1.0).epsilon(1e-7));
    }
    SUBCASE("zero vector stays zero") {
        int x = t.constant(Tensor<double>(Shape{1, 4, 1, 1}, std::vector<double>(4, 0.0)));
        int y = pixel_norm(t, x);
        for (int i = 0; i < 4; ++i) CHECK(t.val(y).data()[i] == 0.0);
    }
    SUBCASE("mean of squares is 1 for nonzero input") {
        Tape<double> tt;
        int x = tt.constant(random_tensor(Shape{2, 8, 3, 3}, 99));
        int y = pixel_norm(tt, x);
        const auto& v = tt.val(y);
        for (int64_t n = 0; n < 2; ++n)
            for (int64_t h = 0; h < 3; ++h)
                for (int64_t w = 0; w < 3; ++w) {
                    double ms = 0;
                    for (int64_t c = 0; c < 8; ++c) ms += v.at(n, c, h, w) * v.at(n, c, h, w);
                    CHECK(ms / 8.0 == doctest::Approx(1.0).epsilon(1e-5));
                }
    }
}

TEST_CASE("broadcast add and reduce round-trip") {
    Tape<double> t;
    int a = t.constant(random_tensor(Shape{2, 3, 4, 4}, 1));
    int b = t.constant(random_tensor(Shape{1, 3, 1, 1}, 2));
    int y = add(t, a, b);
    CHECK(t.val(y).shape() == Shape{2, 3, 4, 4});
    CHECK(t.val(y).at(1, 2, 3, 3) ==
          doctest::Approx(t.val(a).at(1, 2, 3, 3) + t.val(b).at(0, 2, 0, 0)));
}

TEST_CASE("gradcheck: composite network touching every op") {
    set_num_threads(1);
    // conv -> lrelu -> pixel_norm -> pool -> conv(s2) -> tanh -> upsample ->
    // concat/slice -> flatten -> matmul -> div/sqrt/square reductions.
    Tensor<double> x = random_tensor(Shape{2, 2, 8, 8}, 10);
    Tensor<double> w1 = random_tensor(Shape{3, 2, 3, 3}, 11, -0.5, 0.5);
    Tensor<double> b1 = random_tensor(Shape{1, 3, 1, 1}, 12, -0.1, 0.1);
    Tensor<double> w2 = random_tensor(Shape{4, 3, 3, 3}, 13, -0.5, 0.5);
    Tensor<double> wl = random_tensor(Shape{5, 4 * 4 * 4, 1, 1}, 14, -0.3, 0.3);
    kernels::ConvGeom g1{2, 3, 3, 3, 1, 1, 1, 1};
    kernels::ConvGeom g2{3, 4, 3, 3, 2, 2, 1, 1};

    Tape<double> tape;
    std::vector<int> ids;
    auto build = [&](bool leafed) {
        tape.clear();
        int xi = tape.constant(x);
        int w1i = leafed ? tape.leaf(w1, true) : tape.constant(w1);
        int b1i = leafed ? tape.leaf(b1, true) : tape.constant(b1);
        int w2i = leafed ? tape.leaf(w2, true) : tape.constant(w2);
        int wli = leafed ? tape.leaf(wl, true) : tape.constant(wl);
        ids = {w1i, b1i, w2i, wli};
        int h1 = leaky_relu(tape, add(tape, conv2d(tape, xi, w1i, g1), b1i), 0.2);
        int h2 = pixel_norm(tape, h1);
        int h3 = avgpool2(tape, h2);                       // 2x3x4x4
        int h4 = tanh_op(tape, conv2d(tape, h3, w2i, g2));  // 2x4x2x2
        int h5 = upsample2(tape, h4);                      // 2x4x4x4
        int h6 = concat_c(tape, h5, h5);                   // 2x8x4x4
        int h7 = slice_c(tape, h6, 2, 4);                  // 2x4x4x4
        int flat = reshape(tape, h7, Shape{2, 4 * 4 * 4, 1, 1});
        int lin = matmul(tape, flat, wli, false, true);  // 2x5
        int s1 = square(tape, lin);
        int s2 = div(tape, s1, add_const(tape, sqrt_op(tape, add_const(tape, s1, 1.0)), 0.5));
        int per = sum_axes(tape, s2, {false, true, false, false});
        int loss = mean_all(tape, sub(tape, expand(tape, per, Shape{2, 3, 1, 1}),
                                      scale(tape, per, 0.25)));
        return loss;
    };

    int loss = build(true);
    auto grads = backward(tape, loss, false);
    Tensor<double> ga[4];
    for (int i = 0; i < 4; ++i) {
        REQUIRE(grads[(size_t)ids[(size_t)i]] >= 0);
        ga[i] = tape.val(grads[(size_t)ids[(size_t)i]]).clone();
    }

    auto eval = [&]() -> double {
        int l = build(false);
        return tape.val(l).data()[0];
    };
    Tensor<double>* ps[4] = {&w1, &b1, &w2, &wl};
    for (int i = 0; i < 4; ++i) {
        auto r = testing::gradcheck(eval, *ps[i], ga[i], 1e-6);
        INFO("param ", i, " max rel err ", r.max_rel_err);
        CHECK(r.max_rel_err < 1e-6);
    }
}

TEST_CASE("gradcheck: gradient-penalty style double backward") {
    set_num_threads(1);
    // d(x) = sum(conv2(lrelu(conv1(x)))); penalty = (||dD/dx|| - 1)^2.
    // Checking parameter gradients of the penalty exercises grad-of-grad
    // through conv, lrelu and the norm chain.
    Tensor<double> x = random_tensor(Shape{2, 1, 6, 6}, 20);
    Tensor<double> w1 = random_tensor(Shape{2, 1, 3, 3}, 21, -0.6, 0.6);
    Tensor<double> w2 = random_tensor(Shape{1, 2, 3, 3}, 22, -0.6, 0.6);
    kernels::ConvGeom g1{1, 2, 3, 3, 1, 1, 1, 1};
    kernels::ConvGeom g2{2, 1, 3, 3, 1, 1, 1, 1};

    Tape<double> tape;
    std::vector<int> pids;
    auto build = [&](bool leafed) {
        tape.clear();
        int xi = tape.leaf(x, true);  // need d score / d x
        int w1i = leafed ? tape.leaf(w1, true) : tape.leaf(w1, true);
        int w2i = tape.leaf(w2, true);
        (void)leafed;
        pids = {w1i, w2i};
        int score = sum_all(tape, conv2d(tape, leaky_relu(tape, conv2d(tape, xi, w1i, g1), 0.2),
                                         w2i, g2));
        auto g = backward(tape, score, false);
        REQUIRE(g[(size_t)xi] >= 0);
        int gx = g[(size_t)xi];
        int flat = reshape(tape, gx, Shape{2, 36, 1, 1});
        int norms = sqrt_op(
            tape, add_const(tape, sum_axes(tape, square(tape, flat), {false, true, false, false}),
                            1e-12));
        int gp = mean_all(tape, square(tape, add_const(tape, norms, -1.0)));
        // include a plain first-order term so both orders mix
        return add(tape, gp, scale(tape, score, 0.01));
    };

    int loss = build(true);
    auto grads = backward(tape, loss, false);
    Tensor<double> ga[2];
    for (int i = 0; i < 2; ++i) {
        REQUIRE(grads[(size_t)pids[(size_t)i]] >= 0);
        ga[i] = tape.val(grads[(size_t)pids[(size_t)i]]).clone();
    }

    auto eval = [&]() -> double {
        int l = build(false);
        return tape.val(l).data()[0];
    };
    Tensor<double>* ps[2] = {&w1, &w2};
    for (int i = 0; i < 2; ++i) {
        auto r = testing::gradcheck(eval, *ps[i], ga[i], 1e-6);
        INFO("param ", i, " max rel err ", r.max_rel_err);
        CHECK(r.max_rel_err < 1e-6);
    }
}

TEST_CASE("free_forward backward produces identical parameter gradients") {
    set_num_threads(1);
    Tensor<double> x = random_tensor(Shape{3, 2, 4, 4}, 30);
    Tensor<double> w = random_tensor(Shape{2, 2, 3, 3}, 31, -0.5, 0.5);
    kernels::ConvGeom g{2, 2, 3, 3, 1, 1, 1, 1};

    auto run = [&](bool free_fwd) {
        Tape<double> tape;
        int xi = tape.constant(x);
        int wi = tape.leaf(w, true);
        int y = tanh_op(tape, conv2d(tape, xi, wi, g));
        int loss = mean_all(tape, square(tape, y));
        auto grads = backward(tape, loss, free_fwd);
        return tape.val(grads[(size_t)wi]).clone();
    };
    auto g0 = run(false);
    auto g1 = run(true);
    for (int64_t i = 0; i < g0.numel(); ++i) CHECK(g0.data()[i] == g1.data()[i]);
}

TEST_CASE("adam skips parameters without gradients") {
    ParamSet<double> ps;
    ps.add("a", Tensor<double>::full(Shape::vec(2), 1.0));
    ps.add("b", Tensor<double>::full(Shape::vec(2), 1.0));
    Adam<double> opt(AdamConfig{0.1, 0.9, 0.999, 1e-8}, ps);
    std::vector<Tensor<double>> grads(2);
    grads[0] = Tensor<double>::full(Shape::vec(2), 0.5);
    // grads[1] left empty
    opt.step(ps, grads);
    CHECK(ps[0].value.data()[0] != 1.0);
    CHECK(ps[1].value.data()[0] == 1.0);
    CHECK(opt.steps()[0] == 1);
    CHECK(opt.steps()[1] == 0);
}

TEST_CASE("matmul transpose variants agree with explicit transposition") {
    Tape<double> t;
    Tensor<double> a = random_tensor(Shape{3, 4, 1, 1}, 40);
    Tensor<double> b = random_tensor(Shape{4, 5, 1, 1}, 41);
    Tensor<double> at(Shape{4, 3, 1, 1});
    Tensor<double> bt(Shape{5, 4, 1, 1});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j) at.at(j, i, 0, 0) = a.at(i, j, 0, 0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 5; ++j) bt.at(j, i, 0, 0) = b.at(i, j, 0, 0);
    int y0 = matmul(t, t.constant(a), t.constant(b), false, false);
    int y1 = matmul(t, t.constant(at), t.constant(b), true, false);
    int y2 = matmul(t, t.constant(a), t.constant(bt), false, true);
    int y3 = matmul(t, t.constant(at), t.constant(bt), true, true);
    for (int i = 0; i < 15; ++i) {
        CHECK(t.val(y1).data()[i] == doctest::Approx(t.val(y0).data()[i]).epsilon(1e-12));
        CHECK(t.val(y2).data()[i] == doctest::Approx(t.val(y0).data()[i]).epsilon(1e-12));
        CHECK(t.val(y3).data()[i] == doctest::Approx(t.val(y0).data()[i]).epsilon(1e-12));
    }
}
