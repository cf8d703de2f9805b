#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <string>

namespace panogan {

// All tensors are logically 4-D (n, c, h, w). Vectors use (n, d, 1, 1),
// scalars (1, 1, 1, 1). Axis sizes of 1 broadcast in elementwise ops.
struct Shape {
    int64_t n = 1;
    int64_t c = 1;
    int64_t h = 1;
    int64_t w = 1;

    constexpr Shape() = default;
    constexpr Shape(int64_t n_, int64_t c_, int64_t h_, int64_t w_) : n(n_), c(c_), h(h_), w(w_) {}

    static constexpr Shape scalar() { return {1, 1, 1, 1}; }
    static constexpr Shape vec(int64_t len) { return {1, len, 1, 1}; }
    static constexpr Shape batch_vec(int64_t n, int64_t len) { return {n, len, 1, 1}; }

    constexpr int64_t numel() const { return n * c * h * w; }
    constexpr int64_t operator[](int axis) const {
        return axis == 0 ? n : axis == 1 ? c : axis == 2 ? h : w;
    }
    int64_t& axis(int a) { return a == 0 ? n : a == 1 ? c : a == 2 ? h : w; }

    constexpr bool operator==(const Shape&) const = default;

    std::string str() const {
        return "(" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) + "," +
               std::to_string(w) + ")";
    }
};

inline std::ostream& operator<<(std::ostream& os, const Shape& s) { return os << s.str(); }

}  // namespace panogan
