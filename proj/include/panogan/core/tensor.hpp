#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "panogan/core/shape.hpp"

namespace panogan {

// Dense row-major tensor. The buffer is shared so reshapes and tape
// snapshots are cheap; values are treated as immutable once a node on the
// tape owns them.
template <class T>
class Tensor {
public:
    Tensor() : shape_{0, 0, 0, 0} {}
    explicit Tensor(Shape s) : shape_(s), data_(std::make_shared<std::vector<T>>(s.numel(), T(0))) {}
    Tensor(Shape s, std::shared_ptr<std::vector<T>> buf) : shape_(s), data_(std::move(buf)) {
        assert(data_ && (int64_t)data_->size() == shape_.numel());
    }
    Tensor(Shape s, std::vector<T> values)
        : shape_(s), data_(std::make_shared<std::vector<T>>(std::move(values))) {
        if ((int64_t)data_->size() != shape_.numel())
            throw std::invalid_argument("tensor data length does not match shape " + s.str());
    }

    static Tensor scalar(T v) {
        Tensor t(Shape::scalar());
        t.data()[0] = v;
        return t;
    }
    static Tensor full(Shape s, T v) {
        Tensor t(s);
        std::fill(t.data(), t.data() + t.numel(), v);
        return t;
    }

    const Shape& shape() const { return shape_; }
    int64_t numel() const { return shape_.numel(); }
    bool empty() const { return !data_; }

    T* data() { return data_->data(); }
    const T* data() const { return data_->data(); }
    std::span<T> span() { return {data_->data(), data_->size()}; }
    std::span<const T> span() const { return {data_->data(), data_->size()}; }
    const std::shared_ptr<std::vector<T>>& buffer() const { return data_; }

    T& at(int64_t n, int64_t c, int64_t h, int64_t w) {
        return (*data_)[((n * shape_.c + c) * shape_.h + h) * shape_.w + w];
    }
    T at(int64_t n, int64_t c, int64_t h, int64_t w) const {
        return (*data_)[((n * shape_.c + c) * shape_.h + h) * shape_.w + w];
    }

    // Same buffer, new shape; element count must match.
    Tensor reshaped(Shape s) const {
        if (s.numel() != shape_.numel())
            throw std::invalid_argument("reshape " + shape_.str() + " -> " + s.str());
        return Tensor(s, data_);
    }

    Tensor clone() const {
        Tensor t(shape_);
        std::copy(data_->begin(), data_->end(), t.data());
        return t;
    }

    template <class U>
    Tensor<U> cast() const {
        Tensor<U> t(shape_);
        for (int64_t i = 0; i < numel(); ++i) t.data()[i] = static_cast<U>(data()[i]);
        return t;
    }

    bool all_finite() const {
        for (const T& v : *data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    void release() { data_.reset(); }

private:
    Shape shape_;
    std::shared_ptr<std::vector<T>> data_;
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

}  // namespace panogan
