#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "panogan/ad/tape.hpp"
#include "panogan/core/tensor.hpp"

namespace panogan::ad {

// Named parameter tensors in a fixed order. Models register parameters at
// construction; training leafs them onto a tape each step and maps gradients
// back by index.
template <class T>
class ParamSet {
public:
    struct Entry {
        std::string name;
        Tensor<T> value;
    };

    int add(std::string name, Tensor<T> init) {
        entries_.push_back({std::move(name), std::move(init)});
        return (int)entries_.size() - 1;
    }

    int size() const { return (int)entries_.size(); }
    Entry& operator[](int i) { return entries_[(size_t)i]; }
    const Entry& operator[](int i) const { return entries_[(size_t)i]; }

    int find(const std::string& name) const {
        for (int i = 0; i < size(); ++i)
            if (entries_[(size_t)i].name == name) return i;
        return -1;
    }

    int64_t total_elements() const {
        int64_t n = 0;
        for (const auto& e : entries_) n += e.value.numel();
        return n;
    }

    bool all_finite() const {
        for (const auto& e : entries_)
            if (!e.value.all_finite()) return false;
        return true;
    }

    // Leafs every parameter onto the tape; returns ids aligned with indices.
    std::vector<int> leaf_all(Tape<T>& t, bool requires_grad) const {
        std::vector<int> ids(entries_.size());
        for (size_t i = 0; i < entries_.size(); ++i)
            ids[i] = t.leaf(entries_[i].value, requires_grad);
        return ids;
    }

    auto begin() { return entries_.begin(); }
    auto end() { return entries_.end(); }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

private:
    std::vector<Entry> entries_;
};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Adam with per-parameter step counts: parameters that receive no gradient
// in a step (inactive progressive blocks) are left untouched.
template <class T>
class Adam {
public:
    Adam() = default;
    Adam(AdamConfig cfg, const ParamSet<T>& ps) : cfg_(cfg) {
        m_.reserve((size_t)ps.size());
        v_.reserve((size_t)ps.size());
        for (int i = 0; i < ps.size(); ++i) {
            m_.emplace_back(ps[i].value.shape());
            v_.emplace_back(ps[i].value.shape());
        }
        t_.assign((size_t)ps.size(), 0);
    }

    const AdamConfig& config() const { return cfg_; }

    // grads[i] empty => skip parameter i.
    void step(ParamSet<T>& ps, const std::vector<Tensor<T>>& grads) {
        for (int i = 0; i < ps.size(); ++i) {
            if (grads[(size_t)i].empty()) continue;
            t_[(size_t)i] += 1;
            const double bc1 = 1.0 - std::pow(cfg_.beta1, (double)t_[(size_t)i]);
            const double bc2 = 1.0 - std::pow(cfg_.beta2, (double)t_[(size_t)i]);
            T* p = ps[i].value.data();
            T* m = m_[(size_t)i].data();
            T* v = v_[(size_t)i].data();
            const T* g = grads[(size_t)i].data();
            const int64_t n = ps[i].value.numel();
            for (int64_t j = 0; j < n; ++j) {
                const double gj = (double)g[j];
                const double mj = cfg_.beta1 * (double)m[j] + (1.0 - cfg_.beta1) * gj;
                const double vj = cfg_.beta2 * (double)v[j] + (1.0 - cfg_.beta2) * gj * gj;
                m[j] = (T)mj;
                v[j] = (T)vj;
                const double mhat = mj / bc1;
                const double vhat = vj / bc2;
                p[j] = (T)((double)p[j] - cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps));
            }
        }
    }

    // Optimizer state exposed for checkpointing.
    std::vector<Tensor<T>>& m() { return m_; }
    std::vector<Tensor<T>>& v() { return v_; }
    std::vector<int64_t>& steps() { return t_; }
    const std::vector<Tensor<T>>& m() const { return m_; }
    const std::vector<Tensor<T>>& v() const { return v_; }
    const std::vector<int64_t>& steps() const { return t_; }

private:
    AdamConfig cfg_;
    std::vector<Tensor<T>> m_, v_;
    std::vector<int64_t> t_;
};

}  // namespace panogan::ad
