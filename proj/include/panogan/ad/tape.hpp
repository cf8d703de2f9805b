#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "panogan/core/tensor.hpp"

namespace panogan::ad {

// Eager reverse-mode tape. Every op computes its value immediately and
// records how to build input gradients *as new tape ops*, so gradients are
// themselves differentiable and the WGAN-GP gradient-of-gradient term falls
// out of a second backward pass.
template <class T>
class Tape {
public:
    using BackwardFn = std::function<std::vector<int>(Tape&, int self, int gy)>;

    struct Node {
        Tensor<T> value;
        std::vector<int> inputs;
        BackwardFn backward;  // null for leaves
        bool requires_grad = false;
        const char* op = "leaf";
    };

    int leaf(Tensor<T> v, bool requires_grad) {
        nodes_.push_back(Node{std::move(v), {}, nullptr, requires_grad, "leaf"});
        return (int)nodes_.size() - 1;
    }
    int constant(Tensor<T> v) { return leaf(std::move(v), false); }

    int emit(Tensor<T> value, std::vector<int> inputs, BackwardFn fn, const char* op) {
        bool rg = false;
        for (int i : inputs) rg = rg || nodes_[i].requires_grad;
        nodes_.push_back(
            Node{std::move(value), std::move(inputs), rg ? std::move(fn) : nullptr, rg, op});
        return (int)nodes_.size() - 1;
    }

    const Tensor<T>& val(int id) const { return nodes_[(size_t)id].value; }
    bool requires_grad(int id) const { return nodes_[(size_t)id].requires_grad; }
    int size() const { return (int)nodes_.size(); }

    // Releases every node at or past the watermark. Call between steps.
    void truncate(int watermark) { nodes_.resize((size_t)watermark); }
    void clear() { nodes_.clear(); }

    Node& mutable_node(int id) { return nodes_[(size_t)id]; }

private:
    std::vector<Node> nodes_;
};

// Reverse pass from a scalar root. Returns grad node ids indexed by node id
// (-1 where no gradient flows). Gradient nodes are appended to the tape and
// can be differentiated again (pass the returned ids into new ops and call
// backward on the result). With free_forward=true, interior forward values
// and consumed gradient buffers are released during the walk; use it only
// for the final backward pass of a step.
template <class T>
std::vector<int> backward(Tape<T>& tape, int root, bool free_forward = false);

using TapeF = Tape<float>;
using TapeD = Tape<double>;

}  // namespace panogan::ad
