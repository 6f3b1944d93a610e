#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mrunet/errors.hpp"
#include "mrunet/tensor.hpp"

namespace mrunet {

template <typename T>
class Tape;

/// Handle to a node recorded on a Tape. Cheap to copy; valid while its tape lives.
template <typename T>
class Var {
public:
    Var() = default;

    Tape<T>* tape() const noexcept { return tape_; }
    std::size_t id() const noexcept { return id_; }
    bool valid() const noexcept { return tape_ != nullptr; }

    const Tensor<T>& value() const {
        if (tape_ == nullptr) {
            throw GraphError("variable is not attached to a tape");
        }
        return tape_->value(*this);
    }
    const Shape& shape() const { return value().shape(); }

private:
    friend class Tape<T>;
    Var(Tape<T>* tape, std::size_t id) : tape_(tape), id_(id) {}

    Tape<T>* tape_ = nullptr;
    std::size_t id_ = 0;
};

/// Define-by-run record of differentiable operations.
///
/// Nodes are appended in evaluation order, so every node's inputs have smaller
/// ids than the node itself. backward() walks the ids in reverse, visiting each
/// node once and letting its closure accumulate into the gradients of its inputs.
template <typename T>
class Tape {
public:
    /// Accumulates the node's gradient into its inputs' gradients.
    using BackwardFn = std::function<void(Tape&, std::size_t)>;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var<T> leaf(Tensor<T> value, bool requires_grad = true) {
        nodes_.push_back(Node{std::move(value), {}, {}, nullptr, requires_grad});
        return Var<T>(this, nodes_.size() - 1);
    }

    /// Appends the result of an operation. Used by the op implementations.
    Var<T> record(Tensor<T> value, std::vector<std::size_t> inputs, BackwardFn fn) {
        const bool needs = std::any_of(inputs.begin(), inputs.end(),
                                       [this](std::size_t i) { return nodes_[i].requires_grad; });
        nodes_.push_back(Node{std::move(value), {}, std::move(inputs), needs ? std::move(fn) : nullptr, needs});
        return Var<T>(this, nodes_.size() - 1);
    }

    void check_owned(const Var<T>& v) const {
        if (v.tape() != this || v.id() >= nodes_.size()) {
            throw GraphError("variable is not recorded on this tape");
        }
    }

    const Tensor<T>& value(const Var<T>& v) const {
        check_owned(v);
        return nodes_[v.id()].value;
    }
    const Tensor<T>& value(std::size_t id) const { return nodes_[id].value; }

    bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
    const std::vector<std::size_t>& inputs(std::size_t id) const { return nodes_[id].inputs; }

    /// Mutable gradient buffer of a node, zero-initialised on first access.
    std::span<T> grad_buffer(std::size_t id) {
        Node& node = nodes_[id];
        if (node.grad.empty()) {
            node.grad.assign(node.value.size(), T{0});
        }
        return node.grad;
    }

    /// Gradient of the last backward() target with respect to v. Empty when v
    /// was not reached by the backward pass.
    std::span<const T> grad(const Var<T>& v) const {
        check_owned(v);
        return nodes_[v.id()].grad;
    }

    /// Gradient as a tensor shaped like the value; zeros when v was not reached.
    Tensor<T> grad_tensor(const Var<T>& v) const {
        check_owned(v);
        const Node& node = nodes_[v.id()];
        if (node.grad.empty()) {
            return Tensor<T>(node.value.shape());
        }
        return Tensor<T>(node.value.shape(), node.grad);
    }

    void backward(const Var<T>& loss) {
        check_owned(loss);
        if (nodes_[loss.id()].value.size() != 1) {
            throw ShapeError("backward() needs a scalar loss, got shape " +
                             shape_string(nodes_[loss.id()].value.shape()));
        }
        grad_buffer(loss.id())[0] += T{1};
        for (std::size_t id = loss.id() + 1; id-- > 0;) {
            Node& node = nodes_[id];
            if (node.grad.empty() || !node.backward) {
                continue;
            }
            node.backward(*this, id);
        }
    }

    void zero_grad() {
        for (Node& node : nodes_) {
            node.grad.clear();
        }
    }

    std::size_t size() const noexcept { return nodes_.size(); }

    /// When enabled, non-smooth ops (relu, max pooling) fold their discrete
    /// decisions into branch_signature(). Two evaluations with equal signatures
    /// took the same piecewise-smooth branch.
    void track_branches(bool enabled) noexcept { tracking_ = enabled; }
    bool tracking_branches() const noexcept { return tracking_; }
    void note_branch(std::uint64_t word) noexcept {
        std::uint64_t z = signature_ + word + 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        signature_ = z ^ (z >> 31);
    }
    std::uint64_t branch_signature() const noexcept { return signature_; }

private:
    struct Node {
        Tensor<T> value;
        std::vector<T> grad;
        std::vector<std::size_t> inputs;
        BackwardFn backward;
        bool requires_grad = false;
    };

    std::vector<Node> nodes_;
    bool tracking_ = false;
    std::uint64_t signature_ = 0;
};

} // namespace mrunet
