#pragma once

#include "mrunet/tape.hpp"
#include "mrunet/tensor.hpp"

// Differentiable operations over Tape-recorded variables. Every op checks its
// shape preconditions, computes the forward value eagerly and records exact
// analytic adjoints for the backward pass.

namespace mrunet {

/// Stride-1 convolution with a square odd kernel and "same" zero padding.
/// input [N,Cin,H,W], weights [Cout,Cin,k,k], bias [Cout] -> [N,Cout,H,W].
template <typename T>
Var<T> conv2d(const Var<T>& input, const Var<T>& weights, const Var<T>& bias);

/// 2x2 max pooling, stride 2. Gradient goes to the first maximum in row-major order.
template <typename T>
Var<T> max_pool2x2(const Var<T>& input);

/// 2x2 mean pooling, stride 2.
template <typename T>
Var<T> avg_pool2x2(const Var<T>& input);

/// 2x2 stride-2 transposed convolution.
/// input [N,Cin,H,W], weights [Cin,Cout,2,2], bias [Cout] -> [N,Cout,2H,2W].
template <typename T>
Var<T> transposed_conv2x2(const Var<T>& input, const Var<T>& weights, const Var<T>& bias);

template <typename T>
Var<T> relu(const Var<T>& input);

/// Concatenates along the channel axis, a's channels first.
template <typename T>
Var<T> concat_channels(const Var<T>& a, const Var<T>& b);

/// Per-pixel softmax across channels (C >= 2).
template <typename T>
Var<T> softmax_channels(const Var<T>& input);

// Reductions and elementwise helpers, mainly for building test objectives.

/// Sum of all elements, as a scalar of shape [1].
template <typename T>
Var<T> sum(const Var<T>& input);

/// Sum of input * weights for a constant weight tensor of the same shape.
template <typename T>
Var<T> weighted_sum(const Var<T>& input, const Tensor<T>& weights);

template <typename T>
Var<T> square(const Var<T>& input);

template <typename T>
Var<T> scale(const Var<T>& input, T factor);

} // namespace mrunet
