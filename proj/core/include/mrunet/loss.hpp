#pragma once

#include <vector>

#include "mrunet/tape.hpp"
#include "mrunet/tensor.hpp"

namespace mrunet {

inline constexpr double kDiceSmoothing = 1.0;

template <typename T>
struct LossValue {
    /// Scalar [1] node equal to 1 - mean(per_image_sdsc).
    Var<T> loss;
    std::vector<T> per_image_sdsc;

    T value() const { return loss.value()[0]; }
};

/// Soft Dice loss over the foreground channel (index 1) of a softmax output.
///
/// Per image: sDSC = (2 sum(p*g) + s) / (sum(p) + sum(g) + s); the loss is one
/// minus the batch mean. probs is [N,2,H,W], labels [N,1,H,W] with values in {0,1}.
template <typename T>
LossValue<T> soft_dice_loss(const Var<T>& probs, const Tensor<T>& labels, T smoothing = T(kDiceSmoothing));

/// Per-image soft Dice without recording anything; used for validation.
template <typename T>
std::vector<T> soft_dice_scores(const Tensor<T>& probs, const Tensor<T>& labels, T smoothing = T(kDiceSmoothing));

} // namespace mrunet
