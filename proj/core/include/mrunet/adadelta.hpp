#pragma once

#include <span>
#include <vector>

#include "mrunet/tensor.hpp"

namespace mrunet {

struct AdadeltaOptions {
    double rho = 0.95;
    double eps = 1e-6;
    /// Multiplier applied to the Adadelta step ("learning rate" 1.0 is the plain method).
    double lr = 1.0;

    void validate() const;
};

/// Adadelta with per-element running averages of squared gradients and squared updates:
///
///   E[g^2]  <- rho E[g^2] + (1 - rho) g^2
///   dx      =  -sqrt(E[dx^2] + eps) / sqrt(E[g^2] + eps) * g
///   E[dx^2] <- rho E[dx^2] + (1 - rho) dx^2
///   x       <- x + lr dx
template <typename T>
class Adadelta {
public:
    explicit Adadelta(AdadeltaOptions options = {});

    /// Allocates zeroed accumulators matching `params`.
    void init(std::span<const Tensor<T>* const> params);

    /// Applies one update. params and grads must align element by element;
    /// accumulators are allocated on the first call.
    void step(std::span<Tensor<T>* const> params, std::span<const Tensor<T>* const> grads);

    const AdadeltaOptions& options() const noexcept { return options_; }
    const std::vector<std::vector<T>>& mean_sq_grad() const noexcept { return mean_sq_grad_; }
    const std::vector<std::vector<T>>& mean_sq_update() const noexcept { return mean_sq_update_; }

private:
    AdadeltaOptions options_;
    std::vector<std::vector<T>> mean_sq_grad_;
    std::vector<std::vector<T>> mean_sq_update_;
};

} // namespace mrunet
