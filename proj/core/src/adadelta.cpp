#include "mrunet/adadelta.hpp"

#include <cmath>
#include <string>

namespace mrunet {

void AdadeltaOptions::validate() const {
    if (!(rho > 0.0 && rho < 1.0)) {
        throw ValidationError("adadelta: rho must lie in (0,1)");
    }
    if (!(eps > 0.0)) {
        throw ValidationError("adadelta: eps must be positive");
    }
    if (!(lr > 0.0) || !std::isfinite(lr)) {
        throw ValidationError("adadelta: lr must be positive and finite");
    }
}

template <typename T>
Adadelta<T>::Adadelta(AdadeltaOptions options) : options_(options) {
    options_.validate();
}

template <typename T>
void Adadelta<T>::init(std::span<const Tensor<T>* const> params) {
    mean_sq_grad_.clear();
    mean_sq_update_.clear();
    for (const Tensor<T>* p : params) {
        mean_sq_grad_.emplace_back(p->size(), T{0});
        mean_sq_update_.emplace_back(p->size(), T{0});
    }
}

template <typename T>
void Adadelta<T>::step(std::span<Tensor<T>* const> params, std::span<const Tensor<T>* const> grads) {
    if (params.size() != grads.size()) {
        throw ShapeError("adadelta: " + std::to_string(params.size()) + " parameters but " +
                         std::to_string(grads.size()) + " gradients");
    }
    if (mean_sq_grad_.empty()) {
        std::vector<const Tensor<T>*> view(params.begin(), params.end());
        init(view);
    }
    if (mean_sq_grad_.size() != params.size()) {
        throw ShapeError("adadelta: parameter list changed size between steps");
    }
    const T rho = static_cast<T>(options_.rho);
    const T keep = static_cast<T>(1.0 - options_.rho);
    const T eps = static_cast<T>(options_.eps);
    const T lr = static_cast<T>(options_.lr);
    for (std::size_t t = 0; t < params.size(); ++t) {
        Tensor<T>& x = *params[t];
        const Tensor<T>& g = *grads[t];
        if (x.shape() != g.shape() || mean_sq_grad_[t].size() != x.size()) {
            throw ShapeError("adadelta: gradient " + shape_string(g.shape()) + " does not match parameter " +
                             shape_string(x.shape()));
        }
        T* eg = mean_sq_grad_[t].data();
        T* edx = mean_sq_update_[t].data();
        for (std::size_t i = 0; i < x.size(); ++i) {
            eg[i] = rho * eg[i] + keep * g[i] * g[i];
            const T dx = -std::sqrt(edx[i] + eps) / std::sqrt(eg[i] + eps) * g[i];
            edx[i] = rho * edx[i] + keep * dx * dx;
            x[i] += lr * dx;
        }
    }
}

template class Adadelta<float>;
template class Adadelta<double>;

} // namespace mrunet
