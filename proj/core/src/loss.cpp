#include "mrunet/loss.hpp"

#include <string>

namespace mrunet {
namespace {

template <typename T>
void check_inputs(const Tensor<T>& probs, const Tensor<T>& labels) {
    const Shape& ps = probs.shape();
    const Shape& ls = labels.shape();
    if (ps.size() != 4 || ps[1] != 2) {
        throw ShapeError("soft_dice_loss: probabilities must be [N,2,H,W], got " + shape_string(ps));
    }
    if (ls != Shape{ps[0], 1, ps[2], ps[3]}) {
        throw ShapeError("soft_dice_loss: labels " + shape_string(ls) + " do not match probabilities " +
                         shape_string(ps));
    }
    for (T g : labels.values()) {
        if (g != T{0} && g != T{1}) {
            throw ValidationError("soft_dice_loss: labels must be binary (0 or 1)");
        }
    }
}

struct Sums {
    double overlap = 0;
    double total = 0;
};

template <typename T>
std::vector<Sums> dice_sums(const Tensor<T>& probs, const Tensor<T>& labels) {
    const std::size_t n = probs.dim(0), hw = probs.dim(2) * probs.dim(3);
    std::vector<Sums> sums(n);
    for (std::size_t i = 0; i < n; ++i) {
        const T* p = probs.data() + (2 * i + 1) * hw;
        const T* g = labels.data() + i * hw;
        Sums& s = sums[i];
        for (std::size_t j = 0; j < hw; ++j) {
            s.overlap += static_cast<double>(p[j]) * static_cast<double>(g[j]);
            s.total += static_cast<double>(p[j]) + static_cast<double>(g[j]);
        }
    }
    return sums;
}

} // namespace

template <typename T>
std::vector<T> soft_dice_scores(const Tensor<T>& probs, const Tensor<T>& labels, T smoothing) {
    check_inputs(probs, labels);
    std::vector<T> scores;
    for (const Sums& s : dice_sums(probs, labels)) {
        scores.push_back(static_cast<T>((2 * s.overlap + smoothing) / (s.total + smoothing)));
    }
    return scores;
}

template <typename T>
LossValue<T> soft_dice_loss(const Var<T>& probs, const Tensor<T>& labels, T smoothing) {
    const Tensor<T>& p = probs.value();
    check_inputs(p, labels);
    const auto sums = dice_sums(p, labels);
    const std::size_t n = sums.size();

    LossValue<T> result;
    double mean = 0;
    for (const Sums& s : sums) {
        const double score = (2 * s.overlap + smoothing) / (s.total + smoothing);
        result.per_image_sdsc.push_back(static_cast<T>(score));
        mean += score;
    }
    mean /= static_cast<double>(n);

    // d sDSC / d p_j = (2 g_j (S + s) - (2 I + s)) / (S + s)^2, scaled by -1/N.
    auto backward = [labels, sums, smoothing](Tape<T>& tape, std::size_t self) {
        const std::size_t pi = tape.inputs(self)[0];
        const Tensor<T>& probs = tape.value(pi);
        const std::size_t count = probs.dim(0), hw = probs.dim(2) * probs.dim(3);
        const double upstream = static_cast<double>(tape.grad_buffer(self)[0]);
        std::span<T> dp = tape.grad_buffer(pi);
        for (std::size_t i = 0; i < count; ++i) {
            const double denom = sums[i].total + smoothing;
            const double numer = 2 * sums[i].overlap + smoothing;
            const double factor = -upstream / static_cast<double>(count) / (denom * denom);
            const T on_fg = static_cast<T>(factor * (2 * denom - numer));
            const T on_bg = static_cast<T>(factor * -numer);
            const T* g = labels.data() + i * hw;
            T* d = dp.data() + (2 * i + 1) * hw;
            for (std::size_t j = 0; j < hw; ++j) {
                d[j] += g[j] != T{0} ? on_fg : on_bg;
            }
        }
    };
    result.loss = probs.tape()->record(Tensor<T>({1}, {static_cast<T>(1.0 - mean)}), {probs.id()},
                                       std::move(backward));
    return result;
}

template LossValue<float> soft_dice_loss(const Var<float>&, const Tensor<float>&, float);
template LossValue<double> soft_dice_loss(const Var<double>&, const Tensor<double>&, double);
template std::vector<float> soft_dice_scores(const Tensor<float>&, const Tensor<float>&, float);
template std::vector<double> soft_dice_scores(const Tensor<double>&, const Tensor<double>&, double);

} // namespace mrunet
