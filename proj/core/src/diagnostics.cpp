#include "mrunet/diagnostics.hpp"

#include <random>

#include "mrunet/loss.hpp"

namespace mrunet {

GradCheckReport model_loss_grad_check(const ArchitectureSpec& spec, std::size_t size, std::uint64_t seed,
                                      double step, std::size_t batch) {
    const Model<double> model = build_model<double>(spec, seed);
    std::mt19937_64 rng(seed ^ 0x5DEECE66Dull);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Tensor<double> image({batch, spec.in_channels, size, size});
    for (double& v : image.values()) {
        v = unit(rng);
    }
    Tensor<double> labels({batch, 1, size, size});
    for (double& v : labels.values()) {
        v = unit(rng) < 0.4 ? 1.0 : 0.0;
    }
    model.check_input(image.shape());

    std::vector<Tensor<double>> inputs;
    for (const auto& p : model.parameters()) {
        // Small random biases keep ReLU inputs away from exact zeros.
        Tensor<double> value = p.value;
        if (value.rank() == 1) {
            for (double& b : value.values()) {
                b = 0.1 * (unit(rng) - 0.5);
            }
        }
        inputs.push_back(std::move(value));
    }
    const ScalarFunction objective = [&](Tape<double>& tape, const std::vector<Var<double>>& params) {
        const Var<double> x = tape.leaf(image, false);
        return soft_dice_loss(model.forward(x, params), labels).loss;
    };
    return grad_check_report(objective, inputs, step);
}

} // namespace mrunet
