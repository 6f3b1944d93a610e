#include "mrunet/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

namespace mrunet {
namespace {

constexpr int kMaxHalvings = 16;

struct Evaluation {
    double value = 0.0;
    std::uint64_t signature = 0;
};

Evaluation evaluate(const ScalarFunction& function, const std::vector<Tensor<double>>& inputs) {
    Tape<double> tape;
    tape.track_branches(true);
    std::vector<Var<double>> leaves;
    leaves.reserve(inputs.size());
    for (const auto& t : inputs) {
        leaves.push_back(tape.leaf(t, false));
    }
    const Var<double> out = function(tape, leaves);
    if (out.value().size() != 1) {
        throw ShapeError("grad_check: function must return a scalar, got " + shape_string(out.shape()));
    }
    return {out.value()[0], tape.branch_signature()};
}

} // namespace

GradCheckReport grad_check_report(const ScalarFunction& function, const std::vector<Tensor<double>>& inputs,
                                  double step) {
    if (!(step > 0.0)) {
        throw ValidationError("grad_check: step must be positive");
    }
    for (const auto& t : inputs) {
        for (double v : t.values()) {
            if (!std::isfinite(v)) {
                throw ValidationError("grad_check: inputs must be finite");
            }
        }
    }

    std::vector<Tensor<double>> analytic;
    double reference = 0.0;
    {
        Tape<double> tape;
        std::vector<Var<double>> leaves;
        for (const auto& t : inputs) {
            leaves.push_back(tape.leaf(t));
        }
        const Var<double> out = function(tape, leaves);
        reference = out.value()[0];
        tape.backward(out);
        for (const auto& leaf : leaves) {
            analytic.push_back(tape.grad_tensor(leaf));
        }
    }
    const Evaluation again = evaluate(function, inputs);
    if (again.value != reference) {
        throw UnreliableCheckError("grad_check: repeated evaluation changed the result (" +
                                   std::to_string(reference) + " vs " + std::to_string(again.value) + ")");
    }

    GradCheckReport report;
    std::vector<Tensor<double>> probe = inputs;
    for (std::size_t t = 0; t < probe.size(); ++t) {
        for (std::size_t i = 0; i < probe[t].size(); ++i) {
            const double original = probe[t][i];
            double h = step;
            double numeric = 0.0;
            for (int attempt = 0;; ++attempt) {
                probe[t][i] = original + h;
                const Evaluation plus = evaluate(function, probe);
                probe[t][i] = original - h;
                const Evaluation minus = evaluate(function, probe);
                numeric = (plus.value - minus.value) / (2.0 * h);
                const bool smooth = plus.signature == again.signature && minus.signature == again.signature;
                if (smooth) {
                    break;
                }
                if (attempt == kMaxHalvings) {
                    ++report.kinked_elements;
                    break;
                }
                if (attempt == 0) {
                    ++report.reduced_steps;
                }
                h /= 2.0;
            }
            probe[t][i] = original;

            const double exact = analytic[t][i];
            const double denom = std::max({std::abs(exact), std::abs(numeric), 1e-8});
            const double err = std::abs(exact - numeric) / denom;
            ++report.elements_checked;
            if (err > report.max_relative_error) {
                report.max_relative_error = err;
                report.worst_input = t;
                report.worst_index = i;
                report.analytic = exact;
                report.numeric = numeric;
            }
        }
    }
    return report;
}

} // namespace mrunet
