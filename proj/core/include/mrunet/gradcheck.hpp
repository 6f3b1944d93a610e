#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "mrunet/tape.hpp"
#include "mrunet/tensor.hpp"

namespace mrunet {

/// A scalar-valued computation recorded on the given tape from leaf variables.
using ScalarFunction = std::function<Var<double>(Tape<double>&, const std::vector<Var<double>>&)>;

struct GradCheckReport {
    double max_relative_error = 0.0;
    std::size_t worst_input = 0;
    std::size_t worst_index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
    std::size_t elements_checked = 0;
    /// Elements whose stencil had to shrink to stay on one side of a kink.
    std::size_t reduced_steps = 0;
    /// Elements still straddling a kink at the smallest step (checked anyway).
    std::size_t kinked_elements = 0;
};

/// Compares the taped gradient of `function` against central differences,
/// element by element over every input. The per-element error is
/// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
///
/// The function is evaluated with branch tracking on. When x +- step lands on a
/// different relu/max-pool branch than x, the difference quotient does not
/// estimate the derivative at x, so the step is halved (up to 16 times) until
/// both points share the branch of x.
///
/// Throws UnreliableCheckError when two evaluations at the unperturbed point
/// disagree, ValidationError for a non-positive step or non-finite inputs.
GradCheckReport grad_check_report(const ScalarFunction& function, const std::vector<Tensor<double>>& inputs,
                                  double step);

inline double grad_check(const ScalarFunction& function, const std::vector<Tensor<double>>& inputs, double step) {
    return grad_check_report(function, inputs, step).max_relative_error;
}

} // namespace mrunet
