#pragma once

#include <cstddef>
#include <span>

namespace mrunet {

inline constexpr double kSignificanceLevel = 0.05;

struct TTestResult {
    double t = 0;
    std::size_t df = 0;
    /// Upper-tail probability P(T >= t) under the null of no improvement.
    double p_one_tailed = 1;
    bool significant = false;
};

/// Regularized incomplete beta I_x(a, b) via Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);

/// P(T >= t) for Student's t with `df` degrees of freedom.
double student_t_upper_tail(double t, double df);

/// Paired one-tailed t-test of H1: b > a on d_i = b_i - a_i.
/// Throws ValidationError for unequal lengths or n < 2 and
/// DegenerateVarianceError when all differences are equal.
TTestResult paired_t_one_tailed(std::span<const double> a, std::span<const double> b);

} // namespace mrunet
