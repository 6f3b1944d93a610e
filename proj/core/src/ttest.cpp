#include "mrunet/ttest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mrunet/errors.hpp"

namespace mrunet {
namespace {

double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIterations = 500;
    constexpr double kEps = 1e-15;
    constexpr double kTiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) {
        d = kTiny;
    }
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) {
            break;
        }
    }
    return h;
}

} // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0 && b > 0)) {
        throw ValidationError("incomplete_beta: a and b must be positive");
    }
    if (x <= 0.0) {
        return 0.0;
    }
    if (x >= 1.0) {
        return 1.0;
    }
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                             b * std::log1p(-x);
    const double front = std::exp(log_front);
    // The fraction converges fast for x < (a+1)/(a+b+2); use symmetry otherwise.
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_upper_tail(double t, double df) {
    if (!(df > 0)) {
        throw ValidationError("student_t_upper_tail: df must be positive");
    }
    if (std::isinf(t)) {
        return t > 0 ? 0.0 : 1.0;
    }
    const double tail = 0.5 * incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
    return t >= 0 ? tail : 1.0 - tail;
}

TTestResult paired_t_one_tailed(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ValidationError("paired t-test needs equal-length samples, got " + std::to_string(a.size()) + " and " +
                              std::to_string(b.size()));
    }
    const std::size_t n = a.size();
    if (n < 2) {
        throw ValidationError("paired t-test needs at least 2 pairs");
    }
    double mean = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mean += b[i] - a[i];
    }
    mean /= static_cast<double>(n);
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dev = (b[i] - a[i]) - mean;
        ss += dev * dev;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    // Differences equal up to rounding count as zero spread.
    if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) {
        throw DegenerateVarianceError("paired differences have zero variance; t is undefined");
    }
    TTestResult r;
    r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
    r.df = n - 1;
    r.p_one_tailed = student_t_upper_tail(r.t, static_cast<double>(r.df));
    r.significant = r.p_one_tailed < kSignificanceLevel;
    return r;
}

} // namespace mrunet
