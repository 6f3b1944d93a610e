#include <gtest/gtest.h>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <random>

#include "mrunet/errors.hpp"
#include "mrunet/ttest.hpp"

using namespace mrunet;

namespace {

double boost_upper_tail(double t, double df) {
    return boost::math::cdf(boost::math::complement(boost::math::students_t(df), t));
}

} // namespace

TEST(TTest, ReferenceExample) {
    const std::vector<double> a{0, 0, 0, 0, 0};
    const std::vector<double> b{1, 2, 3, 4, 5};
    const TTestResult r = paired_t_one_tailed(a, b);
    EXPECT_NEAR(r.t, 3.0 / std::sqrt(2.5 / 5.0), 1e-12);
    EXPECT_NEAR(r.t, 4.2426, 1e-3);
    EXPECT_EQ(r.df, 4u);
    EXPECT_NEAR(r.p_one_tailed, 0.0066, 1e-3);
    EXPECT_NEAR(r.p_one_tailed, boost_upper_tail(r.t, 4), 1e-10);
    EXPECT_TRUE(r.significant);
}

TEST(TTest, UpperTailMatchesBoost) {
    for (double df : {1.0, 2.0, 3.0, 7.0, 19.0, 60.0, 500.0}) {
        for (double t : {-6.0, -1.3, -0.01, 0.0, 0.4, 1.0, 2.1, 4.2426, 9.0, 40.0}) {
            EXPECT_NEAR(student_t_upper_tail(t, df), boost_upper_tail(t, df), 1e-10) << df << " " << t;
        }
    }
}

TEST(TTest, IncompleteBetaMatchesBoost) {
    for (double a : {0.5, 1.0, 2.5, 10.0})
        for (double b : {0.5, 3.0, 12.0})
            for (double x : {0.0, 0.01, 0.3, 0.5, 0.77, 0.999, 1.0}) {
                EXPECT_NEAR(incomplete_beta(a, b, x), boost::math::ibeta(a, b, x), 1e-10);
            }
}

TEST(TTest, SignificanceFlagIsExactlyPBelowAlpha) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> a(8), b(8);
        const double shift = 0.01 * trial - 1.0;
        for (std::size_t i = 0; i < 8; ++i) {
            a[i] = noise(rng);
            b[i] = a[i] + shift + noise(rng);
        }
        const TTestResult r = paired_t_one_tailed(a, b);
        EXPECT_EQ(r.significant, r.p_one_tailed < kSignificanceLevel);
        EXPECT_NEAR(r.p_one_tailed, boost_upper_tail(r.t, 7), 1e-10);
    }
}

TEST(TTest, WrongDirectionIsNotSignificant) {
    const std::vector<double> a{0.3, 0.9, 0.5, 0.7, 0.1};
    std::vector<double> b{0.5, 0.1, 0.7, 0.9, 0.3};  // shuffled values
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = a[i] - 1.0 - 0.01 * static_cast<double>(i);
    const TTestResult r = paired_t_one_tailed(a, b);
    EXPECT_LT(r.t, 0.0);
    EXPECT_GT(r.p_one_tailed, 0.5);
    EXPECT_FALSE(r.significant);
}

TEST(TTest, PDecreasesWithMeanDifference) {
    const std::vector<double> base{0.0, 1.0, -1.0, 0.5, -0.5};
    const std::vector<double> zeros(5, 0.0);
    double last = 1.0;
    for (double m = -1.0; m <= 2.0; m += 0.25) {
        std::vector<double> b = base;
        for (double& v : b) v += m;
        const double p = paired_t_one_tailed(zeros, b).p_one_tailed;
        EXPECT_LT(p, last);
        last = p;
    }
}

TEST(TTest, Errors) {
    const std::vector<double> a{1, 2, 3};
    const std::vector<double> same{1, 2, 3};
    const std::vector<double> offset{2, 3, 4};
    EXPECT_THROW(paired_t_one_tailed(a, same), DegenerateVarianceError);
    EXPECT_THROW(paired_t_one_tailed(a, offset), DegenerateVarianceError);
    const std::vector<double> one{1};
    EXPECT_THROW(paired_t_one_tailed(one, one), ValidationError);
    const std::vector<double> two{1, 2};
    EXPECT_THROW(paired_t_one_tailed(a, two), ValidationError);
}
