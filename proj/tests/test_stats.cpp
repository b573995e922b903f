#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/special_functions/beta.hpp>
#include <gtest/gtest.h>

#include "mhkelm/random.hpp"
#include "mhkelm/stats.hpp"

using namespace mhkelm;

TEST(IncompleteBeta, ReferenceValues) {
    EXPECT_NEAR(incomplete_beta(2.5, 0.5, 0.3), 0.01892712407194565, 1e-14);
    EXPECT_NEAR(incomplete_beta(10.0, 3.0, 0.7), 0.2528153478549999, 1e-14);
    EXPECT_NEAR(incomplete_beta(0.5, 49.5, 0.02), 0.8416600943402744, 1e-13);
    EXPECT_EQ(incomplete_beta(2.0, 3.0, 0.0), 0.0);
    EXPECT_EQ(incomplete_beta(2.0, 3.0, 1.0), 1.0);
    EXPECT_THROW(incomplete_beta(0.0, 1.0, 0.5), DomainError);
    EXPECT_THROW(incomplete_beta(1.0, 1.0, 1.5), DomainError);
}

TEST(IncompleteBeta, AgreesWithBoostTo1e10) {
    Rng rng(31);
    for (int i = 0; i < 2000; ++i) {
        const double a = std::exp(rng.uniform(std::log(0.05), std::log(200.0)));
        const double b = std::exp(rng.uniform(std::log(0.05), std::log(200.0)));
        const double x = rng.uniform();
        const double ref = boost::math::ibeta(a, b, x);
        EXPECT_NEAR(incomplete_beta(a, b, x), ref, 1e-10 * std::max(1.0, std::abs(ref))) << a << " " << b << " " << x;
    }
}

TEST(StudentT, CriticalValues) {
    // 97.5% quantiles: the two-sided tail there is 0.05.
    const std::vector<std::pair<double, double>> table{{1, 12.706204736432095}, {2, 4.302652729696142},
                                                       {4, 2.7764451051977987}, {10, 2.2281388519649385},
                                                       {30, 2.0422724563012373}, {99, 1.9842169515086827}};
    for (const auto& [df, t] : table) {
        EXPECT_NEAR(student_t_two_sided(t, df), 0.05, 1e-10) << "df=" << df;
        EXPECT_NEAR(student_t_cdf(t, df), 0.975, 1e-10) << "df=" << df;
        EXPECT_NEAR(student_t_cdf(-t, df), 0.025, 1e-10) << "df=" << df;
    }
}

TEST(StudentT, CdfAtOnePointFive) {
    const std::vector<std::pair<double, double>> table{{1, 0.8128329581890013}, {2, 0.8638034375544995},
                                                       {4, 0.896},                {10, 0.9177463367772799},
                                                       {30, 0.927967035435677},   {99, 0.9316015911420134}};
    for (const auto& [df, p] : table) EXPECT_NEAR(student_t_cdf(1.5, df), p, 1e-10) << "df=" << df;
}

TEST(PairedTTest, ReferenceCase) {
    const std::vector<double> a{1, 2, 3, 4, 5}, zero(5, 0.0);
    EXPECT_NEAR(paired_t_test(a, zero), 0.013235599563682695, 1e-12);
    EXPECT_NEAR(paired_t_test(a, zero), 0.0132, 1e-3);
}

TEST(PairedTTest, DegenerateAndSymmetric) {
    const std::vector<double> a{0.91, 0.93, 0.95, 0.9}, b{0.9, 0.95, 0.91, 0.88};
    EXPECT_EQ(paired_t_test(a, a), 1.0);
    EXPECT_EQ(paired_t_test(a, b), paired_t_test(b, a));
    const double p = paired_t_test(a, b);
    EXPECT_GT(p, 0.0);
    EXPECT_LE(p, 1.0);
}

TEST(PairedTTest, ConstantNonzeroDifferenceStaysPositive) {
    const std::vector<double> a{2, 3, 4}, b{1, 2, 3};
    const double p = paired_t_test(a, b);
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 1e-300);
}

TEST(PairedTTest, ContractErrors) {
    const std::vector<double> three{1, 2, 3}, two{1, 2}, one{1};
    EXPECT_THROW(paired_t_test(three, two), UsageError);
    EXPECT_THROW(paired_t_test(one, one), UsageError);
}

TEST(Summary, MeanAndSampleStd) {
    const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
    EXPECT_DOUBLE_EQ(mean(v), 5.0);
    EXPECT_NEAR(sample_std(v), std::sqrt(32.0 / 7.0), 1e-15);
    EXPECT_EQ(sample_std(std::vector<double>{3.0}), 0.0);
    EXPECT_THROW(mean(std::vector<double>{}), UsageError);
}
