#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "mhkelm/admissibility.hpp"

using namespace mhkelm;

TEST(NumericFourier, GaussianAtZeroIsOne) {
    EXPECT_NEAR(numeric_fourier_1d(gauss_profile(1.0), 0.0, 10.0, 2001), 1.0, 1e-12);
}

TEST(NumericFourier, MexicanHatReferenceValues) {
    EXPECT_NEAR(numeric_fourier_1d(mexican_hat_profile(1.0), 0.0, 10.0, 2001), 0.0, 1e-8);
    // a^3 w^2 exp(-a^2 w^2 / 2), values from adaptive high-precision quadrature
    EXPECT_NEAR(numeric_fourier_1d(mexican_hat_profile(1.0), 1.0, 10.0, 2001), 0.6065306597126334, 1e-10);
    EXPECT_NEAR(numeric_fourier_1d(mexican_hat_profile(0.5), 1.0, 5.0, 2001), 0.110312112823074425, 1e-10);
    EXPECT_NEAR(numeric_fourier_1d(mexican_hat_profile(0.5), 3.0, 5.0, 2001), 0.365234025778143446, 1e-10);
    EXPECT_NEAR(numeric_fourier_1d(mexican_hat_profile(2.0), 0.7, 20.0, 2001), 1.471219507497486188, 1e-9);
}

TEST(NumericFourier, QuadratureConverged) {
    const auto p = mexican_hat_profile(1.0);
    EXPECT_LT(std::abs(numeric_fourier_1d(p, 1.0, 10.0, 2001) - numeric_fourier_1d(p, 1.0, 10.0, 4001)), 1e-9);
}

TEST(NumericFourier, ContractErrors) {
    const auto p = mexican_hat_profile(1.0);
    EXPECT_THROW(numeric_fourier_1d(p, 1.0, 10.0, 1000), ConfigError);
    EXPECT_THROW(numeric_fourier_1d(p, 1.0, 10.0, 999), ConfigError);
    EXPECT_THROW(numeric_fourier_1d(p, 1.0, 0.0, 2001), ConfigError);
    EXPECT_THROW(numeric_fourier_1d([](double x) { return std::exp(-(x - 0.3) * (x - 0.3)); }, 1.0, 10.0, 2001), UsageError);
}

TEST(ClosedForm, Examples) {
    const std::vector<double> with_zero{1.3, 0.0, 2.0};
    EXPECT_EQ(closed_form_ft(0.7, with_zero), 0.0);
    EXPECT_NEAR(closed_form_ft(1.0, 1.0), 3.81094452946036, 1e-13);
    EXPECT_NEAR(closed_form_ft(2.0, 1.0), 2.0 * std::numbers::pi * 8.0 * std::exp(-2.0), 1e-13);
    EXPECT_NEAR(closed_form_ft(2.0, 1.0), 6.80269330540218, 1e-13);
    EXPECT_THROW(closed_form_ft(0.0, 1.0), ConfigError);
    EXPECT_THROW(closed_form_ft(-1.0, 1.0), ConfigError);
}

TEST(VerifyAdmissibility, MexicanHatAndGauss) {
    const auto r1 = verify_admissibility(KernelSpec::mexican_hat(1.0), omega_grid(8.0, 400));
    EXPECT_EQ(r1.verdict, Verdict::Admissible);
    EXPECT_EQ(r1.numeric_ft.size(), 400u);
    EXPECT_EQ(r1.closed_form.size(), 400u);
    // Numeric transform is the closed form divided by 2 pi.
    EXPECT_NEAR(r1.proportionality_ratio, 1.0 / (2.0 * std::numbers::pi), 1e-6);

    const auto g = verify_admissibility(KernelSpec::gauss(1.0), omega_grid(8.0, 400));
    EXPECT_EQ(g.verdict, Verdict::Admissible);
    EXPECT_TRUE(g.closed_form.empty());
    EXPECT_TRUE(std::isnan(g.proportionality_ratio));
}

TEST(VerifyAdmissibility, HalfDilationShapeIsProportional) {
    const double a = 0.5;
    const auto r = verify_admissibility(KernelSpec::mexican_hat(a), omega_grid(8.0 / a, 400));
    EXPECT_EQ(r.verdict, Verdict::Admissible);
    double worst = 0.0;
    for (std::size_t i = 0; i < r.omega_grid.size(); ++i) {
        const double w = r.omega_grid[i];
        if (w < 0.2 / a || w > 4.0 / a) continue;
        worst = std::max(worst, std::abs(r.numeric_ft[i] / r.closed_form[i] - r.proportionality_ratio) / r.proportionality_ratio);
    }
    EXPECT_LT(worst, 0.01);
}

TEST(VerifyAdmissibility, Errors) {
    const auto grid = omega_grid(8.0, 200);
    EXPECT_THROW(verify_admissibility(KernelSpec::poly(2), grid), UsageError);
    EXPECT_THROW(verify_admissibility(KernelSpec::mexican_hat_dot(1.0, 0.0), grid), UsageError);
    const std::vector<double> unsorted{0.0, 2.0, 1.0};
    EXPECT_THROW(verify_admissibility(KernelSpec::mexican_hat(1.0), unsorted), UsageError);
    try {
        verify_admissibility(KernelSpec::poly(2), grid);
    } catch (const UsageError& e) {
        EXPECT_NE(std::string(e.what()).find("not translation-invariant"), std::string::npos);
    }
}

TEST(Verdict, RelativeTolerance) {
    EXPECT_EQ(fourier_verdict(-0.5e-8, 1.0), Verdict::Admissible);
    EXPECT_EQ(fourier_verdict(-2e-8, 1.0), Verdict::NotAdmissible);
    EXPECT_EQ(fourier_verdict(-2e-8, 100.0), Verdict::Admissible);
    EXPECT_EQ(fourier_verdict(0.0, 0.0), Verdict::Inconclusive);
}

TEST(Nonnegativity, AcrossDilations) {
    for (double a : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        const auto r = verify_admissibility(KernelSpec::mexican_hat(a), omega_grid(8.0 / a, 400));
        EXPECT_GE(r.min_numeric_ft, -1e-8 * r.max_numeric_ft) << "a=" << a;
        std::vector<double> band;
        for (int i = 0; i <= 100; ++i) band.push_back((0.2 + 3.8 * i / 100.0) / a);
        EXPECT_LT(wavelet_shape_deviation(a, band), 0.01) << "a=" << a;
    }
}

TEST(PsdAudit, MexicanHatAndGauss) {
    for (const auto& spec : {KernelSpec::mexican_hat(1.0), KernelSpec::gauss(1.0)}) {
        const auto s = psd_audit(spec, 50, 4, 10);
        EXPECT_TRUE(s.passes()) << spec.describe() << " worst " << s.worst_relative;
        EXPECT_EQ(s.per_seed_min.size(), 10u);
    }
}

TEST(PsdAudit, SinglePointHasUnitEigenvalue) {
    const auto s = psd_audit(KernelSpec::mexican_hat(0.3), 1, 3, 2);
    EXPECT_DOUBLE_EQ(s.min_eigenvalue, 1.0);
    EXPECT_DOUBLE_EQ(s.max_eigenvalue, 1.0);
}

TEST(PsdAudit, Limits) {
    EXPECT_THROW(psd_audit(KernelSpec::gauss(1.0), 201, 2, 1), ConfigError);
    EXPECT_THROW(psd_audit(KernelSpec::gauss(1.0), 10, 0, 1), ConfigError);
}
