#include <gtest/gtest.h>

#include <cmath>

#include "moboga/acquisition.hpp"
#include "oracles.hpp"

using namespace moboga;

TEST(Acquisition, EiDegenerateSigma)
{
    EXPECT_EQ(expected_improvement(2.0, 0.0, 2.0), 0.0);
    EXPECT_EQ(expected_improvement(1.0, 0.0, 2.0), 1.0);
    EXPECT_EQ(expected_improvement(3.0, 0.0, 2.0), 0.0);
}

TEST(Acquisition, EiReferenceValue)
{
    double const expect = normal_cdf(1.0) + normal_pdf(1.0);
    EXPECT_NEAR(expected_improvement(0.0, 1.0, 1.0), expect, 1e-15);
    EXPECT_NEAR(expected_improvement(0.0, 1.0, 1.0), 1.08332, 1e-5);
    EXPECT_NEAR(oracle::ei_quadrature(0.0, 1.0, 1.0), expected_improvement(0.0, 1.0, 1.0), 1e-8);
}

TEST(Acquisition, EiMatchesQuadratureOnGrid)
{
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            for (int k = 0; k < 5; ++k) {
                double const mu = -3.0 + 0.6 * i;
                double const sigma = 1e-3 * std::pow(5.0 / 1e-3, j / 9.0);
                double const yb = -1.0 + 0.5 * k;
                ASSERT_NEAR(expected_improvement(mu, sigma, yb), oracle::ei_quadrature(mu, sigma, yb), 1e-6)
                    << mu << ' ' << sigma << ' ' << yb;
            }
        }
    }
}

TEST(Acquisition, EiMonotoneInSigmaWhenMeanIsWorse)
{
    for (double gap : {0.01, 0.5, 2.0}) {
        double prev = 0.0;
        for (int j = 0; j <= 200; ++j) {
            double const ei = expected_improvement(gap, j * 0.025, 0.0);
            ASSERT_GE(ei, prev);
            ASSERT_GE(ei, 0.0);
            prev = ei;
        }
    }
}

TEST(Acquisition, IncumbentPrefersFeasible)
{
    std::vector<double> y = {3.0, 1.0, 2.0};
    EXPECT_EQ(incumbent(y, {true, false, true}), 2.0);
    EXPECT_EQ(incumbent(y, {false, false, false}), 1.0);
    EXPECT_EQ(incumbent(y, {true, true, true}), 1.0);
}

class CaEi : public ::testing::Test {
  protected:
    SearchSpace space{{ParamSpec::continuous("x", 0.0, 1.0)}};
    std::vector<std::vector<double>> X{{0.1}, {0.5}, {0.9}};
    std::vector<double> y{1.0, 0.2, 0.8};
    GpModel model = gp_fit(X, y, FixedHyper{GpHyperParams{{0.2}, 1.0, 1e-6}});

    static ConstraintSpec right_half(ConstraintMode m)
    {
        return {"right", [](Candidate const& c) { return c.real(0) >= 0.5; }, std::move(m), {}};
    }

    double plain(double x) const
    {
        auto const p = model.posterior(std::vector<double>{x});
        return expected_improvement(p.mean, p.sigma, 0.2);
    }
};

TEST_F(CaEi, NoConstraintsIsPlainEi)
{
    AcquisitionContext ctx{model, 0.2, {}, space};
    for (int i = 0; i <= 20; ++i) {
        double const x = i / 20.0;
        EXPECT_EQ(ca_ei(ctx, {{x}}), plain(x));
    }
}

TEST_F(CaEi, ViolatedHardIsZero)
{
    std::vector<ConstraintSpec> cs = {right_half(Hard{})};
    AcquisitionContext ctx{model, 0.2, cs, space};
    for (int i = 0; i < 10; ++i) {
        EXPECT_EQ(ca_ei(ctx, {{i / 20.0}}), 0.0);
    }
    EXPECT_EQ(ca_ei(ctx, {{0.7}}), plain(0.7));
}

TEST_F(CaEi, HardEqualsSoftWithZeroBeta)
{
    std::vector<ConstraintSpec> hard = {right_half(Hard{})};
    std::vector<ConstraintSpec> soft = {right_half(constant_beta(0.0))};
    AcquisitionContext h{model, 0.2, hard, space};
    AcquisitionContext s{model, 0.2, soft, space};
    for (int i = 0; i <= 100; ++i) {
        Candidate const c{{i / 100.0}};
        ASSERT_EQ(ca_ei(h, c), ca_ei(s, c));
    }
}

TEST_F(CaEi, SoftHalvesEi)
{
    std::vector<ConstraintSpec> cs = {right_half(constant_beta(0.5))};
    AcquisitionContext ctx{model, 0.2, cs, space};
    for (int i = 0; i < 10; ++i) {
        double const x = i / 20.0;
        EXPECT_EQ(ca_ei(ctx, {{x}}), 0.5 * plain(x));
    }
}

TEST_F(CaEi, NonNegativeEverywhere)
{
    std::vector<ConstraintSpec> cs = {right_half(Soft{[](Candidate const& c) { return c.real(0); }})};
    AcquisitionContext ctx{model, 0.2, cs, space};
    for (int i = 0; i <= 1000; ++i) {
        ASSERT_GE(ca_ei(ctx, {{i / 1000.0}}), 0.0);
    }
}
