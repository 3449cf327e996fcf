#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "moboga/surrogate.hpp"
#include "oracles.hpp"

using namespace moboga;

namespace {

FixedHyper fixed(std::vector<double> ls, double sf2 = 1.0, double noise = 1e-6) { return FixedHyper{GpHyperParams{std::move(ls), sf2, noise}}; }

std::vector<double> pt(double x) { return {x}; }

} // namespace

TEST(Surrogate, SinglePointInterpolation)
{
    std::vector<std::vector<double>> X = {{0.5}};
    std::vector<double> y = {2.0};
    auto m = gp_fit(X, y, fixed({0.3}));
    EXPECT_NEAR(m.posterior(pt(0.5)).mean, 2.0, 1e-4);
    auto e = gp_fit(X, y, MaximizeEvidence{});
    EXPECT_NEAR(e.posterior(pt(0.5)).mean, 2.0, 1e-4);
}

TEST(Surrogate, ConstantTargets)
{
    std::vector<std::vector<double>> X = {{0.1}, {0.4}, {0.9}};
    std::vector<double> y = {3.0, 3.0, 3.0};
    auto m = gp_fit(X, y, MaximizeEvidence{});
    for (auto const& x : X) {
        EXPECT_NEAR(m.posterior(x).mean, 3.0, 1e-6);
    }
}

TEST(Surrogate, SinePointsInterpolatedLikeDenseOracle)
{
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    for (double x : {0.05, 0.3, 0.5, 0.72, 0.95}) {
        X.push_back({x});
        y.push_back(std::sin(6.0 * x));
    }
    auto m = gp_fit(X, y, MaximizeEvidence{.seed = 4});
    auto const& h = m.hyper();
    for (std::size_t i = 0; i < X.size(); ++i) {
        auto const p = m.posterior(X[i]);
        auto const o = oracle::gp_predict(X, y, h.length_scales, h.signal_variance, h.noise_variance, X[i]);
        EXPECT_NEAR(p.mean, o.mean, 1e-8);
        EXPECT_NEAR(p.mean, y[i], 1e-3);
        EXPECT_LE(p.sigma, 1e-2);
    }
}

TEST(Surrogate, TrainingPointHasSmallSigma)
{
    std::vector<std::vector<double>> X = {{0.2}, {0.6}};
    std::vector<double> y = {1.0, -1.0};
    auto m = gp_fit(X, y, fixed({0.2}, 1.0, 1e-10));
    auto const p = m.posterior(X[0]);
    EXPECT_NEAR(p.mean, 1.0, 1e-4);
    EXPECT_LE(p.sigma, 1e-3);
}

TEST(Surrogate, RevertsToPriorFarAway)
{
    std::vector<std::vector<double>> X = {{0.0, 0.0}, {0.1, 0.05}, {0.05, 0.1}};
    std::vector<double> y = {1.0, 4.0, 2.5};
    auto m = gp_fit(X, y, fixed({0.1, 0.1}, 2.0));
    std::vector<double> far = {5.0, 5.0}; // 50 length-scales away
    auto const p = m.posterior(far);
    EXPECT_NEAR(p.mean, m.target_mean(), 1e-3);
    EXPECT_NEAR(p.sigma, std::sqrt(2.0) * m.target_scale(), 1e-3);
}

TEST(Surrogate, ThreePointsMatchDenseSolve)
{
    std::vector<std::vector<double>> X = {{0.1, 0.8}, {0.5, 0.2}, {0.9, 0.6}};
    std::vector<double> y = {0.3, -1.2, 2.0};
    std::vector<double> ls = {0.4, 0.7};
    auto m = gp_fit(X, y, fixed(ls, 1.5, 1e-4));
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> x = {u(gen), u(gen)};
        auto const o = oracle::gp_predict(X, y, ls, 1.5, 1e-4, x);
        auto const p = m.posterior(x);
        EXPECT_NEAR(p.mean, o.mean, 1e-10);
        EXPECT_NEAR(p.sigma * p.sigma, std::max(o.variance, 0.0), 1e-10);
    }
}

TEST(Surrogate, DuplicateRowsAreFine)
{
    std::vector<std::vector<double>> X = {{0.3}, {0.3}, {0.7}};
    std::vector<double> y = {1.0, 1.0, 0.0};
    EXPECT_NO_THROW(gp_fit(X, y, MaximizeEvidence{}));
}

TEST(Surrogate, RejectsBadInput)
{
    std::vector<std::vector<double>> none;
    std::vector<double> ny;
    EXPECT_THROW(gp_fit(none, ny, MaximizeEvidence{}), ValidationError);
    std::vector<std::vector<double>> X = {{0.3}, {0.5}};
    std::vector<double> y = {1.0};
    EXPECT_THROW(gp_fit(X, y, MaximizeEvidence{}), ValidationError);
    std::vector<double> y2 = {1.0, NAN};
    EXPECT_THROW(gp_fit(X, y2, MaximizeEvidence{}), ValidationError);
    std::vector<double> y3 = {1.0, 2.0};
    EXPECT_THROW(gp_fit(X, y3, fixed({0.1, 0.1})), ValidationError);
    EXPECT_THROW(gp_fit(X, y3, fixed({0.1}, 1.0, 1e-12)), ValidationError);
    auto m = gp_fit(X, y3, fixed({0.1}));
    EXPECT_THROW(m.posterior(std::vector<double>{0.1, 0.2}), ValidationError);
}

TEST(Surrogate, EvidenceFitIsDeterministic)
{
    std::vector<std::vector<double>> X = {{0.1, 0.2}, {0.4, 0.9}, {0.8, 0.3}, {0.5, 0.5}};
    std::vector<double> y = {1.0, 0.2, -0.5, 0.7};
    auto a = gp_fit(X, y, MaximizeEvidence{.seed = 9});
    auto b = gp_fit(X, y, MaximizeEvidence{.seed = 9});
    EXPECT_EQ(a.hyper().length_scales, b.hyper().length_scales);
    EXPECT_EQ(a.hyper().signal_variance, b.hyper().signal_variance);
    for (double l : a.hyper().length_scales) {
        EXPECT_GE(l, 0.05 - 1e-12);
        EXPECT_LE(l, 2.0 + 1e-12);
    }
}

TEST(Surrogate, EvidenceBeatsArbitraryFixedHyper)
{
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    for (int i = 0; i < 8; ++i) {
        double const x = i / 7.0;
        X.push_back({x});
        y.push_back(std::sin(6.0 * x));
    }
    auto fitted = gp_fit(X, y, MaximizeEvidence{});
    auto arbitrary = gp_fit(X, y, fixed({1.9}, 0.11));
    EXPECT_GE(fitted.log_marginal_likelihood(), arbitrary.log_marginal_likelihood());
}

class SurrogateProperty : public ::testing::Test {
  protected:
    std::mt19937_64 gen{2024};
    std::uniform_real_distribution<double> u{0.0, 1.0};

    std::vector<std::vector<double>> points(std::size_t n, std::size_t d)
    {
        std::vector<std::vector<double>> X(n, std::vector<double>(d));
        for (auto& r : X) {
            for (auto& v : r) {
                v = u(gen);
            }
        }
        return X;
    }
};

TEST_F(SurrogateProperty, VarianceNonNegative)
{
    for (int t = 0; t < 30; ++t) {
        auto X = points(6, 2);
        std::vector<double> y;
        for (auto const& x : X) {
            y.push_back(x[0] * x[0] - x[1]);
        }
        auto m = gp_fit(X, y, MaximizeEvidence{.seed = static_cast<std::uint64_t>(t)});
        for (auto const& x : points(40, 2)) {
            ASSERT_GE(m.raw_variance(x), -1e-8);
            ASSERT_GE(m.posterior(x).sigma, 0.0);
        }
        for (auto const& x : X) {
            ASSERT_GE(m.raw_variance(x), -1e-8);
        }
    }
}

// With fixed hyperparameters and targets that keep the same standardization
// scale, conditioning on an extra point cannot raise the latent variance.
TEST_F(SurrogateProperty, AddingPointNeverIncreasesVariance)
{
    for (int t = 0; t < 30; ++t) {
        auto X = points(5, 2);
        std::vector<double> y(5, 0.0);
        y[0] = 1.0;
        auto small = gp_fit(X, y, fixed({0.3, 0.5}));
        auto X2 = X;
        X2.push_back(points(1, 2)[0]);
        auto y2 = y;
        y2.push_back(0.0);
        auto big = gp_fit(X2, y2, fixed({0.3, 0.5}));
        for (auto const& x : points(30, 2)) {
            // compare in standardized units
            double const vs = small.raw_variance(x) / (small.target_scale() * small.target_scale());
            double const vb = big.raw_variance(x) / (big.target_scale() * big.target_scale());
            ASSERT_LE(vb, vs + 1e-8);
        }
    }
}

TEST_F(SurrogateProperty, PermutationInvariant)
{
    for (int t = 0; t < 20; ++t) {
        auto X = points(7, 3);
        std::vector<double> y;
        for (auto const& x : X) {
            y.push_back(std::cos(3 * x[0]) + x[1] * x[2]);
        }
        std::vector<std::size_t> perm(X.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), gen);
        std::vector<std::vector<double>> Xp;
        std::vector<double> yp;
        for (auto i : perm) {
            Xp.push_back(X[i]);
            yp.push_back(y[i]);
        }
        auto a = gp_fit(X, y, fixed({0.5, 0.4, 0.8}));
        auto b = gp_fit(Xp, yp, fixed({0.5, 0.4, 0.8}));
        for (auto const& x : points(20, 3)) {
            ASSERT_NEAR(a.posterior(x).mean, b.posterior(x).mean, 1e-10);
            ASSERT_NEAR(a.posterior(x).sigma, b.posterior(x).sigma, 1e-10);
        }
    }
}
