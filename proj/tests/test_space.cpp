#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "moboga/space.hpp"

using namespace moboga;

namespace {

SearchSpace mixed()
{
    return SearchSpace({ParamSpec::continuous("lr", 0.0, 10.0), ParamSpec::discrete("batch", {32, 64, 128}),
                        ParamSpec::categorical("act", {"ReLU", "Tanh"})});
}

} // namespace

TEST(Space, EncodedDimCountsOneHotWidth)
{
    auto s = SearchSpace({ParamSpec::continuous("a", 0, 1), ParamSpec::discrete("b", {1, 2}),
                          ParamSpec::categorical("c", {"x", "y", "z"}), ParamSpec::categorical("d", {"p"})});
    EXPECT_EQ(s.encoded_dim(), 1u + 1u + 3u + 1u);
}

TEST(Space, RejectsBadSpecs)
{
    EXPECT_THROW(SearchSpace({ParamSpec::continuous("a", 1, 1)}), ValidationError);
    EXPECT_THROW(SearchSpace({ParamSpec::continuous("a", 0, INFINITY)}), ValidationError);
    EXPECT_THROW(SearchSpace({ParamSpec::discrete("a", {})}), ValidationError);
    EXPECT_THROW(SearchSpace({ParamSpec::discrete("a", {2, 1})}), ValidationError);
    EXPECT_THROW(SearchSpace({ParamSpec::discrete("a", {1, 1})}), ValidationError);
    EXPECT_THROW(SearchSpace({ParamSpec::categorical("a", {})}), ValidationError);
    EXPECT_THROW(SearchSpace({ParamSpec::categorical("a", {"u", "u"})}), ValidationError);
    EXPECT_THROW(SearchSpace({ParamSpec::continuous("a", 0, 1), ParamSpec::continuous("a", 0, 1)}), ValidationError);
}

TEST(Space, EncodeExamples)
{
    EXPECT_EQ(SearchSpace({ParamSpec::continuous("v", 0, 10)}).encode({{5.0}}), std::vector<double>{0.5});
    EXPECT_EQ(SearchSpace({ParamSpec::discrete("v", {32, 64, 128})}).encode({{64.0}}), std::vector<double>{0.5});
    EXPECT_EQ(SearchSpace({ParamSpec::categorical("v", {"ReLU", "Tanh"})}).encode({{std::string("Tanh")}}),
              (std::vector<double>{0.0, 1.0}));
    EXPECT_EQ(SearchSpace({ParamSpec::discrete("v", {7})}).encode({{7.0}}), std::vector<double>{0.0});
}

TEST(Space, DecodeExamples)
{
    EXPECT_DOUBLE_EQ(SearchSpace({ParamSpec::continuous("v", 0, 10)}).decode(std::vector<double>{0.5}).real(0), 5.0);
    EXPECT_DOUBLE_EQ(SearchSpace({ParamSpec::discrete("v", {32, 64, 128})}).decode(std::vector<double>{0.6}).real(0), 64.0);
    EXPECT_EQ(SearchSpace({ParamSpec::categorical("v", {"ReLU", "Tanh"})}).decode(std::vector<double>{0.7, 0.3}).label(0), "ReLU");
}

TEST(Space, DecodeTiesAndClamping)
{
    auto d = SearchSpace({ParamSpec::discrete("v", {1, 2, 3})});
    EXPECT_DOUBLE_EQ(d.decode(std::vector<double>{0.25}).real(0), 1.0); // halfway between ranks 0 and 1
    EXPECT_DOUBLE_EQ(d.decode(std::vector<double>{0.75}).real(0), 2.0);
    EXPECT_DOUBLE_EQ(d.decode(std::vector<double>{-3.0}).real(0), 1.0);
    EXPECT_DOUBLE_EQ(d.decode(std::vector<double>{7.0}).real(0), 3.0);
    auto c = SearchSpace({ParamSpec::categorical("v", {"a", "b", "c"})});
    EXPECT_EQ(c.decode(std::vector<double>{0.4, 0.4, 0.1}).label(0), "a");
    EXPECT_EQ(c.decode(std::vector<double>{0.1, 0.4, 0.4}).label(0), "b");
    auto r = SearchSpace({ParamSpec::continuous("v", -1, 1)});
    EXPECT_DOUBLE_EQ(r.decode(std::vector<double>{1.5}).real(0), 1.0);
}

TEST(Space, DecodeRejectsWrongLengthOrNonFinite)
{
    auto s = mixed();
    EXPECT_THROW(s.decode(std::vector<double>{0.1, 0.2}), ValidationError);
    EXPECT_THROW(s.decode(std::vector<double>{NAN, 0, 1, 0}), ValidationError);
}

TEST(Space, ValidationNamesTheParameter)
{
    auto s = mixed();
    try {
        s.encode({{5.0, 48.0, std::string("ReLU")}});
        FAIL() << "expected a validation error";
    } catch (ValidationError const& e) {
        EXPECT_NE(std::string(e.what()).find("batch"), std::string::npos);
    }
    try {
        s.encode({{11.0, 64.0, std::string("ReLU")}});
        FAIL();
    } catch (ValidationError const& e) {
        EXPECT_NE(std::string(e.what()).find("lr"), std::string::npos);
    }
    try {
        s.encode({{1.0, 64.0, std::string("GELU")}});
        FAIL();
    } catch (ValidationError const& e) {
        EXPECT_NE(std::string(e.what()).find("act"), std::string::npos);
    }
    EXPECT_THROW(s.encode({{1.0, 64.0}}), ValidationError);
    EXPECT_FALSE(s.contains({{1.0, std::string("64"), std::string("ReLU")}}));
}

TEST(Space, DistanceExamples)
{
    auto c = SearchSpace({ParamSpec::continuous("v", 0, 10)});
    EXPECT_DOUBLE_EQ(c.distance({{0.0}}, {{10.0}}), 1.0);
    EXPECT_DOUBLE_EQ(c.distance({{3.0}}, {{3.0}}), 0.0);
    auto k = SearchSpace({ParamSpec::categorical("v", {"A", "B"})});
    EXPECT_DOUBLE_EQ(k.distance({{std::string("A")}}, {{std::string("B")}}), std::sqrt(2.0));
}

TEST(Space, SampleSingletonCategorical)
{
    auto s = SearchSpace({ParamSpec::categorical("v", {"only"})});
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(s.sample_uniform(rng).label(0), "only");
    }
}

TEST(Space, SampleContinuousMean)
{
    auto s = SearchSpace({ParamSpec::continuous("v", 0, 1)});
    Rng rng(11);
    double sum = 0.0;
    int const n = 100000;
    for (int i = 0; i < n; ++i) {
        sum += s.sample_uniform(rng).real(0);
    }
    EXPECT_NEAR(sum / n, 0.5, 0.01);
}

TEST(Space, SampleDiscreteFrequencies)
{
    auto s = SearchSpace({ParamSpec::discrete("v", {1, 2})});
    Rng rng(12);
    int ones = 0;
    int const n = 10000;
    for (int i = 0; i < n; ++i) {
        ones += s.sample_uniform(rng).real(0) == 1.0 ? 1 : 0;
    }
    EXPECT_NEAR(static_cast<double>(ones) / n, 0.5, 0.03);
}

TEST(Space, SamplingIsSeedDeterministic)
{
    auto s = mixed();
    Rng a(99), b(99);
    for (int i = 0; i < 50; ++i) {
        EXPECT_EQ(s.sample_uniform(a), s.sample_uniform(b));
    }
}

// decode(encode(c)) reproduces c; encodings stay in the unit box; encode is a
// fixed point of encode . decode.
TEST(SpaceProperty, RoundTripAndBounds)
{
    auto s = SearchSpace({ParamSpec::continuous("a", -3.5, 1e3), ParamSpec::discrete("b", {1, 10, 100, 1000}),
                          ParamSpec::categorical("c", {"x", "y", "z"}), ParamSpec::continuous("d", 1e-6, 2e-6)});
    Rng rng(5);
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> u(-0.5, 1.5);
    for (int t = 0; t < 2000; ++t) {
        auto const c = s.sample_uniform(rng);
        auto const e = s.encode(c);
        for (double v : e) {
            ASSERT_GE(v, 0.0);
            ASSERT_LE(v, 1.0);
        }
        auto const back = s.decode(e);
        ASSERT_EQ(back.real(1), c.real(1));
        ASSERT_EQ(back.label(2), c.label(2));
        ASSERT_NEAR(back.real(0), c.real(0), 1e-12 * std::max(1.0, std::abs(c.real(0))));
        ASSERT_NEAR(back.real(3), c.real(3), 1e-12 * std::abs(c.real(3)));

        std::vector<double> raw(s.encoded_dim());
        for (double& v : raw) {
            v = u(gen);
        }
        auto const e1 = s.encode(s.decode(raw));
        auto const e2 = s.encode(s.decode(e1));
        for (std::size_t i = 0; i < e1.size(); ++i) {
            ASSERT_NEAR(e1[i], e2[i], 1e-15);
        }
    }
}

TEST(SpaceProperty, DistanceIsAMetric)
{
    auto s = mixed();
    Rng rng(8);
    for (int t = 0; t < 2000; ++t) {
        auto a = s.sample_uniform(rng), b = s.sample_uniform(rng), c = s.sample_uniform(rng);
        double const ab = s.distance(a, b), bc = s.distance(b, c), ac = s.distance(a, c);
        ASSERT_GE(ab, 0.0);
        ASSERT_DOUBLE_EQ(ab, s.distance(b, a));
        ASSERT_LE(ac, ab + bc + 1e-12);
        ASSERT_EQ(s.distance(a, a), 0.0);
        ASSERT_EQ(ab == 0.0, s.encode(a) == s.encode(b));
    }
}
