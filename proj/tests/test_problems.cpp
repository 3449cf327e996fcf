#include <gtest/gtest.h>

#include <cmath>

#include "moboga/problems.hpp"

using namespace moboga;
using V = std::vector<double>;

TEST(Problems, BinhKornFormulas)
{
    EXPECT_EQ(binh_korn(0, 0), (V{0, 50}));
    EXPECT_EQ(binh_korn(5, 3), (V{136, 4}));
    auto const b = make_binh_korn();
    EXPECT_EQ(constraint_indicator(b.problem.constraints[1], {{8.0, -3.0}}), 0);
}

TEST(Problems, ConstrExFormulas)
{
    EXPECT_EQ(constr_ex(1, 1), (V{1, 2}));
    EXPECT_EQ(constr_ex(0.5, 3), (V{0.5, 8}));
    auto const b = make_constr_ex();
    EXPECT_EQ(constraint_indicator(b.problem.constraints[0], {{0.5, 3.0}}), 1);
}

TEST(Problems, SinusoidFormula)
{
    EXPECT_NEAR(sinusoid_1d(0.0), 1.85, 1e-12);
    EXPECT_NEAR(sinusoid_1d(0.5), 0.6, 1e-12);
    EXPECT_NEAR(sinusoid_1d(1.0), 1.85, 1e-12);
}

TEST(Problems, SinusoidConstraints)
{
    auto const b = make_sinusoid_1d();
    auto const& cs = b.problem.constraints;
    EXPECT_TRUE(hard_satisfied(cs, {{0.1}}));
    EXPECT_FALSE(hard_satisfied(cs, {{0.2}}));
    EXPECT_FALSE(hard_satisfied(cs, {{0.6}}));
    EXPECT_TRUE(hard_satisfied(cs, {{0.61}}));
    EXPECT_FALSE(all_satisfied(cs, {{0.61}}));
    // 1/(0.3)^4 > 1, so the penalty sits at its cap
    EXPECT_EQ(constraint_factor(cs, {{0.9}}), 1.0 - 1e-9);
    EXPECT_EQ(sinusoid_soft_beta(1.2), 1.0 - 1e-9);
    EXPECT_DOUBLE_EQ(sinusoid_soft_beta(2.6), 1.0 / 16.0);
}

TEST(Problems, NamesAndLookup)
{
    EXPECT_EQ(builtin_problem_names(), (std::vector<std::string>{"binh-korn", "constr-ex", "sinusoid-1d"}));
    for (auto const& n : builtin_problem_names()) {
        EXPECT_EQ(builtin_problem(n).name, n);
        EXPECT_NO_THROW(validate_problem(builtin_problem(n).problem));
    }
    EXPECT_THROW(builtin_problem("zdt1"), ConfigError);
}

TEST(Problems, BinhKornReferenceFront)
{
    auto const b = make_binh_korn();
    auto const front = grid_reference_front(b.problem, 400);
    ASSERT_GT(front.size(), 100u);
    EXPECT_EQ(front.front(), (V{0, 50}));
    EXPECT_EQ(front.back(), (V{136, 4}));
    // mirrored grid points (x,y), (y,x) share objectives, so equal neighbours occur
    for (std::size_t i = 1; i < front.size(); ++i) {
        ASSERT_LE(front[i - 1][0], front[i][0]);
        ASSERT_GE(front[i - 1][1], front[i][1]);
    }
}

TEST(Problems, ConstrExReferenceFrontIsFeasible)
{
    auto const b = make_constr_ex();
    auto const front = grid_reference_front(b.problem, 400);
    ASSERT_FALSE(front.empty());
    EXPECT_GT(front.front()[0], 0.38);
    EXPECT_LT(front.front()[0], 0.40);
    EXPECT_DOUBLE_EQ(front.back()[0], 1.0);
    // invert q1 = x, q2 = (1+y)/x and audit the constraints by substitution
    for (auto const& q : front) {
        double const x = q[0], y = q[1] * x - 1.0;
        ASSERT_GE(y + 9 * x, 6 - 1e-9);
        ASSERT_GE(-y + 9 * x, 1 - 1e-9);
    }
}

TEST(Problems, SinglePointGrid)
{
    Problem p;
    p.space = SearchSpace({ParamSpec::continuous("a", 0, 2), ParamSpec::continuous("b", 0, 4)});
    p.objectives = {"q1", "q2"};
    p.evaluator = [](Candidate const& c) { return V{c.real(0), c.real(1)}; };
    auto const f = grid_reference_front(p, 1);
    EXPECT_EQ(f, (std::vector<V>{{1, 2}}));
    EXPECT_THROW(grid_reference_front(p, 0), ConfigError);
}

TEST(Problems, EmptyFeasibleGridIsConfigError)
{
    auto b = make_binh_korn();
    b.problem.constraints.push_back({"never", [](Candidate const&) { return false; }, Hard{}, {}});
    EXPECT_THROW(grid_reference_front(b.problem, 10), ConfigError);
}

TEST(ProblemsProperty, GridFrontsFeasibleAndRefinementNeverWorse)
{
    for (auto make : {make_binh_korn, make_constr_ex}) {
        auto const b = make();
        for (std::size_t r : {25, 50, 100}) {
            auto const coarse = grid_reference_front(b.problem, r);
            auto const fine = grid_reference_front(b.problem, 2 * r - 1); // nests the coarse grid
            for (auto const& f : fine) {
                for (auto const& c : coarse) {
                    ASSERT_FALSE(dominates(c, f));
                }
            }
        }
    }
}

TEST(Problems, DeathPenalty)
{
    auto const b = make_binh_korn();
    auto const worst = feasible_worst(b.problem, 50);
    auto fn = penalized_objectives(b.problem, worst);
    auto const enc = b.problem.space.encode({{1.0, 1.0}});
    EXPECT_EQ(fn(enc), binh_korn(1, 1));
    // (0,3) lies outside the c1 disc: 25 + 9 - 25 = 9
    auto const bad = b.problem.space.encode({{0.0, 3.0}});
    auto const q = fn(bad);
    EXPECT_DOUBLE_EQ(q[0], worst[0] + 9.0);
    EXPECT_DOUBLE_EQ(q[1], worst[1] + 9.0);
}
