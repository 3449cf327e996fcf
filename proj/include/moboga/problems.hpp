#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "moboga/errors.hpp"
#include "moboga/objectives.hpp"
#include "moboga/pareto.hpp"
#include "moboga/space.hpp"

namespace moboga {

struct BenchmarkProblem {
    std::string name;
    Problem problem;
};

inline ObjectiveVector binh_korn(double x, double y)
{
    return {4.0 * x * x + 4.0 * y * y, (x - 5.0) * (x - 5.0) + (y - 5.0) * (y - 5.0)};
}

inline ObjectiveVector constr_ex(double x, double y)
{
    return {x, (1.0 + y) / x};
}

inline double sinusoid_1d(double x)
{
    return 1.1 + (x - 0.5) * (x - 0.5) + 0.5 * std::sin(6.0 * std::numbers::pi * x + std::numbers::pi / 2.0);
}

// Penalty of the soft region x > 0.6 of the 1-D demo. The raw form 1/(x-0.6)^4
// exceeds one on most of the domain, so it is capped just below one.
inline double sinusoid_soft_beta(double x)
{
    double const d = x - 0.6;
    double const raw = d == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / (d * d * d * d);
    return std::min(raw, 1.0 - 1e-9);
}

inline BenchmarkProblem make_binh_korn()
{
    BenchmarkProblem b;
    b.name = "binh-korn";
    b.problem.space = SearchSpace({ParamSpec::continuous("x", 0.0, 5.0), ParamSpec::continuous("y", 0.0, 3.0)});
    b.problem.objectives = {"q1", "q2"};
    b.problem.evaluator = [](Candidate const& c) { return binh_korn(c.real(0), c.real(1)); };
    auto c1 = [](Candidate const& c) { return (c.real(0) - 5.0) * (c.real(0) - 5.0) + c.real(1) * c.real(1) - 25.0; };
    auto c2 = [](Candidate const& c) { return 7.7 - ((c.real(0) - 8.0) * (c.real(0) - 8.0) + (c.real(1) + 3.0) * (c.real(1) + 3.0)); };
    b.problem.constraints = {
        ConstraintSpec{"c1", [c1](Candidate const& c) { return c1(c) <= 0.0; }, Hard{}, [c1](Candidate const& c) { return std::max(0.0, c1(c)); }},
        ConstraintSpec{"c2", [c2](Candidate const& c) { return c2(c) <= 0.0; }, Hard{}, [c2](Candidate const& c) { return std::max(0.0, c2(c)); }},
    };
    return b;
}

inline BenchmarkProblem make_constr_ex()
{
    BenchmarkProblem b;
    b.name = "constr-ex";
    b.problem.space = SearchSpace({ParamSpec::continuous("x", 0.1, 1.0), ParamSpec::continuous("y", 0.0, 5.0)});
    b.problem.objectives = {"q1", "q2"};
    b.problem.evaluator = [](Candidate const& c) { return constr_ex(c.real(0), c.real(1)); };
    auto c1 = [](Candidate const& c) { return 6.0 - (c.real(1) + 9.0 * c.real(0)); };
    auto c2 = [](Candidate const& c) { return 1.0 - (-c.real(1) + 9.0 * c.real(0)); };
    b.problem.constraints = {
        ConstraintSpec{"c1", [c1](Candidate const& c) { return c1(c) <= 0.0; }, Hard{}, [c1](Candidate const& c) { return std::max(0.0, c1(c)); }},
        ConstraintSpec{"c2", [c2](Candidate const& c) { return c2(c) <= 0.0; }, Hard{}, [c2](Candidate const& c) { return std::max(0.0, c2(c)); }},
    };
    return b;
}

// 1-D sinusoid with a hard band [0.2, 0.6] and a soft region x > 0.6.
inline BenchmarkProblem make_sinusoid_1d()
{
    BenchmarkProblem b;
    b.name = "sinusoid-1d";
    b.problem.space = SearchSpace({ParamSpec::continuous("x", 0.0, 1.2)});
    b.problem.objectives = {"q"};
    b.problem.evaluator = [](Candidate const& c) { return ObjectiveVector{sinusoid_1d(c.real(0))}; };
    b.problem.constraints = {
        ConstraintSpec{"hard-band", [](Candidate const& c) { return c.real(0) < 0.2 || c.real(0) > 0.6; }, Hard{},
                       [](Candidate const& c) {
                           double const x = c.real(0);
                           return (x >= 0.2 && x <= 0.6) ? std::min(x - 0.2, 0.6 - x) + 1e-3 : 0.0;
                       }},
        ConstraintSpec{"soft-region", [](Candidate const& c) { return c.real(0) <= 0.6; },
                       Soft{[](Candidate const& c) { return sinusoid_soft_beta(c.real(0)); }}, {}},
    };
    return b;
}

inline std::vector<std::string> builtin_problem_names()
{
    return {"binh-korn", "constr-ex", "sinusoid-1d"};
}

inline BenchmarkProblem builtin_problem(std::string const& name)
{
    if (name == "binh-korn") {
        return make_binh_korn();
    }
    if (name == "constr-ex") {
        return make_constr_ex();
    }
    if (name == "sinusoid-1d") {
        return make_sinusoid_1d();
    }
    throw ConfigError("unknown problem '" + name + "'");
}

// Pareto front of the feasible points of a regular grid with `resolution`
// points per axis (the midpoint when resolution is 1). Continuous spaces only.
inline std::vector<ObjectiveVector> grid_reference_front(Problem const& problem, std::size_t resolution)
{
    if (resolution == 0) {
        throw ConfigError("grid resolution must be positive");
    }
    auto const& params = problem.space.params();
    std::vector<Continuous> axes;
    for (auto const& p : params) {
        auto const* c = std::get_if<Continuous>(&p.kind);
        if (!c) {
            throw ConfigError("grid reference front needs an all-continuous space");
        }
        axes.push_back(*c);
    }
    auto coord = [&](std::size_t axis, std::size_t i) {
        auto const& a = axes[axis];
        if (resolution == 1) {
            return 0.5 * (a.lo + a.hi);
        }
        return a.lo + (a.hi - a.lo) * static_cast<double>(i) / static_cast<double>(resolution - 1);
    };

    std::vector<ObjectiveVector> feasible;
    std::vector<std::size_t> idx(axes.size(), 0);
    Candidate c;
    c.values.resize(axes.size());
    while (true) {
        for (std::size_t a = 0; a < axes.size(); ++a) {
            c.values[a] = coord(a, idx[a]);
        }
        if (all_satisfied(problem.constraints, c)) {
            auto q = problem.evaluator(c);
            if (std::all_of(q.begin(), q.end(), [](double v) { return std::isfinite(v); })) {
                feasible.push_back(std::move(q));
            }
        }
        std::size_t a = 0;
        while (a < axes.size() && ++idx[a] == resolution) {
            idx[a] = 0;
            ++a;
        }
        if (a == axes.size()) {
            break;
        }
    }
    if (feasible.empty()) {
        throw ConfigError("grid reference front: no feasible grid point");
    }
    std::vector<ObjectiveVector> front;
    for (auto id : pareto_front(feasible)) {
        front.push_back(feasible[id]);
    }
    std::sort(front.begin(), front.end());
    return front;
}

// Largest value of each objective over the feasible grid points.
inline std::vector<double> feasible_worst(Problem const& problem, std::size_t resolution)
{
    auto const& params = problem.space.params();
    std::vector<Continuous> axes;
    for (auto const& p : params) {
        auto const* c = std::get_if<Continuous>(&p.kind);
        if (!c) {
            throw ConfigError("feasible_worst needs an all-continuous space");
        }
        axes.push_back(*c);
    }
    std::vector<double> worst(problem.num_objectives(), -std::numeric_limits<double>::infinity());
    std::vector<std::size_t> idx(axes.size(), 0);
    Candidate c;
    c.values.resize(axes.size());
    bool any = false;
    while (true) {
        for (std::size_t a = 0; a < axes.size(); ++a) {
            double const t = resolution == 1 ? 0.5 : static_cast<double>(idx[a]) / static_cast<double>(resolution - 1);
            c.values[a] = axes[a].lo + (axes[a].hi - axes[a].lo) * t;
        }
        if (all_satisfied(problem.constraints, c)) {
            auto const q = problem.evaluator(c);
            for (std::size_t j = 0; j < q.size(); ++j) {
                worst[j] = std::max(worst[j], q[j]);
            }
            any = true;
        }
        std::size_t a = 0;
        while (a < axes.size() && ++idx[a] == resolution) {
            idx[a] = 0;
            ++a;
        }
        if (a == axes.size()) {
            break;
        }
    }
    if (!any) {
        throw ConfigError("feasible_worst: no feasible grid point");
    }
    return worst;
}

// Genome scoring for running NSGA-II directly on a problem: feasible genomes
// get their objectives, infeasible ones the death penalty worst + violation.
inline std::function<std::vector<double>(std::span<double const>)> penalized_objectives(Problem const& problem, std::vector<double> worst)
{
    return [&problem, worst = std::move(worst)](std::span<double const> genome) {
        auto const c = problem.space.decode(genome);
        if (all_satisfied(problem.constraints, c)) {
            return problem.evaluator(c);
        }
        double violation = 0.0;
        for (auto const& con : problem.constraints) {
            if (constraint_indicator(con, c) == 0) {
                violation += con.violation ? std::max(0.0, con.violation(c)) : 1.0;
            }
        }
        std::vector<double> q = worst;
        for (double& v : q) {
            v += violation;
        }
        return q;
    };
}

} // namespace moboga
