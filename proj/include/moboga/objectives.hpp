#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "moboga/errors.hpp"
#include "moboga/space.hpp"

namespace moboga {

// Measured quantities q_1..q_K of one candidate; every entry is minimized.
using ObjectiveVector = std::vector<double>;

using Evaluator = std::function<ObjectiveVector(Candidate const&)>;
using Predicate = std::function<bool(Candidate const&)>;
using Penalty = std::function<double(Candidate const&)>;

struct Hard {};

// Violating candidates keep a fraction beta(x) in [0,1) of their acquisition.
struct Soft {
    Penalty beta;
};

using ConstraintMode = std::variant<Hard, Soft>;

struct ConstraintSpec {
    std::string name;
    Predicate predicate;
    ConstraintMode mode = Hard{};
    // Optional non-negative magnitude of violation; used to rank infeasible
    // points. When absent a violated constraint counts as 1.
    Penalty violation = {};

    bool is_hard() const { return std::holds_alternative<Hard>(mode); }
};

inline Soft constant_beta(double beta)
{
    return Soft{[beta](Candidate const&) { return beta; }};
}

// Returns 1 when the constraint holds at x, else 0.
inline int constraint_indicator(ConstraintSpec const& c, Candidate const& x)
{
    try {
        return c.predicate(x) ? 1 : 0;
    } catch (std::exception const& e) {
        throw EvaluationError("constraint '" + c.name + "' failed: " + e.what());
    }
}

// 1 if satisfied; otherwise 0 for a hard constraint and beta(x) for a soft one.
inline double soft_factor(ConstraintSpec const& c, Candidate const& x)
{
    if (constraint_indicator(c, x) == 1) {
        return 1.0;
    }
    auto const* soft = std::get_if<Soft>(&c.mode);
    if (!soft) {
        return 0.0;
    }
    double beta;
    try {
        beta = soft->beta(x);
    } catch (std::exception const& e) {
        throw EvaluationError("penalty of constraint '" + c.name + "' failed: " + e.what());
    }
    if (!(beta >= 0.0 && beta < 1.0)) {
        throw EvaluationError("penalty of constraint '" + c.name + "' returned " + std::to_string(beta)
                              + ", outside [0, 1)");
    }
    return beta;
}

inline double constraint_factor(std::span<ConstraintSpec const> cs, Candidate const& x)
{
    double f = 1.0;
    for (auto const& c : cs) {
        f *= soft_factor(c, x);
        if (f == 0.0) {
            break;
        }
    }
    return f;
}

inline bool all_satisfied(std::span<ConstraintSpec const> cs, Candidate const& x)
{
    for (auto const& c : cs) {
        if (constraint_indicator(c, x) == 0) {
            return false;
        }
    }
    return true;
}

inline bool hard_satisfied(std::span<ConstraintSpec const> cs, Candidate const& x)
{
    for (auto const& c : cs) {
        if (c.is_hard() && constraint_indicator(c, x) == 0) {
            return false;
        }
    }
    return true;
}

// Sum of violation magnitudes over the hard constraints.
inline double hard_violation(std::span<ConstraintSpec const> cs, Candidate const& x)
{
    double total = 0.0;
    for (auto const& c : cs) {
        if (!c.is_hard() || constraint_indicator(c, x) == 1) {
            continue;
        }
        total += c.violation ? std::max(0.0, c.violation(x)) : 1.0;
    }
    return total;
}

// Problem definition: minimize every objective over the space subject to the constraints.
struct Problem {
    SearchSpace space;
    std::vector<std::string> objectives;
    Evaluator evaluator;
    std::vector<ConstraintSpec> constraints;

    std::size_t num_objectives() const { return objectives.size(); }
};

inline void validate_problem(Problem const& p)
{
    if (p.objectives.empty()) {
        throw ConfigError("problem needs at least one objective");
    }
    for (std::size_t i = 0; i < p.objectives.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (p.objectives[i] == p.objectives[j]) {
                throw ConfigError("duplicate objective name '" + p.objectives[i] + "'");
            }
        }
    }
    if (!p.evaluator) {
        throw ConfigError("problem has no evaluator");
    }
    if (p.space.size() == 0) {
        throw ConfigError("search space is empty");
    }
    for (auto const& c : p.constraints) {
        if (!c.predicate) {
            throw ConfigError("constraint '" + c.name + "' has no predicate");
        }
        if (auto const* s = std::get_if<Soft>(&c.mode); s && !s->beta) {
            throw ConfigError("soft constraint '" + c.name + "' has no penalty function");
        }
    }
}

} // namespace moboga
