#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "moboga/errors.hpp"
#include "moboga/objectives.hpp"
#include "moboga/space.hpp"
#include "moboga/surrogate.hpp"

namespace moboga {

inline double normal_pdf(double z)
{
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double z)
{
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

// Closed form of E[max(y_best - Y, 0)] for Y ~ N(mu, sigma^2).
inline double expected_improvement(double mu, double sigma, double y_best)
{
    double const gap = y_best - mu;
    if (!(sigma > 0.0)) {
        return std::max(gap, 0.0);
    }
    double const z = gap / sigma;
    return std::max(gap * normal_cdf(z) + sigma * normal_pdf(z), 0.0);
}

struct AcquisitionContext {
    GpModel const& model;
    double y_best;
    std::span<ConstraintSpec const> constraints;
    SearchSpace const& space;
};

// Constraint-aware expected improvement: plain EI times the product of the
// per-constraint factors (0 for a violated hard constraint, beta for a soft one).
inline double ca_ei(AcquisitionContext const& ctx, Candidate const& x)
{
    double const factor = constraint_factor(ctx.constraints, x);
    if (factor == 0.0) {
        return 0.0;
    }
    auto const enc = ctx.space.encode(x);
    auto const [mu, sigma] = ctx.model.posterior(enc);
    return expected_improvement(mu, sigma, ctx.y_best) * factor;
}

// Incumbent y+: the best feasible target when one exists, otherwise the best overall.
inline double incumbent(std::span<double const> targets, std::vector<bool> const& feasible)
{
    if (targets.empty() || targets.size() != feasible.size()) {
        throw ValidationError("incumbent needs one feasibility flag per target");
    }
    double best_feasible = std::numeric_limits<double>::infinity();
    double best_any = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < targets.size(); ++i) {
        best_any = std::min(best_any, targets[i]);
        if (feasible[i]) {
            best_feasible = std::min(best_feasible, targets[i]);
        }
    }
    return std::isfinite(best_feasible) ? best_feasible : best_any;
}

} // namespace moboga
