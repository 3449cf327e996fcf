#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "moboga/errors.hpp"

namespace moboga {

enum class Direction { Cost, Benefit };

// m alternatives (rows) scored on n criteria (columns).
struct DecisionMatrix {
    std::vector<std::vector<double>> x;
    std::vector<double> weights;
    std::vector<Direction> directions;

    // Validates shape and normalizes the weights to sum to one. Empty weights mean uniform.
    static DecisionMatrix make(std::vector<std::vector<double>> x, std::vector<double> weights, std::vector<Direction> directions)
    {
        if (x.empty()) {
            throw ValidationError("decision matrix needs at least one alternative");
        }
        auto const n = x.front().size();
        if (n == 0) {
            throw ValidationError("decision matrix needs at least one criterion");
        }
        for (auto const& row : x) {
            if (row.size() != n) {
                throw ValidationError("decision matrix rows differ in length");
            }
            for (double v : row) {
                if (!std::isfinite(v)) {
                    throw ValidationError("decision matrix entries must be finite");
                }
            }
        }
        if (directions.size() != n) {
            throw ValidationError("need one direction per criterion");
        }
        if (weights.empty()) {
            weights.assign(n, 1.0);
        }
        if (weights.size() != n) {
            throw ValidationError("need one weight per criterion");
        }
        double total = 0.0;
        for (double w : weights) {
            if (!(std::isfinite(w) && w > 0.0)) {
                throw ValidationError("criterion weights must be finite and positive");
            }
            total += w;
        }
        for (double& w : weights) {
            w /= total;
        }
        return DecisionMatrix{std::move(x), std::move(weights), std::move(directions)};
    }
};

struct TopsisResult {
    std::vector<double> closeness;     // relative closeness to the ideal, in [0,1]
    std::vector<std::size_t> ranking;  // best first
    bool degenerate = false;           // every alternative identical
};

inline TopsisResult topsis_rank(DecisionMatrix const& dm)
{
    auto const m = dm.x.size();
    auto const n = dm.weights.size();

    // vector normalization and weighting
    std::vector<std::vector<double>> v(m, std::vector<double>(n));
    for (std::size_t j = 0; j < n; ++j) {
        // scaled by the largest magnitude so tiny entries (EI ~ 1e-200) don't underflow when squared
        double scale = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            scale = std::max(scale, std::abs(dm.x[i][j]));
        }
        if (scale == 0.0) {
            throw ValidationError("criterion " + std::to_string(j) + " is all zero and cannot be normalized");
        }
        double ss = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            ss += (dm.x[i][j] / scale) * (dm.x[i][j] / scale);
        }
        double const norm = scale * std::sqrt(ss);
        for (std::size_t i = 0; i < m; ++i) {
            v[i][j] = dm.weights[j] * dm.x[i][j] / norm;
        }
    }

    std::vector<double> best(n), worst(n);
    for (std::size_t j = 0; j < n; ++j) {
        double lo = v[0][j], hi = v[0][j];
        for (std::size_t i = 1; i < m; ++i) {
            lo = std::min(lo, v[i][j]);
            hi = std::max(hi, v[i][j]);
        }
        bool const cost = dm.directions[j] == Direction::Cost;
        best[j] = cost ? lo : hi;
        worst[j] = cost ? hi : lo;
    }

    TopsisResult r;
    r.closeness.resize(m);
    bool all_degenerate = true;
    for (std::size_t i = 0; i < m; ++i) {
        double db = 0.0, dw = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            db += (v[i][j] - best[j]) * (v[i][j] - best[j]);
            dw += (v[i][j] - worst[j]) * (v[i][j] - worst[j]);
        }
        db = std::sqrt(db);
        dw = std::sqrt(dw);
        if (db + dw == 0.0) {
            r.closeness[i] = 0.5;
        } else {
            r.closeness[i] = dw / (db + dw);
            all_degenerate = false;
        }
    }
    r.degenerate = all_degenerate;

    r.ranking.resize(m);
    std::iota(r.ranking.begin(), r.ranking.end(), std::size_t{0});
    std::stable_sort(r.ranking.begin(), r.ranking.end(), [&](std::size_t a, std::size_t b) { return r.closeness[a] > r.closeness[b]; });
    return r;
}

// Equal-weight TOPSIS pick over a list of score vectors.
inline std::size_t topsis_pick_best(std::span<std::vector<double> const> points, std::vector<Direction> const& directions,
                                    std::vector<double> const& weights = {})
{
    if (points.empty()) {
        throw ValidationError("topsis_pick_best needs at least one point");
    }
    auto dm = DecisionMatrix::make({points.begin(), points.end()}, weights, directions);
    return topsis_rank(dm).ranking.front();
}

} // namespace moboga
