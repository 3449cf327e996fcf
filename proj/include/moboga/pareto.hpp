#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "moboga/errors.hpp"

namespace moboga {

// Score vectors of a population, all in minimization orientation. The id of a
// member is its position in the list.
using ScoreList = std::span<std::vector<double> const>;

// v dominates w: no worse in every coordinate and strictly better in at least one.
inline bool dominates(std::span<double const> v, std::span<double const> w)
{
    if (v.size() != w.size()) {
        throw ValidationError("dominates: score vectors of length " + std::to_string(v.size()) + " and "
                              + std::to_string(w.size()));
    }
    bool strict = false;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] > w[i]) {
            return false;
        }
        if (v[i] < w[i]) {
            strict = true;
        }
    }
    return strict;
}

struct FrontPartition {
    std::vector<std::vector<std::size_t>> fronts;
    std::vector<std::size_t> rank;  // 1-based front index per id
    std::vector<double> crowding;   // per id, +inf on front boundaries
};

namespace detail {

inline std::size_t check_population(ScoreList pop)
{
    if (pop.empty()) {
        throw ValidationError("population must not be empty");
    }
    auto const k = pop.front().size();
    if (k == 0) {
        throw ValidationError("score vectors must have at least one objective");
    }
    for (auto const& s : pop) {
        if (s.size() != k) {
            throw ValidationError("score vectors in a population must share one length");
        }
    }
    return k;
}

} // namespace detail

// Crowding distance of each member of one front.
inline std::vector<double> crowding_distance(ScoreList front)
{
    auto const n = front.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (n == 0) {
        return {};
    }
    std::vector<double> dist(n, 0.0);
    if (n <= 2) {
        std::fill(dist.begin(), dist.end(), inf);
        return dist;
    }
    auto const k = front.front().size();
    std::vector<std::size_t> order(n);
    for (std::size_t m = 0; m < k; ++m) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return front[a][m] < front[b][m]; });
        double const lo = front[order.front()][m];
        double const hi = front[order.back()][m];
        dist[order.front()] = inf;
        dist[order.back()] = inf;
        if (hi == lo) {
            continue;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            dist[order[i]] += (front[order[i + 1]][m] - front[order[i - 1]][m]) / (hi - lo);
        }
    }
    return dist;
}

// Non-dominated sorting with domination counts and dominated sets, O(K N^2).
inline FrontPartition fast_nondominated_sort(ScoreList pop)
{
    detail::check_population(pop);
    auto const n = pop.size();

    std::vector<std::vector<std::size_t>> dominated(n); // S_p
    std::vector<std::size_t> count(n, 0);               // n_p
    FrontPartition out;
    out.rank.assign(n, 0);
    out.crowding.assign(n, 0.0);

    std::vector<std::size_t> current;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            if (p == q) {
                continue;
            }
            if (dominates(pop[p], pop[q])) {
                dominated[p].push_back(q);
            } else if (dominates(pop[q], pop[p])) {
                ++count[p];
            }
        }
        if (count[p] == 0) {
            out.rank[p] = 1;
            current.push_back(p);
        }
    }

    std::size_t level = 1;
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (auto p : current) {
            for (auto q : dominated[p]) {
                if (--count[q] == 0) {
                    out.rank[q] = level + 1;
                    next.push_back(q);
                }
            }
        }
        out.fronts.push_back(std::move(current));
        current = std::move(next);
        ++level;
    }

    std::vector<std::vector<double>> scores;
    for (auto const& f : out.fronts) {
        scores.clear();
        for (auto id : f) {
            scores.push_back(pop[id]);
        }
        auto const d = crowding_distance(scores);
        for (std::size_t i = 0; i < f.size(); ++i) {
            out.crowding[f[i]] = d[i];
        }
    }
    return out;
}

// Ids of the members not dominated by any other member, in ascending order.
//
// Scans the population in lexicographic order: a dominator always precedes
// the point it dominates, and by transitivity it suffices to test each point
// against the non-dominated points seen so far.
inline std::vector<std::size_t> pareto_front(ScoreList pop)
{
    detail::check_population(pop);
    std::vector<std::size_t> order(pop.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::lexicographical_compare(pop[a].begin(), pop[a].end(), pop[b].begin(), pop[b].end());
    });

    std::vector<std::size_t> front;
    for (auto id : order) {
        bool beaten = false;
        for (auto f : front) {
            if (dominates(pop[f], pop[id])) {
                beaten = true;
                break;
            }
        }
        if (!beaten) {
            front.push_back(id);
        }
    }
    std::sort(front.begin(), front.end());
    return front;
}

// Mean Euclidean distance from each point of `front` to its nearest point of `reference`.
inline double generational_distance(ScoreList front, ScoreList reference)
{
    if (front.empty() || reference.empty()) {
        throw ValidationError("generational distance needs non-empty fronts");
    }
    double total = 0.0;
    for (auto const& p : front) {
        double best = std::numeric_limits<double>::infinity();
        for (auto const& r : reference) {
            if (r.size() != p.size()) {
                throw ValidationError("generational distance: objective count mismatch");
            }
            double s = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) {
                s += (p[i] - r[i]) * (p[i] - r[i]);
            }
            best = std::min(best, s);
        }
        total += std::sqrt(best);
    }
    return total / static_cast<double>(front.size());
}

// Length of the diagonal of the bounding box of a point set.
inline double objective_diagonal(ScoreList points)
{
    detail::check_population(points);
    auto const k = points.front().size();
    double s = 0.0;
    for (std::size_t m = 0; m < k; ++m) {
        double lo = points.front()[m], hi = lo;
        for (auto const& p : points) {
            lo = std::min(lo, p[m]);
            hi = std::max(hi, p[m]);
        }
        s += (hi - lo) * (hi - lo);
    }
    return std::sqrt(s);
}

} // namespace moboga
