#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "moboga/errors.hpp"
#include "moboga/pareto.hpp"
#include "moboga/random.hpp"
#include "moboga/space.hpp"

namespace moboga {

struct GaConfig {
    std::size_t population_size = 100;
    std::size_t generations = 50;
    double crossover_prob = 0.9;
    // Unset means 1 / genome length.
    std::optional<double> mutation_prob;
    double sbx_eta = 15.0;
    double pm_eta = 20.0;
    std::uint64_t seed = 0;

    double mutation_rate(std::size_t genome_dim) const
    {
        return mutation_prob.value_or(genome_dim > 0 ? 1.0 / static_cast<double>(genome_dim) : 1.0);
    }

    void validate() const
    {
        if (population_size < 4 || population_size % 2 != 0) {
            throw ConfigError("GA population size must be an even number >= 4");
        }
        if (generations < 1) {
            throw ConfigError("GA needs at least one generation");
        }
        if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0)) {
            throw ConfigError("GA crossover probability must lie in [0, 1]");
        }
        if (mutation_prob && !(*mutation_prob >= 0.0 && *mutation_prob <= 1.0)) {
            throw ConfigError("GA mutation probability must lie in [0, 1]");
        }
        if (!(sbx_eta > 0.0) || !(pm_eta > 0.0)) {
            throw ConfigError("GA distribution indices must be positive");
        }
    }
};

using Genome = std::vector<double>;

struct Individual {
    Genome genome;
    std::vector<double> scores; // minimized
    std::size_t rank = 0;
    double crowding = 0.0;
};

// Binary tournament: lower rank wins, then larger crowding, then a coin flip.
inline Individual const& tournament_select(Individual const& a, Individual const& b, Rng& rng)
{
    if (a.rank != b.rank) {
        return a.rank < b.rank ? a : b;
    }
    if (a.crowding != b.crowding) {
        return a.crowding > b.crowding ? a : b;
    }
    return rng.coin() ? a : b;
}

// Simulated binary crossover on [0,1] genes.
inline std::pair<Genome, Genome> sbx_crossover(Genome const& p1, Genome const& p2, GaConfig const& cfg, Rng& rng)
{
    if (p1.size() != p2.size()) {
        throw ValidationError("sbx_crossover: parents differ in length");
    }
    Genome c1 = p1, c2 = p2;
    if (cfg.crossover_prob <= 0.0 || rng.uniform() >= cfg.crossover_prob) {
        return {std::move(c1), std::move(c2)};
    }
    double const expo = 1.0 / (cfg.sbx_eta + 1.0);
    for (std::size_t i = 0; i < p1.size(); ++i) {
        double const u = rng.uniform();
        double const beta = u <= 0.5 ? std::pow(2.0 * u, expo) : std::pow(1.0 / (2.0 * (1.0 - u)), expo);
        // midpoint +- beta * half gap; identical parents come back unchanged
        double const mid = 0.5 * (p1[i] + p2[i]);
        double const half = 0.5 * beta * (p2[i] - p1[i]);
        c1[i] = std::clamp(mid - half, 0.0, 1.0);
        c2[i] = std::clamp(mid + half, 0.0, 1.0);
    }
    return {std::move(c1), std::move(c2)};
}

// Bounded polynomial mutation on [0,1] genes.
inline Genome polynomial_mutation(Genome g, GaConfig const& cfg, Rng& rng)
{
    double const rate = cfg.mutation_rate(g.size());
    double const expo = 1.0 / (cfg.pm_eta + 1.0);
    for (double& y : g) {
        if (rate <= 0.0 || rng.uniform() >= rate) {
            continue;
        }
        double const r = rng.uniform();
        double delta;
        if (r < 0.5) {
            double const xy = 1.0 - y;
            double const val = 2.0 * r + (1.0 - 2.0 * r) * std::pow(xy, cfg.pm_eta + 1.0);
            delta = std::pow(val, expo) - 1.0;
        } else {
            double const xy = y;
            double const val = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * std::pow(xy, cfg.pm_eta + 1.0);
            delta = 1.0 - std::pow(val, expo);
        }
        y = std::clamp(y + delta, 0.0, 1.0);
    }
    return g;
}

using ScoreFn = std::function<std::vector<double>(std::span<double const>)>;

struct Nsga2Result {
    std::vector<Individual> population;
    FrontPartition partition;
};

struct Nsga2Options {
    // Seeds the first parent population; the rest is drawn uniformly.
    std::vector<Genome> initial;
    // Observes the parent population after initialization (generation 0) and after each survival step.
    std::function<void(std::size_t, std::span<Individual const>)> on_generation;
};

namespace detail {

inline void score_into(Individual& ind, ScoreFn const& fn, std::size_t k_expected)
{
    ind.scores = fn(ind.genome);
    if (ind.scores.empty() || (k_expected && ind.scores.size() != k_expected)) {
        throw EvaluationError("NSGA-II score function returned an inconsistent number of objectives");
    }
    for (double s : ind.scores) {
        if (!std::isfinite(s)) {
            throw EvaluationError("NSGA-II score function returned a non-finite value");
        }
    }
}

inline FrontPartition rank_population(std::vector<Individual>& pop)
{
    std::vector<std::vector<double>> scores;
    scores.reserve(pop.size());
    for (auto const& ind : pop) {
        scores.push_back(ind.scores);
    }
    auto part = fast_nondominated_sort(scores);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        pop[i].rank = part.rank[i];
        pop[i].crowding = part.crowding[i];
    }
    return part;
}

inline std::vector<Individual> make_offspring(std::vector<Individual> const& parents, GaConfig const& cfg, Rng& rng)
{
    auto const n = parents.size();
    auto pick = [&]() -> Individual const& {
        std::size_t const i = rng.index(n);
        std::size_t j = rng.index(n - 1);
        if (j >= i) {
            ++j;
        }
        return tournament_select(parents[i], parents[j], rng);
    };
    std::vector<Individual> children;
    children.reserve(n);
    while (children.size() < n) {
        auto const& a = pick();
        auto const& b = pick();
        auto [g1, g2] = sbx_crossover(a.genome, b.genome, cfg, rng);
        children.push_back(Individual{polynomial_mutation(std::move(g1), cfg, rng), {}, 0, 0.0});
        if (children.size() < n) {
            children.push_back(Individual{polynomial_mutation(std::move(g2), cfg, rng), {}, 0, 0.0});
        }
    }
    return children;
}

} // namespace detail

// Elitist NSGA-II over genomes in [0,1]^genome_dim minimizing every score.
inline Nsga2Result nsga2_run(ScoreFn const& score_fn, GaConfig const& cfg, std::size_t genome_dim, Nsga2Options const& opts = {})
{
    cfg.validate();
    if (genome_dim == 0) {
        throw ValidationError("NSGA-II genome dimension must be positive");
    }
    auto const n = cfg.population_size;
    Rng rng(cfg.seed);

    std::vector<Individual> parents;
    parents.reserve(n);
    for (auto const& g : opts.initial) {
        if (parents.size() == n) {
            break;
        }
        if (g.size() != genome_dim) {
            throw ValidationError("initial genome has the wrong length");
        }
        Genome clamped = g;
        for (double& x : clamped) {
            x = std::clamp(x, 0.0, 1.0);
        }
        parents.push_back(Individual{std::move(clamped), {}, 0, 0.0});
    }
    while (parents.size() < n) {
        Genome g(genome_dim);
        for (double& x : g) {
            x = rng.uniform();
        }
        parents.push_back(Individual{std::move(g), {}, 0, 0.0});
    }

    std::size_t k = 0;
    for (auto& ind : parents) {
        detail::score_into(ind, score_fn, k);
        k = ind.scores.size();
    }
    detail::rank_population(parents);
    if (opts.on_generation) {
        opts.on_generation(0, parents);
    }

    for (std::size_t gen = 1; gen <= cfg.generations; ++gen) {
        auto children = detail::make_offspring(parents, cfg, rng);
        for (auto& c : children) {
            detail::score_into(c, score_fn, k);
        }

        std::vector<Individual> combined = std::move(parents);
        combined.insert(combined.end(), std::make_move_iterator(children.begin()), std::make_move_iterator(children.end()));
        auto const part = detail::rank_population(combined);

        std::vector<Individual> survivors;
        survivors.reserve(n);
        for (auto front : part.fronts) {
            std::sort(front.begin(), front.end());
            if (survivors.size() + front.size() > n) {
                // last partially fitting front: most isolated members first, ties by id
                std::stable_sort(front.begin(), front.end(), [&](std::size_t a, std::size_t b) {
                    return combined[a].crowding > combined[b].crowding;
                });
                front.resize(n - survivors.size());
            }
            for (auto id : front) {
                survivors.push_back(std::move(combined[id]));
            }
            if (survivors.size() == n) {
                break;
            }
        }
        parents = std::move(survivors);
        if (opts.on_generation) {
            opts.on_generation(gen, parents);
        }
    }

    Nsga2Result out;
    out.partition = detail::rank_population(parents);
    out.population = std::move(parents);
    return out;
}

inline Nsga2Result nsga2_run(ScoreFn const& score_fn, GaConfig const& cfg, SearchSpace const& space, Nsga2Options const& opts = {})
{
    return nsga2_run(score_fn, cfg, space.encoded_dim(), opts);
}

} // namespace moboga
