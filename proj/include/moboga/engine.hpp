#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "moboga/acquisition.hpp"
#include "moboga/errors.hpp"
#include "moboga/nsga2.hpp"
#include "moboga/objectives.hpp"
#include "moboga/pareto.hpp"
#include "moboga/random.hpp"
#include "moboga/space.hpp"
#include "moboga/surrogate.hpp"
#include "moboga/topsis.hpp"

namespace moboga {

struct Observation {
    Candidate candidate;
    std::vector<double> encoded;
    ObjectiveVector objectives;
    bool feasible = false;
    std::size_t iteration = 0;
};

// Ordered record of every evaluated candidate. Exact duplicate encodings are rejected.
class Archive {
  public:
    void add(Observation o)
    {
        if (!obs_.empty() && o.iteration < obs_.back().iteration) {
            throw ValidationError("archive iterations must be non-decreasing");
        }
        if (contains(o.encoded)) {
            throw ValidationError("archive already holds a candidate with this encoding");
        }
        for (double q : o.objectives) {
            if (!std::isfinite(q)) {
                throw ValidationError("archive observations must have finite objectives");
            }
        }
        obs_.push_back(std::move(o));
    }

    bool contains(std::span<double const> encoded) const
    {
        return std::any_of(obs_.begin(), obs_.end(), [&](Observation const& o) {
            return std::equal(o.encoded.begin(), o.encoded.end(), encoded.begin(), encoded.end());
        });
    }

    std::size_t size() const { return obs_.size(); }
    bool empty() const { return obs_.empty(); }
    Observation const& operator[](std::size_t i) const { return obs_[i]; }
    auto begin() const { return obs_.begin(); }
    auto end() const { return obs_.end(); }
    std::vector<Observation> const& observations() const { return obs_; }

  private:
    std::vector<Observation> obs_;
};

// One member of the Pareto set of acquisition vectors.
struct ProposalEntry {
    Candidate candidate;
    std::vector<double> encoded;
    std::vector<double> acquisition; // larger is better
};

enum class NextPick { Topsis, All, UserRule };

// Returns the positions (into the offered list) of the candidates to query next.
using PickRule = std::function<std::vector<std::size_t>(std::span<ProposalEntry const>)>;

struct EngineConfig {
    std::size_t n_initial = 8;
    // Total evaluation budget, initial design included.
    std::size_t max_iterations = 50;
    double delta = 1e-3;
    GaConfig ga = [] {
        GaConfig g;
        g.population_size = 60;
        g.generations = 30;
        return g;
    }();
    NextPick next_pick = NextPick::Topsis;
    PickRule user_rule;
    std::uint64_t seed = 0;
    // Evaluated first; count towards n_initial.
    std::vector<Candidate> initial_points;
    // Evaluate batches (NextPick::All) concurrently; only for thread-safe evaluators.
    bool parallel_evaluation = false;
    // TOPSIS weights over the objectives for the final pick; empty means uniform.
    std::vector<double> weights;

    void validate(Problem const& p) const
    {
        if (n_initial < 2) {
            throw ConfigError("n_initial must be at least 2");
        }
        if (n_initial > max_iterations) {
            throw ConfigError("n_initial (" + std::to_string(n_initial) + ") exceeds the evaluation budget max_iterations ("
                              + std::to_string(max_iterations) + ")");
        }
        if (!(delta > 0.0) || !std::isfinite(delta)) {
            throw ConfigError("delta must be positive and finite");
        }
        if (initial_points.size() > n_initial) {
            throw ConfigError("more initial points than n_initial");
        }
        for (auto const& c : initial_points) {
            try {
                p.space.validate(c);
            } catch (ValidationError const& e) {
                throw ConfigError(std::string("initial point: ") + e.what());
            }
        }
        if (next_pick == NextPick::UserRule && !user_rule) {
            throw ConfigError("next_pick is UserRule but no rule was supplied");
        }
        if (!weights.empty() && weights.size() != p.num_objectives()) {
            throw ConfigError("weights must have one entry per objective");
        }
        ga.validate();
    }
};

enum class StopReason { StopThreshold, MaxIterations };

inline char const* to_string(StopReason r)
{
    return r == StopReason::StopThreshold ? "StopThreshold" : "MaxIterations";
}

struct Proposal {
    std::vector<Candidate> next;
    std::vector<ProposalEntry> pm;
    bool fallback = false; // next came from uniform sampling instead of the Pareto set
};

struct RunResult {
    Archive archive;
    std::vector<std::size_t> pof;   // archive indices
    std::size_t best_index = 0;     // archive index of the TOPSIS pick
    std::vector<double> closeness;  // TOPSIS closeness per pof member
    StopReason stop_reason = StopReason::MaxIterations;
    std::size_t iterations_used = 0; // evaluator calls
};

namespace detail {

// TOPSIS ranking that ignores criteria which are zero for every alternative.
// Such a column carries no preference information but cannot be normalized.
inline TopsisResult rank_ignoring_zero_columns(std::vector<std::vector<double>> const& x, Direction dir, std::vector<double> const& weights)
{
    auto const m = x.size();
    auto const n = m ? x.front().size() : 0;
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < n; ++j) {
        if (std::any_of(x.begin(), x.end(), [&](auto const& row) { return row[j] != 0.0; })) {
            keep.push_back(j);
        }
    }
    if (keep.empty()) {
        TopsisResult r;
        r.closeness.assign(m, 0.5);
        r.ranking.resize(m);
        std::iota(r.ranking.begin(), r.ranking.end(), std::size_t{0});
        r.degenerate = true;
        return r;
    }
    std::vector<std::vector<double>> sub(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (auto j : keep) {
            sub[i].push_back(x[i][j]);
        }
    }
    std::vector<double> w;
    if (!weights.empty()) {
        for (auto j : keep) {
            w.push_back(weights[j]);
        }
    }
    return topsis_rank(DecisionMatrix::make(std::move(sub), std::move(w), std::vector<Direction>(keep.size(), dir)));
}

inline std::optional<Candidate> sample_feasible(Problem const& problem, Archive const& archive, Rng& rng, std::size_t attempts)
{
    for (std::size_t a = 0; a < attempts; ++a) {
        auto c = problem.space.sample_uniform(rng);
        if (hard_satisfied(problem.constraints, c) && !archive.contains(problem.space.encode(c))) {
            return c;
        }
    }
    return std::nullopt;
}

} // namespace detail

// Minimum encoded distance from `next` to the archive is at most delta.
inline bool stop_check(SearchSpace const& space, Archive const& archive, Candidate const& next, double delta)
{
    if (archive.empty()) {
        throw ValidationError("stop_check needs a non-empty archive");
    }
    auto const e = space.encode(next);
    double best = std::numeric_limits<double>::infinity();
    for (auto const& o : archive) {
        double s = 0.0;
        for (std::size_t i = 0; i < e.size(); ++i) {
            s += (e[i] - o.encoded[i]) * (e[i] - o.encoded[i]);
        }
        best = std::min(best, s);
    }
    return std::sqrt(best) <= delta;
}

// One surrogate per objective, fitted to every archived observation.
inline std::vector<GpModel> fit_surrogates(Problem const& problem, Archive const& archive, std::uint64_t seed)
{
    std::vector<std::vector<double>> X;
    for (auto const& o : archive) {
        X.push_back(o.encoded);
    }
    std::vector<GpModel> models;
    for (std::size_t j = 0; j < problem.num_objectives(); ++j) {
        std::vector<double> y;
        for (auto const& o : archive) {
            y.push_back(o.objectives[j]);
        }
        MaximizeEvidence opt;
        opt.seed = derive_seed(seed, j);
        models.push_back(gp_fit(X, y, opt));
    }
    return models;
}

// Proposes the next query point(s): constraint-aware EI per objective, NSGA-II
// over the negated acquisition vector, Pareto set of the final population, and
// a TOPSIS pick (benefit direction) among it.
inline Proposal propose_next(Archive const& archive, Problem const& problem, EngineConfig const& cfg, std::size_t iteration)
{
    if (archive.size() < 2) {
        throw ValidationError("propose_next needs at least two observations");
    }
    auto const& space = problem.space;
    auto const k = problem.num_objectives();

    std::vector<GpModel> models;
    try {
        models = fit_surrogates(problem, archive, derive_seed(cfg.seed, 0x1000 + iteration));
    } catch (NumericalError const& e) {
        throw NumericalError("iteration " + std::to_string(iteration) + ": " + e.what());
    }

    std::vector<bool> feasible;
    for (auto const& o : archive) {
        feasible.push_back(o.feasible);
    }
    std::vector<double> y_best(k);
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<double> y;
        for (auto const& o : archive) {
            y.push_back(o.objectives[j]);
        }
        y_best[j] = incumbent(y, feasible);
    }

    auto acquisition = [&](Candidate const& c, std::span<double const> enc) {
        std::vector<double> a(k, 0.0);
        double const factor = constraint_factor(problem.constraints, c);
        if (factor == 0.0) {
            return a;
        }
        for (std::size_t j = 0; j < k; ++j) {
            auto const [mu, sigma] = models[j].posterior(enc);
            a[j] = expected_improvement(mu, sigma, y_best[j]) * factor;
        }
        return a;
    };

    // NSGA-II minimizes, so the acquisition enters negated.
    ScoreFn score = [&](std::span<double const> genome) {
        auto const c = space.decode(genome);
        auto a = acquisition(c, space.encode(c));
        for (double& v : a) {
            v = -v;
        }
        return a;
    };

    GaConfig ga = cfg.ga;
    ga.seed = derive_seed(cfg.seed ^ cfg.ga.seed, 0x2000 + iteration);
    auto const result = nsga2_run(score, ga, space);

    std::vector<std::vector<double>> scores;
    for (auto const& ind : result.population) {
        scores.push_back(ind.scores);
    }

    Proposal out;
    for (auto id : pareto_front(scores)) {
        ProposalEntry e;
        e.candidate = space.decode(result.population[id].genome);
        e.encoded = space.encode(e.candidate);
        bool const seen = std::any_of(out.pm.begin(), out.pm.end(), [&](auto const& p) { return p.encoded == e.encoded; });
        if (seen) {
            continue;
        }
        e.acquisition = acquisition(e.candidate, e.encoded);
        out.pm.push_back(std::move(e));
    }

    // Only hard-feasible, not yet archived members are eligible.
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < out.pm.size(); ++i) {
        if (hard_satisfied(problem.constraints, out.pm[i].candidate) && !archive.contains(out.pm[i].encoded)) {
            eligible.push_back(i);
        }
    }

    if (!eligible.empty()) {
        std::vector<std::vector<double>> acq;
        for (auto i : eligible) {
            acq.push_back(out.pm[i].acquisition);
        }
        auto const ranked = detail::rank_ignoring_zero_columns(acq, Direction::Benefit, {});
        switch (cfg.next_pick) {
        case NextPick::Topsis:
            out.next.push_back(out.pm[eligible[ranked.ranking.front()]].candidate);
            break;
        case NextPick::All:
            for (auto r : ranked.ranking) {
                out.next.push_back(out.pm[eligible[r]].candidate);
            }
            break;
        case NextPick::UserRule: {
            std::vector<ProposalEntry> offered;
            for (auto i : eligible) {
                offered.push_back(out.pm[i]);
            }
            for (auto pick : cfg.user_rule(offered)) {
                if (pick >= offered.size()) {
                    throw ConfigError("user pick rule returned an out-of-range index");
                }
                out.next.push_back(offered[pick].candidate);
            }
            break;
        }
        }
    }

    if (out.next.empty()) {
        Rng rng(derive_seed(cfg.seed, 0x3000 + iteration));
        auto c = detail::sample_feasible(problem, archive, rng, 1000);
        if (!c) {
            throw ConfigError("no hard-feasible unexplored candidate found by uniform sampling");
        }
        out.next.push_back(std::move(*c));
        out.fallback = true;
    }
    return out;
}

struct ExploreResult {
    Archive archive;
    StopReason stop_reason = StopReason::MaxIterations;
    std::size_t iterations_used = 0;
};

using ObservationHook = std::function<void(Archive const&)>;

namespace detail {

class Explorer {
  public:
    Explorer(Problem const& p, EngineConfig const& cfg, ObservationHook hook) : p_(p), cfg_(cfg), hook_(std::move(hook)) {}

    std::size_t remaining() const { return cfg_.max_iterations - used_; }

    // Evaluates a batch; candidates with non-finite objectives are dropped.
    void evaluate(std::vector<Candidate> const& batch, std::size_t iteration)
    {
        std::vector<ObjectiveVector> results(batch.size());
        if (cfg_.parallel_evaluation && batch.size() > 1) {
            std::vector<std::future<ObjectiveVector>> futs;
            for (auto const& c : batch) {
                futs.push_back(std::async(std::launch::async, [this, &c] { return call(c); }));
            }
            for (std::size_t i = 0; i < batch.size(); ++i) {
                results[i] = futs[i].get();
            }
        } else {
            for (std::size_t i = 0; i < batch.size(); ++i) {
                results[i] = call(batch[i]);
            }
        }
        for (std::size_t i = 0; i < batch.size(); ++i) {
            ++used_;
            auto const& q = results[i];
            if (!std::all_of(q.begin(), q.end(), [](double v) { return std::isfinite(v); })) {
                ++failures_;
                continue;
            }
            Observation o;
            o.candidate = batch[i];
            o.encoded = p_.space.encode(o.candidate);
            o.objectives = q;
            o.feasible = all_satisfied(p_.constraints, o.candidate);
            o.iteration = iteration;
            archive_.add(std::move(o));
            if (hook_) {
                hook_(archive_);
            }
        }
    }

    void initial_design()
    {
        for (auto const& c : cfg_.initial_points) {
            if (archive_.contains(p_.space.encode(c))) {
                throw ConfigError("duplicate initial point");
            }
            evaluate({c}, 0);
        }
        Rng rng(derive_seed(cfg_.seed, 0));
        std::vector<std::pair<double, Candidate>> rejected;
        std::size_t const max_attempts = 100 * cfg_.n_initial;
        std::size_t attempts = 0;
        bool any_feasible = false;
        while (archive_.size() < cfg_.n_initial && used_ < cfg_.n_initial && attempts < max_attempts) {
            ++attempts;
            auto c = p_.space.sample_uniform(rng);
            if (archive_.contains(p_.space.encode(c))) {
                continue;
            }
            if (!hard_satisfied(p_.constraints, c)) {
                rejected.emplace_back(hard_violation(p_.constraints, c), std::move(c));
                continue;
            }
            any_feasible = true;
            evaluate({c}, 0);
        }
        if (archive_.size() < cfg_.n_initial && used_ < cfg_.n_initial) {
            if (!any_feasible && !has_hard_feasible()) {
                throw ConfigError("no hard-feasible point found in " + std::to_string(max_attempts)
                                  + " uniform draws of the initial design");
            }
            std::stable_sort(rejected.begin(), rejected.end(), [](auto const& a, auto const& b) { return a.first < b.first; });
            for (auto& [v, c] : rejected) {
                if (archive_.size() >= cfg_.n_initial || used_ >= cfg_.n_initial) {
                    break;
                }
                if (!archive_.contains(p_.space.encode(c))) {
                    evaluate({c}, 0);
                }
            }
        }
        if (archive_.size() < 2) {
            throw ConfigError("initial design produced fewer than two valid observations");
        }
    }

    ExploreResult run()
    {
        initial_design();
        StopReason reason = StopReason::MaxIterations;
        std::size_t iteration = 0;
        while (remaining() > 0) {
            ++iteration;
            auto proposal = propose_next(archive_, p_, cfg_, iteration);
            std::vector<Candidate> batch;
            for (auto& c : proposal.next) {
                if (!stop_check(p_.space, archive_, c, cfg_.delta) && batch.size() < remaining()) {
                    batch.push_back(std::move(c));
                }
            }
            if (batch.empty()) {
                reason = StopReason::StopThreshold;
                break;
            }
            evaluate(batch, iteration);
        }
        return ExploreResult{std::move(archive_), reason, used_};
    }

  private:
    ObjectiveVector call(Candidate const& c) const
    {
        ObjectiveVector q;
        try {
            q = p_.evaluator(c);
        } catch (std::exception const& e) {
            throw EvaluationError("evaluator failed at " + p_.space.describe(c) + ": " + e.what());
        }
        if (q.size() != p_.num_objectives()) {
            throw EvaluationError("evaluator returned " + std::to_string(q.size()) + " objectives, expected "
                                  + std::to_string(p_.num_objectives()));
        }
        return q;
    }

    bool has_hard_feasible() const
    {
        return std::any_of(archive_.begin(), archive_.end(), [&](auto const& o) { return hard_satisfied(p_.constraints, o.candidate); });
    }

    Problem const& p_;
    EngineConfig const& cfg_;
    ObservationHook hook_;
    Archive archive_;
    std::size_t used_ = 0;
    std::size_t failures_ = 0;
};

} // namespace detail

// Exploration loop: initial design, then propose / stop-check / evaluate until
// the stop rule fires or the evaluation budget is spent.
inline ExploreResult explore(Problem const& problem, EngineConfig const& cfg, ObservationHook hook = {})
{
    validate_problem(problem);
    cfg.validate(problem);
    return detail::Explorer(problem, cfg, std::move(hook)).run();
}

// Pareto front of the feasible observations and the TOPSIS (cost direction) pick among it.
inline RunResult exploit(Archive archive, std::vector<double> const& weights = {})
{
    std::vector<std::size_t> feasible;
    std::vector<std::vector<double>> q;
    for (std::size_t i = 0; i < archive.size(); ++i) {
        if (archive[i].feasible) {
            feasible.push_back(i);
            q.push_back(archive[i].objectives);
        }
    }
    if (feasible.empty()) {
        throw NoFeasibleError("no feasible observation in the archive");
    }
    if (!weights.empty() && weights.size() != q.front().size()) {
        throw ConfigError("weights must have one entry per objective");
    }

    RunResult r;
    std::vector<std::vector<double>> front_q;
    for (auto id : pareto_front(q)) {
        r.pof.push_back(feasible[id]);
        front_q.push_back(q[id]);
    }
    auto const ranked = detail::rank_ignoring_zero_columns(front_q, Direction::Cost, weights);
    r.closeness = ranked.closeness;
    r.best_index = r.pof[ranked.ranking.front()];
    r.archive = std::move(archive);
    return r;
}

inline RunResult run(Problem const& problem, EngineConfig const& cfg, ObservationHook hook = {})
{
    auto explored = explore(problem, cfg, std::move(hook));
    auto r = exploit(std::move(explored.archive), cfg.weights);
    r.stop_reason = explored.stop_reason;
    r.iterations_used = explored.iterations_used;
    return r;
}

} // namespace moboga
