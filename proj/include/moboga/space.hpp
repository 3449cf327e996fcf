#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "moboga/errors.hpp"
#include "moboga/random.hpp"

namespace moboga {

struct Continuous {
    double lo;
    double hi;
};

// Ordered set of admissible numeric values (batch sizes, layer counts, ...).
struct Discrete {
    std::vector<double> values;
};

struct Categorical {
    std::vector<std::string> labels;
};

using ParamKind = std::variant<Continuous, Discrete, Categorical>;

struct ParamSpec {
    std::string name;
    ParamKind kind;

    static ParamSpec continuous(std::string name, double lo, double hi) { return {std::move(name), Continuous{lo, hi}}; }
    static ParamSpec discrete(std::string name, std::vector<double> values) { return {std::move(name), Discrete{std::move(values)}}; }
    static ParamSpec categorical(std::string name, std::vector<std::string> labels) { return {std::move(name), Categorical{std::move(labels)}}; }
};

// A real for continuous and discrete parameters, a label for categorical ones.
using ParamValue = std::variant<double, std::string>;

struct Candidate {
    std::vector<ParamValue> values;

    bool operator==(Candidate const&) const = default;

    double real(std::size_t i) const { return std::get<double>(values.at(i)); }
    std::string const& label(std::size_t i) const { return std::get<std::string>(values.at(i)); }
};

inline std::size_t encoded_width(ParamSpec const& p)
{
    if (auto const* c = std::get_if<Categorical>(&p.kind)) {
        return c->labels.size();
    }
    return 1;
}

// The search domain: an ordered list of mixed-type parameters together with a
// reversible embedding into [0,1]^encoded_dim.
class SearchSpace {
  public:
    SearchSpace() = default;

    explicit SearchSpace(std::vector<ParamSpec> params) : params_(std::move(params))
    {
        std::unordered_set<std::string> seen;
        for (auto const& p : params_) {
            if (p.name.empty()) {
                throw ValidationError("parameter name must not be empty");
            }
            if (!seen.insert(p.name).second) {
                throw ValidationError("duplicate parameter name '" + p.name + "'");
            }
            check_spec(p);
            encoded_dim_ += encoded_width(p);
        }
    }

    std::vector<ParamSpec> const& params() const { return params_; }
    std::size_t size() const { return params_.size(); }
    std::size_t encoded_dim() const { return encoded_dim_; }

    std::size_t index_of(std::string const& name) const
    {
        for (std::size_t i = 0; i < params_.size(); ++i) {
            if (params_[i].name == name) {
                return i;
            }
        }
        throw ValidationError("unknown parameter '" + name + "'");
    }

    // Throws ValidationError naming the first offending parameter.
    void validate(Candidate const& c) const
    {
        if (c.values.size() != params_.size()) {
            throw ValidationError("candidate has " + std::to_string(c.values.size()) + " values, space has "
                                  + std::to_string(params_.size()) + " parameters");
        }
        for (std::size_t i = 0; i < params_.size(); ++i) {
            check_value(params_[i], c.values[i]);
        }
    }

    bool contains(Candidate const& c) const
    {
        try {
            validate(c);
            return true;
        } catch (ValidationError const&) {
            return false;
        }
    }

    std::vector<double> encode(Candidate const& c) const
    {
        validate(c);
        std::vector<double> out;
        out.reserve(encoded_dim_);
        for (std::size_t i = 0; i < params_.size(); ++i) {
            auto const& v = c.values[i];
            std::visit(
                [&](auto const& kind) {
                    using K = std::decay_t<decltype(kind)>;
                    if constexpr (std::is_same_v<K, Continuous>) {
                        out.push_back(std::clamp((std::get<double>(v) - kind.lo) / (kind.hi - kind.lo), 0.0, 1.0));
                    } else if constexpr (std::is_same_v<K, Discrete>) {
                        auto const n = kind.values.size();
                        auto const r = rank_of(kind, std::get<double>(v));
                        out.push_back(n == 1 ? 0.0 : static_cast<double>(r) / static_cast<double>(n - 1));
                    } else {
                        auto const& label = std::get<std::string>(v);
                        for (auto const& l : kind.labels) {
                            out.push_back(l == label ? 1.0 : 0.0);
                        }
                    }
                },
                params_[i].kind);
        }
        return out;
    }

    // Maps any finite vector of the right length back onto a valid candidate.
    Candidate decode(std::span<double const> v) const
    {
        if (v.size() != encoded_dim_) {
            throw ValidationError("encoded vector has length " + std::to_string(v.size()) + ", expected "
                                  + std::to_string(encoded_dim_));
        }
        for (double x : v) {
            if (!std::isfinite(x)) {
                throw ValidationError("encoded vector contains a non-finite entry");
            }
        }
        Candidate c;
        c.values.reserve(params_.size());
        std::size_t pos = 0;
        for (auto const& p : params_) {
            std::visit(
                [&](auto const& kind) {
                    using K = std::decay_t<decltype(kind)>;
                    if constexpr (std::is_same_v<K, Continuous>) {
                        c.values.emplace_back(kind.lo + std::clamp(v[pos], 0.0, 1.0) * (kind.hi - kind.lo));
                        ++pos;
                    } else if constexpr (std::is_same_v<K, Discrete>) {
                        auto const n = kind.values.size();
                        std::size_t idx = 0;
                        if (n > 1) {
                            double const r = std::clamp(v[pos], 0.0, 1.0) * static_cast<double>(n - 1);
                            // nearest rank, halfway ties go to the lower rank
                            idx = static_cast<std::size_t>(std::ceil(r - 0.5));
                            idx = std::min(idx, n - 1);
                        }
                        c.values.emplace_back(kind.values[idx]);
                        ++pos;
                    } else {
                        std::size_t best = 0;
                        for (std::size_t k = 1; k < kind.labels.size(); ++k) {
                            if (v[pos + k] > v[pos + best]) {
                                best = k;
                            }
                        }
                        c.values.emplace_back(kind.labels[best]);
                        pos += kind.labels.size();
                    }
                },
                p.kind);
        }
        return c;
    }

    Candidate sample_uniform(Rng& rng) const
    {
        Candidate c;
        c.values.reserve(params_.size());
        for (auto const& p : params_) {
            std::visit(
                [&](auto const& kind) {
                    using K = std::decay_t<decltype(kind)>;
                    if constexpr (std::is_same_v<K, Continuous>) {
                        c.values.emplace_back(rng.uniform(kind.lo, kind.hi));
                    } else if constexpr (std::is_same_v<K, Discrete>) {
                        c.values.emplace_back(kind.values[rng.index(kind.values.size())]);
                    } else {
                        c.values.emplace_back(kind.labels[rng.index(kind.labels.size())]);
                    }
                },
                p.kind);
        }
        return c;
    }

    double distance(Candidate const& a, Candidate const& b) const
    {
        auto const ea = encode(a);
        auto const eb = encode(b);
        double s = 0.0;
        for (std::size_t i = 0; i < ea.size(); ++i) {
            s += (ea[i] - eb[i]) * (ea[i] - eb[i]);
        }
        return std::sqrt(s);
    }

    std::string describe(Candidate const& c) const
    {
        std::ostringstream os;
        os.precision(6);
        for (std::size_t i = 0; i < params_.size() && i < c.values.size(); ++i) {
            if (i) {
                os << ", ";
            }
            os << params_[i].name << '=';
            std::visit([&](auto const& x) { os << x; }, c.values[i]);
        }
        return os.str();
    }

  private:
    static void check_spec(ParamSpec const& p)
    {
        std::visit(
            [&](auto const& kind) {
                using K = std::decay_t<decltype(kind)>;
                if constexpr (std::is_same_v<K, Continuous>) {
                    if (!std::isfinite(kind.lo) || !std::isfinite(kind.hi) || !(kind.lo < kind.hi)) {
                        throw ValidationError("parameter '" + p.name + "': continuous range needs finite lo < hi");
                    }
                } else if constexpr (std::is_same_v<K, Discrete>) {
                    if (kind.values.empty()) {
                        throw ValidationError("parameter '" + p.name + "': discrete parameter needs at least one value");
                    }
                    for (std::size_t i = 0; i < kind.values.size(); ++i) {
                        if (!std::isfinite(kind.values[i]) || (i > 0 && !(kind.values[i - 1] < kind.values[i]))) {
                            throw ValidationError("parameter '" + p.name
                                                  + "': discrete values must be finite and strictly increasing");
                        }
                    }
                } else {
                    if (kind.labels.empty()) {
                        throw ValidationError("parameter '" + p.name + "': categorical parameter needs at least one label");
                    }
                    std::unordered_set<std::string> seen(kind.labels.begin(), kind.labels.end());
                    if (seen.size() != kind.labels.size()) {
                        throw ValidationError("parameter '" + p.name + "': categorical labels must be unique");
                    }
                }
            },
            p.kind);
    }

    static std::size_t rank_of(Discrete const& d, double v)
    {
        auto it = std::lower_bound(d.values.begin(), d.values.end(), v);
        return static_cast<std::size_t>(it - d.values.begin());
    }

    static void check_value(ParamSpec const& p, ParamValue const& v)
    {
        auto fail = [&](std::string const& why) { throw ValidationError("parameter '" + p.name + "': " + why); };
        std::visit(
            [&](auto const& kind) {
                using K = std::decay_t<decltype(kind)>;
                if constexpr (std::is_same_v<K, Categorical>) {
                    auto const* s = std::get_if<std::string>(&v);
                    if (!s) {
                        fail("expected a label");
                    }
                    if (std::find(kind.labels.begin(), kind.labels.end(), *s) == kind.labels.end()) {
                        fail("label '" + *s + "' is not admissible");
                    }
                } else {
                    auto const* x = std::get_if<double>(&v);
                    if (!x) {
                        fail("expected a number");
                    }
                    if constexpr (std::is_same_v<K, Continuous>) {
                        if (!(*x >= kind.lo && *x <= kind.hi)) {
                            fail("value outside [" + std::to_string(kind.lo) + ", " + std::to_string(kind.hi) + "]");
                        }
                    } else {
                        auto const r = rank_of(kind, *x);
                        if (r >= kind.values.size() || kind.values[r] != *x) {
                            fail("value is not one of the listed discrete values");
                        }
                    }
                }
            },
            p.kind);
    }

    std::vector<ParamSpec> params_;
    std::size_t encoded_dim_ = 0;
};

} // namespace moboga
