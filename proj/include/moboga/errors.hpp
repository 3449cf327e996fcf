#pragma once

#include <stdexcept>
#include <string>

namespace moboga {

// Input does not satisfy an operation's contract (bad candidate, wrong vector length, ...).
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Linear algebra breakdown, e.g. Cholesky failure after jitter escalation.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A user callable (evaluator, constraint predicate, penalty) failed.
struct EvaluationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Problem or engine configuration is unusable.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoFeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace moboga
