#pragma once

#include <stdexcept>
#include <string>

namespace tenfact {

/// Dimension or shape mismatch between tensor/matrix operands.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A problem description violates its declared invariants.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A basis function was evaluated outside its domain.
struct EvaluationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tenfact
