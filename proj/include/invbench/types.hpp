#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace invbench {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;

/// Axis-aligned box shared by every coordinate.
template <typename Scalar>
struct Bounds {
    Scalar lower = Scalar(-100);
    Scalar upper = Scalar(100);

    Scalar width() const { return upper - lower; }
    bool contains(Scalar v) const { return v >= lower && v <= upper; }
};

// Error hierarchy. Everything derives from the standard exceptions so callers
// that only care about "bad input" can catch std::invalid_argument.

struct InvalidDimension : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidConfig : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct BudgetExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedK : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct NotFound : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown by a metered objective when the wrapped function produced NaN/inf.
struct NonFiniteObjective : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace invbench
