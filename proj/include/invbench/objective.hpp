#pragma once

#include "invbench/types.hpp"

#include <functional>
#include <memory>
#include <utility>

namespace invbench {

/// Type-erased black-box objective: a dimension and a callable.
///
/// This is the currency passed between the suite, the transformation
/// wrappers, the optimizers and the evaluation meter.
template <typename Scalar>
class Objective {
public:
    using Fn = std::function<Scalar(const Vector<Scalar>&)>;

    Objective() = default;
    Objective(Index dim, Fn fn) : dim_(dim), fn_(std::move(fn)) {}

    Index dim() const { return dim_; }
    Scalar operator()(const Vector<Scalar>& x) const { return fn_(x); }
    explicit operator bool() const { return static_cast<bool>(fn_); }

private:
    Index dim_ = 0;
    Fn fn_;
};

}  // namespace invbench
