#pragma once

#include "invbench/objective.hpp"
#include "invbench/rotation.hpp"
#include "invbench/suite.hpp"
#include "invbench/types.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace invbench {

enum class TransformKind { baseline, translate, scale, rotate, vshift };

inline std::string_view to_string(TransformKind k) {
    switch (k) {
        case TransformKind::baseline: return "baseline";
        case TransformKind::translate: return "translate";
        case TransformKind::scale: return "scale";
        case TransformKind::rotate: return "rotate";
        case TransformKind::vshift: return "vshift";
    }
    return "unknown";
}

inline TransformKind parse_transform_kind(std::string_view s) {
    for (auto k : {TransformKind::baseline, TransformKind::translate, TransformKind::scale,
                   TransformKind::rotate, TransformKind::vshift})
        if (to_string(k) == s) return k;
    throw InvalidConfig("unknown transformation kind '" + std::string(s) + "'");
}

inline constexpr double kDefaultTranslation = 8.0;
inline constexpr double kDefaultScale = 5.0;
inline constexpr double kDefaultVerticalShift = 6.0;

/// One of the objective-space transformations
///   translate: f(x + a)   scale: f(αx)   rotate: f(xM)   vshift: f(x) + c
/// with x treated as a row vector, so f(xM) evaluates f at Mᵀx.
template <typename Scalar = double>
struct Transformation {
    TransformKind kind = TransformKind::baseline;
    Vector<Scalar> a;  // translate
    Scalar alpha = Scalar(kDefaultScale);
    Matrix<Scalar> m;  // rotate
    Scalar c = Scalar(kDefaultVerticalShift);

    static Transformation baseline() { return {}; }

    static Transformation translate(Vector<Scalar> offset) {
        Transformation t;
        t.kind = TransformKind::translate;
        t.a = std::move(offset);
        return t;
    }

    /// Uniform offset (a, a, ..., a).
    static Transformation translate(Index dim, Scalar offset = Scalar(kDefaultTranslation)) {
        return translate(Vector<Scalar>::Constant(dim, offset));
    }

    static Transformation scale(Scalar alpha = Scalar(kDefaultScale)) {
        Transformation t;
        t.kind = TransformKind::scale;
        t.alpha = alpha;
        return t;
    }

    static Transformation rotate(Matrix<Scalar> m) {
        Transformation t;
        t.kind = TransformKind::rotate;
        t.m = std::move(m);
        return t;
    }

    static Transformation vshift(Scalar c = Scalar(kDefaultVerticalShift)) {
        Transformation t;
        t.kind = TransformKind::vshift;
        t.c = c;
        return t;
    }

    /// Checks the invariants against a target dimension.
    void validate(Index dim) const {
        switch (kind) {
            case TransformKind::translate:
                if (a.size() != dim)
                    throw std::invalid_argument("translate offset has " + std::to_string(a.size()) +
                                                " components, objective has " + std::to_string(dim));
                break;
            case TransformKind::scale:
                if (alpha == Scalar(0)) throw std::invalid_argument("scale factor must be non-zero");
                break;
            case TransformKind::rotate:
                if (m.rows() != dim || m.cols() != dim)
                    throw std::invalid_argument("rotation matrix does not match objective dimension");
                if (!(orthonormality_error(m) < Scalar(1e-10)))
                    throw std::invalid_argument("rotation matrix is not orthonormal");
                break;
            default: break;
        }
    }
};

/// g = t ∘ f. Bounds are left as they are.
template <typename Scalar>
Objective<Scalar> wrap(const Transformation<Scalar>& t, Objective<Scalar> f) {
    t.validate(f.dim());
    const Index dim = f.dim();
    switch (t.kind) {
        case TransformKind::baseline: return f;
        case TransformKind::translate:
            return Objective<Scalar>(dim, [f, a = t.a](const Vector<Scalar>& x) {
                return f((x + a).eval());
            });
        case TransformKind::scale:
            return Objective<Scalar>(dim, [f, alpha = t.alpha](const Vector<Scalar>& x) {
                return f((alpha * x).eval());
            });
        case TransformKind::rotate:
            return Objective<Scalar>(dim, [f, mt = Matrix<Scalar>(t.m.transpose())](const Vector<Scalar>& x) {
                return f((mt * x).eval());
            });
        case TransformKind::vshift:
            return Objective<Scalar>(dim, [f, c = t.c](const Vector<Scalar>& x) { return f(x) + c; });
    }
    throw std::logic_error("unknown transformation");
}

template <typename Scalar>
Objective<Scalar> wrap(const Transformation<Scalar>& t, const ObjectiveFunction<Scalar>& f) {
    return wrap(t, f.as_objective());
}

template <typename Scalar>
struct TransformedOptimum {
    Vector<Scalar> location;
    Scalar value;
    bool out_of_bounds = false;
};

template <typename Scalar>
TransformedOptimum<Scalar> transformed_optimum(const Transformation<Scalar>& t, const Vector<Scalar>& x_star,
                                               Scalar f_star, const Bounds<Scalar>& bounds = {}) {
    t.validate(x_star.size());
    TransformedOptimum<Scalar> out{x_star, f_star, false};
    switch (t.kind) {
        case TransformKind::baseline: break;
        case TransformKind::translate: out.location = x_star - t.a; break;
        case TransformKind::scale: out.location = x_star / t.alpha; break;
        case TransformKind::rotate: out.location = t.m * x_star; break;  // row form: x*·Mᵀ
        case TransformKind::vshift: out.value = f_star + t.c; break;
    }
    out.out_of_bounds = (out.location.array() < bounds.lower).any() ||
                        (out.location.array() > bounds.upper).any();
    return out;
}

template <typename Scalar>
TransformedOptimum<Scalar> transformed_optimum(const Transformation<Scalar>& t, const ObjectiveFunction<Scalar>& f) {
    return transformed_optimum(t, f.optimum_location(), f.optimum_value(), f.bounds());
}

/// Declarative transformation as it appears in config files. Materialised per
/// (function, dim) because rotation matrices and offsets depend on both.
struct TransformSpec {
    TransformKind kind = TransformKind::baseline;
    double a = kDefaultTranslation;
    double alpha = kDefaultScale;
    double c = kDefaultVerticalShift;
    std::optional<std::uint64_t> rotation_seed;

    template <typename Scalar = double>
    Transformation<Scalar> materialize(int function_id, Index dim, std::uint64_t master_seed) const {
        switch (kind) {
            case TransformKind::baseline: return Transformation<Scalar>::baseline();
            case TransformKind::translate: return Transformation<Scalar>::translate(dim, Scalar(a));
            case TransformKind::scale: return Transformation<Scalar>::scale(Scalar(alpha));
            case TransformKind::vshift: return Transformation<Scalar>::vshift(Scalar(c));
            case TransformKind::rotate: {
                const std::uint64_t base = rotation_seed.value_or(master_seed);
                const auto seed = mix_seed(mix_seed(base, static_cast<std::uint64_t>(function_id)),
                                           static_cast<std::uint64_t>(dim));
                return Transformation<Scalar>::rotate(random_rotation<Scalar>(seed, dim));
            }
        }
        throw std::logic_error("unknown transformation");
    }
};

}  // namespace invbench
