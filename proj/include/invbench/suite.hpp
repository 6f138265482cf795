#pragma once

#include "invbench/base_functions.hpp"
#include "invbench/objective.hpp"
#include "invbench/rng.hpp"
#include "invbench/rotation.hpp"
#include "invbench/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace invbench {

enum class Category { unimodal, multimodal, hybrid, composition };

inline std::string_view to_string(Category c) {
    switch (c) {
        case Category::unimodal: return "unimodal";
        case Category::multimodal: return "multimodal";
        case Category::hybrid: return "hybrid";
        case Category::composition: return "composition";
    }
    return "unknown";
}

/// splitmix64 finaliser; used wherever two integers need to be folded into a seed.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// A bounded test function: f(x) = core(Rᵀ(x − shift)) + bias.
///
/// `core` is a single base formula, a sum over contiguous coordinate blocks
/// (hybrid), or a Gaussian-weighted mixture of shifted bases (composition).
/// In every case core(0) == 0, so the optimum is at `shift` with value `bias`.
template <typename Scalar = double>
class ObjectiveFunction {
public:
    struct Block {
        BaseKind kind;
        Index start;
        Index size;
    };

    struct Component {
        BaseKind kind;
        Vector<Scalar> optimum;  // in rotated coordinates; the first one is 0
        Scalar sigma;
        Scalar lambda;
        Scalar bias;
    };

    static ObjectiveFunction single(int id, Category category, BaseKind kind, Vector<Scalar> shift,
                                    Matrix<Scalar> rotation, Scalar bias) {
        ObjectiveFunction f(id, category, std::move(shift), std::move(rotation), bias);
        f.blocks_.push_back({kind, 0, f.dim()});
        return f;
    }

    static ObjectiveFunction hybrid(int id, std::vector<Block> blocks, Vector<Scalar> shift,
                                    Matrix<Scalar> rotation, Scalar bias) {
        ObjectiveFunction f(id, Category::hybrid, std::move(shift), std::move(rotation), bias);
        Index next = 0;
        for (const auto& b : blocks) {
            if (b.start != next || b.size < 1)
                throw std::invalid_argument("hybrid blocks must be contiguous and non-empty");
            next += b.size;
        }
        if (next != f.dim()) throw std::invalid_argument("hybrid blocks must cover every coordinate");
        f.blocks_ = std::move(blocks);
        return f;
    }

    static ObjectiveFunction composition(int id, std::vector<Component> components,
                                         Vector<Scalar> shift, Matrix<Scalar> rotation, Scalar bias) {
        ObjectiveFunction f(id, Category::composition, std::move(shift), std::move(rotation), bias);
        if (components.empty()) throw std::invalid_argument("composition needs components");
        for (const auto& c : components)
            if (c.optimum.size() != f.dim())
                throw std::invalid_argument("composition component dimension mismatch");
        if (!components.front().optimum.isZero(0))
            throw std::invalid_argument("first composition component must sit at the origin");
        f.components_ = std::move(components);
        return f;
    }

    int id() const { return id_; }
    Category category() const { return category_; }
    Index dim() const { return shift_.size(); }
    const Vector<Scalar>& shift() const { return shift_; }
    const Matrix<Scalar>& rotation() const { return rotation_; }
    Scalar bias() const { return bias_; }
    Bounds<Scalar> bounds() const { return {}; }

    Scalar optimum_value() const { return bias_; }
    const Vector<Scalar>& optimum_location() const { return shift_; }

    const std::vector<Block>& blocks() const { return blocks_; }
    const std::vector<Component>& components() const { return components_; }

    /// Human-readable formula name, e.g. "rastrigin" or "hybrid(zakharov+rosenbrock)".
    std::string formula() const {
        std::string out;
        auto join = [&](auto&& items, auto&& kind_of) {
            for (std::size_t i = 0; i < items.size(); ++i) {
                if (i) out += '+';
                out += to_string(kind_of(items[i]));
            }
        };
        if (category_ == Category::composition) {
            out = "composition(";
            join(components_, [](const Component& c) { return c.kind; });
            out += ')';
        } else if (category_ == Category::hybrid) {
            out = "hybrid(";
            join(blocks_, [](const Block& b) { return b.kind; });
            out += ')';
        } else {
            out = std::string(to_string(blocks_.front().kind));
        }
        return out;
    }

    Scalar evaluate(const Vector<Scalar>& x) const {
        if (x.size() != dim())
            throw std::invalid_argument("evaluate: expected " + std::to_string(dim()) +
                                        " coordinates, got " + std::to_string(x.size()));
        if (!x.allFinite()) throw std::invalid_argument("evaluate: non-finite coordinate");
        const Vector<Scalar> z = rotation_.transpose() * (x - shift_);
        return core(z) + bias_;
    }

    Scalar operator()(const Vector<Scalar>& x) const { return evaluate(x); }

    /// Wraps a copy of this function as a type-erased objective.
    Objective<Scalar> as_objective() const {
        auto self = std::make_shared<const ObjectiveFunction>(*this);
        return Objective<Scalar>(dim(), [self](const Vector<Scalar>& x) { return self->evaluate(x); });
    }

private:
    ObjectiveFunction(int id, Category category, Vector<Scalar> shift, Matrix<Scalar> rotation, Scalar bias)
        : id_(id), category_(category), shift_(std::move(shift)), rotation_(std::move(rotation)), bias_(bias) {
        if (shift_.size() < 1) throw InvalidDimension("objective dimension must be >= 1");
        if (rotation_.rows() != dim() || rotation_.cols() != dim())
            throw std::invalid_argument("rotation must be dim x dim");
    }

    static Scalar base_at(BaseKind kind, const Vector<Scalar>& z) {
        const Scalar off = Scalar(base_optimum_coordinate(kind));
        if (off == Scalar(0)) return evaluate_base(kind, z);
        return evaluate_base(kind, (z.array() + off).matrix());
    }

    Scalar core(const Vector<Scalar>& z) const {
        if (category_ != Category::composition) {
            if (blocks_.size() == 1) return base_at(blocks_.front().kind, z);
            Scalar s(0);
            for (const auto& b : blocks_) s += base_at(b.kind, z.segment(b.start, b.size).eval());
            return s;
        }

        using std::exp;
        using std::sqrt;
        const std::size_t n = components_.size();
        std::vector<Scalar> values(n), weights(n);
        Scalar total(0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& c = components_[i];
            const Vector<Scalar> zi = z - c.optimum;
            const Scalar d2 = zi.squaredNorm();
            values[i] = c.lambda * base_at(c.kind, zi) + c.bias;
            if (d2 == Scalar(0)) return values[i];
            weights[i] = exp(-d2 / (Scalar(2) * Scalar(dim()) * c.sigma * c.sigma)) / sqrt(d2);
            total += weights[i];
        }
        Scalar s(0);
        if (total == Scalar(0)) {
            for (std::size_t i = 0; i < n; ++i) s += values[i];
            return s / Scalar(n);
        }
        for (std::size_t i = 0; i < n; ++i) s += weights[i] / total * values[i];
        return s;
    }

    int id_;
    Category category_;
    Vector<Scalar> shift_;
    Matrix<Scalar> rotation_;
    Scalar bias_;
    std::vector<Block> blocks_;
    std::vector<Component> components_;
};

template <typename Scalar>
Scalar evaluate(const ObjectiveFunction<Scalar>& f, const Vector<Scalar>& x) {
    return f.evaluate(x);
}

template <typename Scalar>
Scalar optimum_value(const ObjectiveFunction<Scalar>& f) {
    return f.optimum_value();
}

template <typename Scalar = double>
struct Suite {
    std::uint64_t seed = 0;
    Index dim = 0;
    std::vector<ObjectiveFunction<Scalar>> functions;

    const ObjectiveFunction<Scalar>& by_id(int id) const {
        for (const auto& f : functions)
            if (f.id() == id) return f;
        throw NotFound("no function with id " + std::to_string(id));
    }
};

namespace detail {

struct HybridRecipe {
    std::array<BaseKind, 3> kinds;
    std::array<double, 3> shares;
    int count;
};

struct ComponentRecipe {
    BaseKind kind;
    double sigma;
    double lambda;
};

inline constexpr std::array<BaseKind, 3> kUnimodal = {BaseKind::bent_cigar, BaseKind::sphere,
                                                      BaseKind::zakharov};

inline constexpr std::array<BaseKind, 7> kMultimodal = {
    BaseKind::rosenbrock, BaseKind::rastrigin, BaseKind::ackley,     BaseKind::griewank,
    BaseKind::levy,       BaseKind::schwefel,  BaseKind::weierstrass,
};

inline constexpr std::array<HybridRecipe, 10> kHybrids = {{
    {{BaseKind::zakharov, BaseKind::rosenbrock, BaseKind::rastrigin}, {0.2, 0.4, 0.4}, 3},
    {{BaseKind::bent_cigar, BaseKind::rosenbrock, BaseKind::levy}, {0.3, 0.3, 0.4}, 3},
    {{BaseKind::bent_cigar, BaseKind::rosenbrock, BaseKind::schwefel}, {0.3, 0.3, 0.4}, 3},
    {{BaseKind::sphere, BaseKind::ackley, BaseKind::sphere}, {0.5, 0.5, 0.0}, 2},
    {{BaseKind::bent_cigar, BaseKind::griewank, BaseKind::sphere}, {0.4, 0.6, 0.0}, 2},
    {{BaseKind::rastrigin, BaseKind::schwefel, BaseKind::sphere}, {0.5, 0.5, 0.0}, 2},
    {{BaseKind::weierstrass, BaseKind::rastrigin, BaseKind::sphere}, {0.2, 0.4, 0.4}, 3},
    {{BaseKind::bent_cigar, BaseKind::ackley, BaseKind::rastrigin}, {0.2, 0.3, 0.5}, 3},
    {{BaseKind::griewank, BaseKind::levy, BaseKind::rosenbrock}, {0.3, 0.3, 0.4}, 3},
    {{BaseKind::zakharov, BaseKind::schwefel, BaseKind::sphere}, {0.4, 0.6, 0.0}, 2},
}};

inline constexpr std::array<std::array<ComponentRecipe, 3>, 9> kCompositions = {{
    {{{BaseKind::rastrigin, 10, 1}, {BaseKind::griewank, 20, 10}, {BaseKind::schwefel, 30, 1}}},
    {{{BaseKind::rosenbrock, 10, 1}, {BaseKind::bent_cigar, 20, 1e-6}, {BaseKind::rastrigin, 30, 1}}},
    {{{BaseKind::levy, 10, 1}, {BaseKind::ackley, 20, 10}, {BaseKind::rastrigin, 30, 1}}},
    {{{BaseKind::ackley, 10, 10}, {BaseKind::sphere, 20, 1}, {BaseKind::griewank, 30, 10}}},
    {{{BaseKind::schwefel, 10, 1}, {BaseKind::rastrigin, 20, 1}, {BaseKind::bent_cigar, 30, 1e-6}}},
    {{{BaseKind::weierstrass, 10, 1}, {BaseKind::levy, 20, 1}, {BaseKind::sphere, 30, 1}}},
    {{{BaseKind::griewank, 10, 10}, {BaseKind::rosenbrock, 20, 1}, {BaseKind::ackley, 30, 10}}},
    {{{BaseKind::rastrigin, 10, 1}, {BaseKind::weierstrass, 20, 1}, {BaseKind::schwefel, 30, 1}}},
    {{{BaseKind::sphere, 10, 1}, {BaseKind::schwefel, 20, 1}, {BaseKind::levy, 30, 1}}},
}};

// Contiguous block sizes from shares; every block gets at least one coordinate.
inline std::vector<Index> block_sizes(const HybridRecipe& r, Index dim) {
    const int n = static_cast<int>(std::min<Index>(r.count, dim));
    std::vector<Index> sizes(n, 1);
    Index used = 0;
    for (int b = 0; b + 1 < n; ++b) {
        sizes[b] = std::max<Index>(1, static_cast<Index>(std::floor(r.shares[b] * double(dim))));
        used += sizes[b];
    }
    // Leave room for the last block.
    for (int b = n - 2; b >= 0 && used > dim - 1; --b) {
        const Index cut = std::min(sizes[b] - 1, used - (dim - 1));
        sizes[b] -= cut;
        used -= cut;
    }
    sizes[n - 1] = dim - used;
    return sizes;
}

}  // namespace detail

inline constexpr int kSuiteSize = 29;
inline constexpr double kShiftRange = 80.0;

/// Builds the seeded 29-function suite: 3 unimodal, 7 multimodal, 10 hybrid and
/// 9 composition functions with ids 1..29 and bias 100·id.
template <typename Scalar = double>
Suite<Scalar> make_suite(std::uint64_t seed, Index dim) {
    if (dim < 2) throw InvalidDimension("make_suite: dim must be >= 2, got " + std::to_string(dim));

    Suite<Scalar> suite;
    suite.seed = seed;
    suite.dim = dim;
    suite.functions.reserve(kSuiteSize);
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(dim)));

    auto draw_point = [&]() {
        Vector<Scalar> v(dim);
        for (Index i = 0; i < dim; ++i) v(i) = Scalar(rng.uniform(-kShiftRange, kShiftRange));
        return v;
    };

    int id = 1;
    auto next_frame = [&]() {
        Vector<Scalar> shift = draw_point();
        Matrix<Scalar> rot = random_rotation<Scalar>(rng.next(), dim);
        const Scalar bias = Scalar(100 * id);
        return std::make_tuple(std::move(shift), std::move(rot), bias);
    };

    for (BaseKind kind : detail::kUnimodal) {
        auto [shift, rot, bias] = next_frame();
        suite.functions.push_back(
            ObjectiveFunction<Scalar>::single(id++, Category::unimodal, kind, shift, rot, bias));
    }
    for (BaseKind kind : detail::kMultimodal) {
        auto [shift, rot, bias] = next_frame();
        suite.functions.push_back(
            ObjectiveFunction<Scalar>::single(id++, Category::multimodal, kind, shift, rot, bias));
    }
    for (const auto& recipe : detail::kHybrids) {
        auto [shift, rot, bias] = next_frame();
        std::vector<typename ObjectiveFunction<Scalar>::Block> blocks;
        Index start = 0;
        const auto sizes = detail::block_sizes(recipe, dim);
        for (std::size_t b = 0; b < sizes.size(); ++b) {
            blocks.push_back({recipe.kinds[b], start, sizes[b]});
            start += sizes[b];
        }
        suite.functions.push_back(ObjectiveFunction<Scalar>::hybrid(id++, blocks, shift, rot, bias));
    }
    for (const auto& recipe : detail::kCompositions) {
        auto [shift, rot, bias] = next_frame();
        std::vector<typename ObjectiveFunction<Scalar>::Component> comps;
        const Scalar component_bias[] = {Scalar(0), Scalar(100), Scalar(200)};
        for (std::size_t c = 0; c < recipe.size(); ++c) {
            Vector<Scalar> opt = c == 0 ? Vector<Scalar>::Zero(dim) : draw_point();
            comps.push_back({recipe[c].kind, std::move(opt), Scalar(recipe[c].sigma),
                             Scalar(recipe[c].lambda), component_bias[c]});
        }
        suite.functions.push_back(ObjectiveFunction<Scalar>::composition(id++, comps, shift, rot, bias));
    }
    return suite;
}

}  // namespace invbench
