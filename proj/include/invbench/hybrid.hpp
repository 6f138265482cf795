#pragma once

#include "invbench/objective.hpp"
#include "invbench/optimizers.hpp"
#include "invbench/rng.hpp"
#include "invbench/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace invbench {

struct HybridConfig {
    double replacement_fraction = 0.1;
    double gamma = 0.5;               // how far past the best the target is placed
    double perturbation_sigma = 0.01;  // jitter sd as a fraction of the box width

    void validate() const {
        if (!(replacement_fraction > 0.0 && replacement_fraction < 1.0))
            throw InvalidConfig("hybrid.fraction must lie in (0, 1)");
        if (!(gamma > 0.0)) throw InvalidConfig("hybrid.gamma must be positive");
        if (!(perturbation_sigma >= 0.0)) throw InvalidConfig("hybrid.sigma must be non-negative");
    }

    /// g = ⌊fraction · agents⌋, required to be at least 1.
    Index replacement_count(Index agents) const {
        validate();
        const auto g = static_cast<Index>(std::floor(replacement_fraction * double(agents)));
        if (g < 1)
            throw InvalidConfig("hybrid operator would replace no individuals with " + std::to_string(agents) +
                                " agents; raise hybrid.fraction or the population size");
        return g;
    }
};

namespace detail {

template <typename Scalar>
Scalar median_of(std::vector<Scalar> v) {
    const std::size_t n = v.size();
    std::sort(v.begin(), v.end());
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / Scalar(2);
}

/// Least-squares fit of each coordinate on fitness, x_j ≈ s_j·f + b_j.
///
/// Fitness enters only as offsets from the population best, so the fit and
/// everything predicted from it is identical under f and f + c.
template <typename Scalar>
struct CalibrationModel {
    Scalar f_best;
    Vector<Scalar> best_position;
    Vector<Scalar> mean_x;
    Vector<Scalar> slope;
    Scalar mean_offset;
    bool degenerate;

    CalibrationModel(const Matrix<Scalar>& positions, const Vector<Scalar>& fitness) {
        const Index n = fitness.size();
        if (n < 2 || positions.rows() != n) throw std::invalid_argument("calibration needs >= 2 individuals");
        Index ibest = 0;
        for (Index i = 1; i < n; ++i)
            if (fitness(i) < fitness(ibest)) ibest = i;
        f_best = fitness(ibest);
        best_position = positions.row(ibest).transpose();

        const Vector<Scalar> d = (fitness.array() - f_best).matrix();
        mean_offset = d.mean();
        mean_x = positions.colwise().mean().transpose();
        const Vector<Scalar> dc = (d.array() - mean_offset).matrix();
        const Scalar sdd = dc.squaredNorm();
        degenerate = !(sdd / Scalar(n) >= Scalar(1e-12));
        slope = degenerate ? Vector<Scalar>::Zero(positions.cols())
                           : Vector<Scalar>((positions.rowwise() - mean_x.transpose()).transpose() * dc / sdd);
    }

    /// Position predicted for a fitness `offset` above the current best.
    Vector<Scalar> predict_offset(Scalar offset) const {
        if (degenerate) return best_position;
        return mean_x + slope * (offset - mean_offset);
    }
};

template <typename Scalar>
void jitter_and_clamp(Vector<Scalar>& x, const Bounds<Scalar>& bounds, double sigma, Rng& rng) {
    if (sigma > 0.0) {
        const double sd = sigma * double(bounds.width());
        for (Index j = 0; j < x.size(); ++j) x(j) += Scalar(sd * rng.normal());
    }
    x = x.cwiseMax(bounds.lower).cwiseMin(bounds.upper);
}

template <typename Scalar>
Scalar target_offset(std::span<const Scalar> fitness, double gamma) {
    const Scalar best = *std::min_element(fitness.begin(), fitness.end());
    std::vector<Scalar> d(fitness.size());
    std::transform(fitness.begin(), fitness.end(), d.begin(), [&](Scalar f) { return f - best; });
    const Scalar med = median_of(std::move(d));
    return -Scalar(gamma) * med;
}

}  // namespace detail

/// f* = f_best − γ·(f_median − f_best).
template <typename Scalar>
Scalar target_fitness(std::span<const Scalar> fitness, double gamma) {
    if (fitness.size() < 2) throw std::invalid_argument("target_fitness needs at least two values");
    const Scalar best = *std::min_element(fitness.begin(), fitness.end());
    const Scalar offset = detail::target_offset(fitness, gamma);
    return offset == Scalar(0) ? best : best + offset;
}

template <typename Scalar>
Scalar target_fitness(const Vector<Scalar>& fitness, double gamma) {
    return target_fitness(std::span<const Scalar>(fitness.data(), std::size_t(fitness.size())), gamma);
}

struct Prediction {
    bool degenerate = false;
};

/// Inverse regression: per coordinate, fit x_j on fitness and read off the
/// position at `f_star`; then jitter and clamp. Falls back to the best
/// position plus jitter when the fitness values carry no spread.
template <typename Scalar>
Vector<Scalar> predict_candidate(const Matrix<Scalar>& positions, const Vector<Scalar>& fitness, Scalar f_star,
                                 const Bounds<Scalar>& bounds, Rng& rng, double perturbation_sigma,
                                 Prediction* info = nullptr) {
    const detail::CalibrationModel<Scalar> model(positions, fitness);
    Vector<Scalar> x = model.predict_offset(f_star - model.f_best);
    detail::jitter_and_clamp(x, bounds, perturbation_sigma, rng);
    if (info) info->degenerate = model.degenerate;
    return x;
}

struct InjectResult {
    long evaluations_used = 0;
    std::vector<Index> replaced;  // slots overwritten, in order
    bool degenerate = false;
};

/// Slots of the g largest fitness values, ties broken by lower index.
template <typename Scalar>
std::vector<Index> worst_indices(const Vector<Scalar>& fitness, Index g) {
    std::vector<Index> idx(std::size_t(fitness.size()));
    std::iota(idx.begin(), idx.end(), Index(0));
    std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return fitness(a) > fitness(b); });
    idx.resize(std::size_t(std::min<Index>(g, fitness.size())));
    return idx;
}

/// Replaces the g worst individuals with predicted candidates, unconditionally.
///
/// Each replacement costs one evaluation; stops early when the budget runs out.
/// Only population rows, their fitness and best-so-far are touched; the
/// optimizer is told about each overwritten slot through on_replaced().
template <typename Scalar>
InjectResult inject(Optimizer<Scalar>& opt, const Objective<Scalar>& f, const HybridConfig& config,
                    long remaining_budget) {
    InjectResult out;
    const Index g = config.replacement_count(opt.agents());
    if (remaining_budget <= 0) return out;

    auto& pop = opt.population();
    const detail::CalibrationModel<Scalar> model(pop.positions, pop.fitness);
    const std::vector<Scalar> fit(pop.fitness.data(), pop.fitness.data() + pop.fitness.size());
    const Scalar offset = detail::target_offset(std::span<const Scalar>(fit), config.gamma);
    out.degenerate = model.degenerate;

    const auto slots = worst_indices(pop.fitness, g);
    for (Index slot : slots) {
        if (out.evaluations_used >= remaining_budget) break;
        Vector<Scalar> x = model.predict_offset(offset);
        detail::jitter_and_clamp(x, opt.bounds(), config.perturbation_sigma, opt.rng());
        const Scalar fx = f(x);
        ++out.evaluations_used;
        opt.offer(x, fx);
        pop.positions.row(slot) = x.transpose();
        pop.fitness(slot) = fx;
        opt.on_replaced(slot);
        out.replaced.push_back(slot);
    }
    return out;
}

}  // namespace invbench
