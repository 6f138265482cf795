#pragma once

#include "invbench/objective.hpp"
#include "invbench/rng.hpp"
#include "invbench/types.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace invbench {

enum class AlgorithmId { random_search, de_rand_1_bin, shade, pso2011 };

inline std::string_view to_string(AlgorithmId id) {
    switch (id) {
        case AlgorithmId::random_search: return "random_search";
        case AlgorithmId::de_rand_1_bin: return "de_rand_1_bin";
        case AlgorithmId::shade: return "shade";
        case AlgorithmId::pso2011: return "pso2011";
    }
    return "unknown";
}

inline AlgorithmId parse_algorithm(std::string_view s) {
    for (auto id : {AlgorithmId::random_search, AlgorithmId::de_rand_1_bin, AlgorithmId::shade,
                    AlgorithmId::pso2011})
        if (to_string(id) == s) return id;
    throw InvalidConfig("unknown algorithm '" + std::string(s) + "'");
}

/// Tunables for every built-in algorithm. Defaults are the usual literature settings.
struct AlgorithmParams {
    double de_f = 0.5;
    double de_cr = 0.9;
    int shade_memory = 20;
    double shade_p = 0.11;
    double pso_w = 1.0 / (2.0 * std::log(2.0));
    double pso_c = 0.5 + std::log(2.0);
    int pso_informants = 3;
};

template <typename Scalar>
struct Population {
    Matrix<Scalar> positions;  // agents x dim, one individual per row
    Vector<Scalar> fitness;

    Index agents() const { return positions.rows(); }
    Index dim() const { return positions.cols(); }
};

/// Base class for population-based optimizers advanced one generation at a time.
///
/// The evaluation budget is owned by the caller: `step` is told how many
/// evaluations remain and never exceeds min(agents, remaining). Every
/// evaluation goes through `evaluate`, which maintains the best-so-far pair
/// (strict improvement, first found wins).
template <typename Scalar = double>
class Optimizer {
public:
    Optimizer(AlgorithmId id, Bounds<Scalar> bounds, Index dim, Index agents, std::uint64_t seed)
        : id_(id), bounds_(bounds), dim_(dim), agents_(agents), rng_(seed) {
        if (dim < 1) throw InvalidConfig("optimizer dimension must be >= 1");
        if (agents < 1) throw InvalidConfig("optimizer needs at least one agent");
        if (!(bounds.lower < bounds.upper)) throw InvalidConfig("empty search bounds");
    }
    virtual ~Optimizer() = default;
    Optimizer(const Optimizer&) = delete;
    Optimizer& operator=(const Optimizer&) = delete;

    AlgorithmId algorithm() const { return id_; }
    const Bounds<Scalar>& bounds() const { return bounds_; }
    Index dim() const { return dim_; }
    Index agents() const { return agents_; }
    bool initialized() const { return initialized_; }

    const Population<Scalar>& population() const { return pop_; }
    Population<Scalar>& population() { return pop_; }
    Rng& rng() { return rng_; }

    const Vector<Scalar>& best_position() const { return best_x_; }
    Scalar best_value() const { return best_f_; }
    std::pair<Vector<Scalar>, Scalar> best() const { return {best_x_, best_f_}; }

    /// Uniform random population; consumes `agents` evaluations.
    long initialize(const Objective<Scalar>& f) {
        if (f.dim() != dim_) throw std::invalid_argument("objective dimension does not match optimizer");
        pop_.positions.resize(agents_, dim_);
        pop_.fitness.resize(agents_);
        for (Index i = 0; i < agents_; ++i)
            for (Index j = 0; j < dim_; ++j) pop_.positions(i, j) = Scalar(rng_.uniform(bounds_.lower, bounds_.upper));
        for (Index i = 0; i < agents_; ++i) pop_.fitness(i) = evaluate(f, pop_.positions.row(i).transpose());
        initialized_ = true;
        after_initialize(f);
        return agents_;
    }

    /// One generation. Returns the number of evaluations consumed.
    long step(const Objective<Scalar>& f, long remaining_budget) {
        if (remaining_budget <= 0) throw BudgetExhausted("step called with no remaining budget");
        if (!initialized_) throw std::logic_error("step called before initialize");
        const long cap = std::min<long>(static_cast<long>(agents_), remaining_budget);
        return advance(f, cap);
    }

    /// Records an externally evaluated point against best-so-far.
    void offer(const Vector<Scalar>& x, Scalar fx) {
        if (!has_best_ || fx < best_f_) {
            best_x_ = x;
            best_f_ = fx;
            has_best_ = true;
        }
    }

    /// Notification that an operator overwrote row `i` of the population.
    virtual void on_replaced(Index /*i*/) {}

protected:
    virtual void after_initialize(const Objective<Scalar>& /*f*/) {}
    virtual long advance(const Objective<Scalar>& f, long max_evaluations) = 0;

    Scalar evaluate(const Objective<Scalar>& f, const Vector<Scalar>& x) {
        const Scalar v = f(x);
        offer(x, v);
        return v;
    }

    void clamp(Vector<Scalar>& x) const {
        x = x.cwiseMax(bounds_.lower).cwiseMin(bounds_.upper);
    }

    // Indices sorted by fitness ascending, ties by index.
    std::vector<Index> fitness_order() const {
        std::vector<Index> idx(static_cast<std::size_t>(agents_));
        std::iota(idx.begin(), idx.end(), Index(0));
        std::stable_sort(idx.begin(), idx.end(),
                         [&](Index a, Index b) { return pop_.fitness(a) < pop_.fitness(b); });
        return idx;
    }

    AlgorithmId id_;
    Bounds<Scalar> bounds_;
    Index dim_;
    Index agents_;
    Rng rng_;
    Population<Scalar> pop_;

private:
    Vector<Scalar> best_x_;
    Scalar best_f_ = Scalar(0);
    bool has_best_ = false;
    bool initialized_ = false;
};

/// Resamples the first n individuals uniformly each generation.
template <typename Scalar = double>
class RandomSearch final : public Optimizer<Scalar> {
public:
    RandomSearch(Bounds<Scalar> b, Index dim, Index agents, std::uint64_t seed)
        : Optimizer<Scalar>(AlgorithmId::random_search, b, dim, agents, seed) {}

protected:
    long advance(const Objective<Scalar>& f, long n) override {
        auto& pop = this->pop_;
        Matrix<Scalar> batch(this->agents_, this->dim_);
        for (Index i = 0; i < this->agents_; ++i)
            for (Index j = 0; j < this->dim_; ++j)
                batch(i, j) = Scalar(this->rng_.uniform(this->bounds_.lower, this->bounds_.upper));
        for (Index i = 0; i < n; ++i) {
            pop.positions.row(i) = batch.row(i);
            pop.fitness(i) = this->evaluate(f, batch.row(i).transpose());
        }
        return n;
    }
};

namespace detail {

// Draws `count` distinct indices from [0, n) excluding `exclude`.
inline void distinct_indices(Rng& rng, std::size_t n, std::initializer_list<std::size_t> exclude,
                             std::size_t* out, std::size_t count) {
    for (std::size_t k = 0; k < count; ++k) {
        std::size_t r;
        bool clash;
        do {
            r = rng.index(n);
            clash = std::find(exclude.begin(), exclude.end(), r) != exclude.end() ||
                    std::find(out, out + k, r) != out + k;
        } while (clash);
        out[k] = r;
    }
}

}  // namespace detail

/// Canonical DE/rand/1/bin with synchronous generational selection.
template <typename Scalar = double>
class DeRand1Bin final : public Optimizer<Scalar> {
public:
    DeRand1Bin(Bounds<Scalar> b, Index dim, Index agents, std::uint64_t seed, double f = 0.5, double cr = 0.9)
        : Optimizer<Scalar>(AlgorithmId::de_rand_1_bin, b, dim, agents, seed), f_(f), cr_(cr) {
        if (agents < 4) throw InvalidConfig("DE/rand/1/bin needs at least 4 agents");
    }

protected:
    long advance(const Objective<Scalar>& f, long n) override {
        auto& pop = this->pop_;
        auto& rng = this->rng_;
        const Index np = this->agents_, d = this->dim_;
        Matrix<Scalar> trials(np, d);
        for (Index i = 0; i < np; ++i) {
            std::size_t r[3];
            detail::distinct_indices(rng, std::size_t(np), {std::size_t(i)}, r, 3);
            const Index jrand = Index(rng.index(std::size_t(d)));
            Vector<Scalar> u = pop.positions.row(i).transpose();
            for (Index j = 0; j < d; ++j) {
                if (rng.uniform() < cr_ || j == jrand)
                    u(j) = pop.positions(Index(r[0]), j) +
                           Scalar(f_) * (pop.positions(Index(r[1]), j) - pop.positions(Index(r[2]), j));
            }
            this->clamp(u);
            trials.row(i) = u.transpose();
        }
        for (Index i = 0; i < n; ++i) {
            const Scalar fu = this->evaluate(f, trials.row(i).transpose());
            if (fu <= pop.fitness(i)) {
                pop.positions.row(i) = trials.row(i);
                pop.fitness(i) = fu;
            }
        }
        return n;
    }

private:
    double f_, cr_;
};

/// Success-history based adaptive DE (current-to-pbest/1/bin with archive).
template <typename Scalar = double>
class Shade final : public Optimizer<Scalar> {
public:
    Shade(Bounds<Scalar> b, Index dim, Index agents, std::uint64_t seed, int memory = 20, double p = 0.11)
        : Optimizer<Scalar>(AlgorithmId::shade, b, dim, agents, seed),
          p_(p),
          memory_f_(std::size_t(memory), 0.5),
          memory_cr_(std::size_t(memory), 0.5) {
        if (agents < 4) throw InvalidConfig("SHADE needs at least 4 agents");
        if (memory < 1) throw InvalidConfig("SHADE memory size must be >= 1");
        if (!(p > 0.0 && p <= 1.0)) throw InvalidConfig("SHADE p-best fraction must be in (0, 1]");
    }

    const std::vector<double>& memory_f() const { return memory_f_; }
    const std::vector<double>& memory_cr() const { return memory_cr_; }
    std::size_t archive_size() const { return archive_.size(); }

protected:
    long advance(const Objective<Scalar>& f, long n) override {
        auto& pop = this->pop_;
        auto& rng = this->rng_;
        const Index np = this->agents_, d = this->dim_;
        const std::size_t h = memory_f_.size();

        const auto order = this->fitness_order();
        const std::size_t pbest_count =
            std::max<std::size_t>(2, std::size_t(std::lround(p_ * double(np))));

        Matrix<Scalar> trials(np, d);
        std::vector<double> f_draw(static_cast<std::size_t>(np)), cr_draw(static_cast<std::size_t>(np));
        for (Index i = 0; i < np; ++i) {
            const std::size_t r = rng.index(h);
            const double cr = std::clamp(rng.normal(memory_cr_[r], 0.1), 0.0, 1.0);
            double fi;
            do {
                fi = rng.cauchy(memory_f_[r], 0.1);
            } while (fi <= 0.0);
            fi = std::min(fi, 1.0);
            f_draw[std::size_t(i)] = fi;
            cr_draw[std::size_t(i)] = cr;

            const Index pbest = order[rng.index(std::min<std::size_t>(pbest_count, std::size_t(np)))];
            std::size_t r1;
            detail::distinct_indices(rng, std::size_t(np), {std::size_t(i)}, &r1, 1);
            std::size_t r2;
            detail::distinct_indices(rng, std::size_t(np) + archive_.size(), {std::size_t(i), r1}, &r2, 1);
            auto donor2 = [&](Index j) {
                return r2 < std::size_t(np) ? pop.positions(Index(r2), j) : archive_[r2 - std::size_t(np)](j);
            };

            const Index jrand = Index(rng.index(std::size_t(d)));
            const Scalar F(fi);
            Vector<Scalar> u = pop.positions.row(i).transpose();
            for (Index j = 0; j < d; ++j) {
                if (rng.uniform() < cr || j == jrand) {
                    const Scalar xi = pop.positions(i, j);
                    u(j) = xi + F * (pop.positions(pbest, j) - xi) + F * (pop.positions(Index(r1), j) - donor2(j));
                }
            }
            this->clamp(u);
            trials.row(i) = u.transpose();
        }

        std::vector<double> good_f, good_cr, delta;
        for (Index i = 0; i < n; ++i) {
            const Scalar fu = this->evaluate(f, trials.row(i).transpose());
            const Scalar fi = pop.fitness(i);
            if (fu <= fi) {
                if (fu < fi) {
                    good_f.push_back(f_draw[std::size_t(i)]);
                    good_cr.push_back(cr_draw[std::size_t(i)]);
                    delta.push_back(double(fi - fu));
                    archive_.push_back(pop.positions.row(i).transpose());
                }
                pop.positions.row(i) = trials.row(i);
                pop.fitness(i) = fu;
            }
        }
        while (archive_.size() > std::size_t(np)) archive_.erase(archive_.begin() + std::ptrdiff_t(rng.index(archive_.size())));

        if (!good_f.empty()) {
            const double total = std::accumulate(delta.begin(), delta.end(), 0.0);
            double num_f = 0, den_f = 0, mean_cr = 0;
            for (std::size_t k = 0; k < good_f.size(); ++k) {
                const double w = delta[k] / total;
                num_f += w * good_f[k] * good_f[k];
                den_f += w * good_f[k];
                mean_cr += w * good_cr[k];
            }
            memory_f_[slot_] = num_f / den_f;
            memory_cr_[slot_] = mean_cr;
            slot_ = (slot_ + 1) % h;
        }
        return n;
    }

private:
    double p_;
    std::vector<double> memory_f_;
    std::vector<double> memory_cr_;
    std::size_t slot_ = 0;
    std::vector<Vector<Scalar>> archive_;
};

/// Standard PSO 2011: hypersphere sampling around the centre of gravity of
/// position, personal best and best informant, with an adaptive random
/// topology that is redrawn after any generation without improvement.
template <typename Scalar = double>
class Pso2011 final : public Optimizer<Scalar> {
public:
    Pso2011(Bounds<Scalar> b, Index dim, Index agents, std::uint64_t seed, double w, double c, int informants)
        : Optimizer<Scalar>(AlgorithmId::pso2011, b, dim, agents, seed), w_(w), c_(c), informants_(informants) {
        if (informants < 1) throw InvalidConfig("PSO needs at least one informant per particle");
    }

    const Matrix<Scalar>& velocities() const { return velocity_; }
    const Vector<Scalar>& personal_best_fitness() const { return pbest_f_; }

    void on_replaced(Index i) override {
        const auto& pop = this->pop_;
        if (pop.fitness(i) < pbest_f_(i)) {
            pbest_x_.row(i) = pop.positions.row(i);
            pbest_f_(i) = pop.fitness(i);
        }
    }

protected:
    void after_initialize(const Objective<Scalar>&) override {
        const auto& pop = this->pop_;
        const Index np = this->agents_, d = this->dim_;
        velocity_.resize(np, d);
        for (Index i = 0; i < np; ++i)
            for (Index j = 0; j < d; ++j)
                velocity_(i, j) = Scalar(this->rng_.uniform(double(this->bounds_.lower - pop.positions(i, j)),
                                                            double(this->bounds_.upper - pop.positions(i, j))));
        pbest_x_ = pop.positions;
        pbest_f_ = pop.fitness;
        rebuild_links_ = true;
    }

    long advance(const Objective<Scalar>& f, long n) override {
        auto& pop = this->pop_;
        auto& rng = this->rng_;
        const Index np = this->agents_, d = this->dim_;

        if (rebuild_links_) draw_links();
        const Scalar before = pbest_f_.minCoeff();

        Matrix<Scalar> next_x(np, d), next_v(np, d);
        for (Index i = 0; i < np; ++i) {
            Index best_informant = i;
            for (Index j = 0; j < np; ++j)
                if (links_(j, i) && pbest_f_(j) < pbest_f_(best_informant)) best_informant = j;

            const Vector<Scalar> x = pop.positions.row(i).transpose();
            const Vector<Scalar> p = x + Scalar(c_) * (pbest_x_.row(i).transpose() - x);
            Vector<Scalar> g;
            if (best_informant == i) {
                g = (x + p) / Scalar(2);
            } else {
                const Vector<Scalar> l = x + Scalar(c_) * (pbest_x_.row(best_informant).transpose() - x);
                g = (x + p + l) / Scalar(3);
            }

            const Scalar radius = (g - x).norm();
            Vector<Scalar> dir(d);
            for (Index j = 0; j < d; ++j) dir(j) = Scalar(rng.normal());
            const Scalar len = dir.norm();
            const Scalar r = radius * Scalar(std::pow(rng.uniform(), 1.0 / double(d)));
            const Vector<Scalar> sample = len > Scalar(0) ? (g + (r / len) * dir).eval() : g;

            Vector<Scalar> v = Scalar(w_) * velocity_.row(i).transpose() + sample - x;
            Vector<Scalar> nx = x + v;
            for (Index j = 0; j < d; ++j) {
                if (nx(j) < this->bounds_.lower) {
                    nx(j) = this->bounds_.lower;
                    v(j) = Scalar(0);
                } else if (nx(j) > this->bounds_.upper) {
                    nx(j) = this->bounds_.upper;
                    v(j) = Scalar(0);
                }
            }
            next_x.row(i) = nx.transpose();
            next_v.row(i) = v.transpose();
        }

        for (Index i = 0; i < n; ++i) {
            pop.positions.row(i) = next_x.row(i);
            velocity_.row(i) = next_v.row(i);
            pop.fitness(i) = this->evaluate(f, next_x.row(i).transpose());
            if (pop.fitness(i) < pbest_f_(i)) {
                pbest_x_.row(i) = next_x.row(i);
                pbest_f_(i) = pop.fitness(i);
            }
        }
        rebuild_links_ = !(pbest_f_.minCoeff() < before);
        return n;
    }

private:
    // links_(i, j): particle i informs particle j. Everyone informs itself.
    void draw_links() {
        const Index np = this->agents_;
        links_ = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(np, np, false);
        for (Index i = 0; i < np; ++i) {
            links_(i, i) = true;
            for (int k = 0; k < informants_; ++k) links_(i, Index(this->rng_.index(std::size_t(np)))) = true;
        }
        rebuild_links_ = false;
    }

    double w_, c_;
    int informants_;
    Matrix<Scalar> velocity_;
    Matrix<Scalar> pbest_x_;
    Vector<Scalar> pbest_f_;
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> links_;
    bool rebuild_links_ = true;
};

/// Constructs an optimizer without evaluating anything.
template <typename Scalar = double>
std::unique_ptr<Optimizer<Scalar>> make_optimizer(AlgorithmId id, Bounds<Scalar> bounds, Index dim, Index agents,
                                                  std::uint64_t seed, const AlgorithmParams& params = {}) {
    switch (id) {
        case AlgorithmId::random_search: return std::make_unique<RandomSearch<Scalar>>(bounds, dim, agents, seed);
        case AlgorithmId::de_rand_1_bin:
            return std::make_unique<DeRand1Bin<Scalar>>(bounds, dim, agents, seed, params.de_f, params.de_cr);
        case AlgorithmId::shade:
            return std::make_unique<Shade<Scalar>>(bounds, dim, agents, seed, params.shade_memory, params.shade_p);
        case AlgorithmId::pso2011:
            return std::make_unique<Pso2011<Scalar>>(bounds, dim, agents, seed, params.pso_w, params.pso_c,
                                                     params.pso_informants);
    }
    throw InvalidConfig("unknown algorithm");
}

/// Constructs and initialises; consumes `agents` evaluations of `f`.
template <typename Scalar = double>
std::unique_ptr<Optimizer<Scalar>> init(AlgorithmId id, Bounds<Scalar> bounds, Index dim, Index agents,
                                        std::uint64_t seed, const Objective<Scalar>& f,
                                        const AlgorithmParams& params = {}) {
    auto opt = make_optimizer<Scalar>(id, bounds, dim, agents, seed, params);
    opt->initialize(f);
    return opt;
}

}  // namespace invbench
