#pragma once

#include "invbench/types.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string_view>

namespace invbench {

/// Classic test-function formulas in their textbook coordinates.
///
/// Each formula has a known minimiser (see base_optimum_coordinate) where it
/// evaluates to exactly zero. The suite feeds them `z + optimum` so that its
/// own optimum sits at z = 0.
enum class BaseKind {
    sphere,
    bent_cigar,
    zakharov,
    rastrigin,
    ackley,
    griewank,
    levy,
    schwefel,
    rosenbrock,
    weierstrass,
};

inline constexpr std::array<BaseKind, 10> kAllBaseKinds = {
    BaseKind::sphere,   BaseKind::bent_cigar, BaseKind::zakharov, BaseKind::rastrigin,
    BaseKind::ackley,   BaseKind::griewank,   BaseKind::levy,     BaseKind::schwefel,
    BaseKind::rosenbrock, BaseKind::weierstrass,
};

inline std::string_view to_string(BaseKind kind) {
    switch (kind) {
        case BaseKind::sphere: return "sphere";
        case BaseKind::bent_cigar: return "bent-cigar";
        case BaseKind::zakharov: return "zakharov";
        case BaseKind::rastrigin: return "rastrigin";
        case BaseKind::ackley: return "ackley";
        case BaseKind::griewank: return "griewank";
        case BaseKind::levy: return "levy";
        case BaseKind::schwefel: return "schwefel";
        case BaseKind::rosenbrock: return "rosenbrock";
        case BaseKind::weierstrass: return "weierstrass-lite";
    }
    return "unknown";
}

/// Location of the textbook minimiser, identical in every coordinate.
inline double base_optimum_coordinate(BaseKind kind) {
    switch (kind) {
        case BaseKind::levy:
        case BaseKind::rosenbrock: return 1.0;
        case BaseKind::schwefel: return 420.9687462275036;
        default: return 0.0;
    }
}

namespace detail {

inline constexpr int kWeierstrassTerms = 8;

template <typename Scalar>
Scalar weierstrass_term(Scalar y) {
    using std::cos;
    Scalar s(0);
    Scalar ak(1), bk(1);
    for (int k = 0; k <= kWeierstrassTerms; ++k) {
        s += ak * cos(Scalar(2) * std::numbers::pi_v<Scalar> * bk * (y + Scalar(0.5)));
        ak *= Scalar(0.5);
        bk *= Scalar(3);
    }
    return s;
}

// Schwefel 2.26 kernel with the usual reflection beyond |y| > 500.
template <typename Scalar>
Scalar schwefel_kernel(Scalar y, Index dim) {
    using std::abs;
    using std::fmod;
    using std::sin;
    using std::sqrt;
    const Scalar edge(500);
    if (y > edge) {
        const Scalar r = edge - fmod(y, edge);
        return r * sin(sqrt(abs(r))) - (y - edge) * (y - edge) / (Scalar(10000) * Scalar(dim));
    }
    if (y < -edge) {
        const Scalar r = fmod(abs(y), edge) - edge;
        return r * sin(sqrt(abs(r))) - (y + edge) * (y + edge) / (Scalar(10000) * Scalar(dim));
    }
    return y * sin(sqrt(abs(y)));
}

}  // namespace detail

template <typename Derived>
typename Derived::Scalar sphere(const Eigen::MatrixBase<Derived>& z) {
    return z.squaredNorm();
}

template <typename Derived>
typename Derived::Scalar bent_cigar(const Eigen::MatrixBase<Derived>& z) {
    using Scalar = typename Derived::Scalar;
    if (z.size() == 0) return Scalar(0);
    return z(0) * z(0) + Scalar(1e6) * z.tail(z.size() - 1).squaredNorm();
}

template <typename Derived>
typename Derived::Scalar zakharov(const Eigen::MatrixBase<Derived>& z) {
    using Scalar = typename Derived::Scalar;
    Scalar sq(0), lin(0);
    for (Index i = 0; i < z.size(); ++i) {
        sq += z(i) * z(i);
        lin += Scalar(0.5) * Scalar(i + 1) * z(i);
    }
    const Scalar lin2 = lin * lin;
    return sq + lin2 + lin2 * lin2;
}

template <typename Derived>
typename Derived::Scalar rastrigin(const Eigen::MatrixBase<Derived>& z) {
    using Scalar = typename Derived::Scalar;
    using std::cos;
    Scalar s(0);
    for (Index i = 0; i < z.size(); ++i)
        s += z(i) * z(i) - Scalar(10) * cos(Scalar(2) * std::numbers::pi_v<Scalar> * z(i)) + Scalar(10);
    return s;
}

template <typename Derived>
typename Derived::Scalar ackley(const Eigen::MatrixBase<Derived>& z) {
    using Scalar = typename Derived::Scalar;
    using std::cos;
    using std::exp;
    using std::sqrt;
    if (z.size() == 0) return Scalar(0);
    const Scalar n = Scalar(z.size());
    Scalar cs(0);
    for (Index i = 0; i < z.size(); ++i) cs += cos(Scalar(2) * std::numbers::pi_v<Scalar> * z(i));
    const Scalar v = -Scalar(20) * exp(-Scalar(0.2) * sqrt(z.squaredNorm() / n)) - exp(cs / n) +
                     Scalar(20) + std::numbers::e_v<Scalar>;
    // exp(0) terms cancel to within an ulp of 20; snap that residue to zero.
    return v < Scalar(0) ? Scalar(0) : v;
}

template <typename Derived>
typename Derived::Scalar griewank(const Eigen::MatrixBase<Derived>& z) {
    using Scalar = typename Derived::Scalar;
    using std::cos;
    using std::sqrt;
    Scalar s(0), p(1);
    for (Index i = 0; i < z.size(); ++i) {
        s += z(i) * z(i);
        p *= cos(z(i) / sqrt(Scalar(i + 1)));
    }
    return s / Scalar(4000) - p + Scalar(1);
}

/// Levy function, minimum at (1, ..., 1).
template <typename Derived>
typename Derived::Scalar levy(const Eigen::MatrixBase<Derived>& z) {
    using Scalar = typename Derived::Scalar;
    using std::sin;
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    const Index n = z.size();
    if (n == 0) return Scalar(0);
    auto w = [&](Index i) { return Scalar(1) + (z(i) - Scalar(1)) / Scalar(4); };
    const Scalar s0 = sin(pi * w(0));
    Scalar s = s0 * s0;
    for (Index i = 0; i + 1 < n; ++i) {
        const Scalar wi = w(i);
        const Scalar si = sin(pi * wi + Scalar(1));
        s += (wi - Scalar(1)) * (wi - Scalar(1)) * (Scalar(1) + Scalar(10) * si * si);
    }
    const Scalar wn = w(n - 1);
    const Scalar sn = sin(Scalar(2) * pi * wn);
    s += (wn - Scalar(1)) * (wn - Scalar(1)) * (Scalar(1) + sn * sn);
    return s;
}

/// Schwefel 2.26, minimum at (420.9687..., ...), offset so that it is zero there.
template <typename Derived>
typename Derived::Scalar schwefel(const Eigen::MatrixBase<Derived>& z) {
    using Scalar = typename Derived::Scalar;
    const Scalar c = Scalar(base_optimum_coordinate(BaseKind::schwefel));
    const Index n = z.size();
    const Scalar peak = detail::schwefel_kernel(c, n);
    Scalar s(0);
    for (Index i = 0; i < n; ++i) s += peak - detail::schwefel_kernel(z(i), n);
    return s;
}

/// Rosenbrock, minimum at (1, ..., 1).
template <typename Derived>
typename Derived::Scalar rosenbrock(const Eigen::MatrixBase<Derived>& z) {
    using Scalar = typename Derived::Scalar;
    Scalar s(0);
    for (Index i = 0; i + 1 < z.size(); ++i) {
        const Scalar a = z(i + 1) - z(i) * z(i);
        const Scalar b = z(i) - Scalar(1);
        s += Scalar(100) * a * a + b * b;
    }
    return s;
}

/// Weierstrass with a truncated series (a = 0.5, b = 3, 9 terms).
template <typename Derived>
typename Derived::Scalar weierstrass(const Eigen::MatrixBase<Derived>& z) {
    using Scalar = typename Derived::Scalar;
    const Scalar at_zero = detail::weierstrass_term(Scalar(0));
    Scalar s(0);
    for (Index i = 0; i < z.size(); ++i) s += detail::weierstrass_term(z(i)) - at_zero;
    return s;
}

template <typename Derived>
typename Derived::Scalar evaluate_base(BaseKind kind, const Eigen::MatrixBase<Derived>& z) {
    switch (kind) {
        case BaseKind::sphere: return sphere(z);
        case BaseKind::bent_cigar: return bent_cigar(z);
        case BaseKind::zakharov: return zakharov(z);
        case BaseKind::rastrigin: return rastrigin(z);
        case BaseKind::ackley: return ackley(z);
        case BaseKind::griewank: return griewank(z);
        case BaseKind::levy: return levy(z);
        case BaseKind::schwefel: return schwefel(z);
        case BaseKind::rosenbrock: return rosenbrock(z);
        case BaseKind::weierstrass: return weierstrass(z);
    }
    throw std::logic_error("unknown base function");
}

}  // namespace invbench
