#pragma once

#include "invbench/rng.hpp"
#include "invbench/types.hpp"

#include <cstdint>

namespace invbench {

/// Haar-distributed random orthonormal matrix, deterministic in (seed, dim).
///
/// QR of a standard-Gaussian matrix, with each column of Q multiplied by the
/// sign of the matching diagonal entry of R.
template <typename Scalar = double>
Matrix<Scalar> random_rotation(std::uint64_t seed, Index dim) {
    if (dim < 1) throw InvalidDimension("random_rotation: dim must be >= 1");
    Rng rng(seed);
    Matrix<Scalar> g(dim, dim);
    for (Index i = 0; i < dim; ++i)
        for (Index j = 0; j < dim; ++j) g(i, j) = Scalar(rng.normal());

    Eigen::HouseholderQR<Matrix<Scalar>> qr(g);
    Matrix<Scalar> q = qr.householderQ();
    const Matrix<Scalar>& r = qr.matrixQR();
    for (Index j = 0; j < dim; ++j)
        if (r(j, j) < Scalar(0)) q.col(j) = -q.col(j);
    return q;
}

/// max |(MᵀM − I)_ij|
template <typename Derived>
typename Derived::Scalar orthonormality_error(const Eigen::MatrixBase<Derived>& m) {
    using Scalar = typename Derived::Scalar;
    const Index n = m.cols();
    return (m.transpose() * m - Matrix<Scalar>::Identity(n, n)).cwiseAbs().maxCoeff();
}

}  // namespace invbench
