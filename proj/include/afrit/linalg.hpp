#pragma once

#include <array>

#include <Eigen/Core>

namespace afrit {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// (M + M^T) / 2.
Mat3 symmetrize(const Mat3& m);

/// True when a Cholesky factorization of the symmetric part succeeds.
bool is_positive_definite(const Mat3& m);

/// Eigenvalues of a symmetric 3x3 matrix in ascending order.
///
/// Cyclic Jacobi rotations; converges quadratically and keeps small
/// eigenvalues accurate relative to the matrix norm, which matters when the
/// spectrum of a covariance spans many decades.
std::array<double, 3> symmetric_eigenvalues(const Mat3& m);

}  // namespace afrit
