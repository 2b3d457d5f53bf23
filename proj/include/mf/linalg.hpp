#pragma once

#include <Eigen/Core>

#include <functional>

namespace mf {

/// Eigenvalues (ascending) of a dense symmetric matrix by cyclic Jacobi
/// rotations. Iterates until the off-diagonal Frobenius norm is below
/// tol * ||A||_F.
Eigen::VectorXd jacobi_eigenvalues(Eigen::MatrixXd a, double tol = 1e-12, int max_sweeps = 60);

inline constexpr Eigen::Index default_jacobi_max_dim = 256;

/// Eigenvalues (ascending) of a dense symmetric matrix: cyclic Jacobi up to
/// `jacobi_max_dim`, Householder tridiagonalization with implicit QL above.
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& a,
                                      Eigen::Index jacobi_max_dim = default_jacobi_max_dim);

/// y = Op x
using LinearOperator = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& y)>;

struct CgResult
{
    Eigen::VectorXd x;
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

/// Conjugate gradient for a symmetric positive (semi)definite operator,
/// started from zero. Stops when ||r|| <= tol * ||rhs||.
CgResult conjugate_gradient(const LinearOperator& op, const Eigen::VectorXd& rhs, double tol,
                            int max_iterations);

} // namespace mf
