#pragma once

#include <vector>

#include <Eigen/Core>

#include "hodgelab/error.hpp"

namespace hodgelab::lapackb {

// Hermitian eigensolve (ascending). A must be Hermitian; when vectors is true,
// A is overwritten with orthonormal eigenvector columns.
std::vector<double> heig(Eigen::MatrixXcd& A, bool vectors);

// Generalized A x = lambda B x with A Hermitian and B positive definite.
// Eigenvalues ascending; A is overwritten with B-orthonormal eigenvectors
// (z^H B z = I) when vectors is true. B is destroyed.
std::vector<double> gheig(Eigen::MatrixXcd& A, Eigen::MatrixXcd& B, bool vectors);

// In-place lower Cholesky; false if the matrix is not positive definite.
bool cholesky_lower(Eigen::MatrixXcd& A);

struct SvdResult {
    Eigen::MatrixXcd U, Vh;
    Eigen::VectorXd sigma;
};
// full=true gives square U (m x m) and Vh (n x n); otherwise the thin forms.
SvdResult svd(const Eigen::MatrixXcd& A, bool full);

// X = A^{-1} B via LU with partial pivoting; throws on singular A.
Eigen::MatrixXcd lu_solve(Eigen::MatrixXcd A, Eigen::MatrixXcd B);

} // namespace hodgelab::lapackb
