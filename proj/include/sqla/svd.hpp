#pragma once

#include "sqla/dense.hpp"

namespace sqla {

/// Thin singular value decomposition W = U diag(sigma) V^T with p = min(m, n) columns in U and V
/// and sigma nonincreasing.
struct SvdResult {
  DenseMatrix u;
  DenseVector sigma;
  DenseMatrix v;
};

/// Thin Householder QR of an m x n matrix with m >= n: Q is m x n with orthonormal columns and R
/// is n x n upper triangular.
struct QrResult {
  DenseMatrix q;
  DenseMatrix r;
};

QrResult householder_qr(const DenseMatrix& a);

/// One-sided Jacobi SVD, preconditioned by a QR factorization when the matrix is tall.
/// Throws ConvergenceFailure if the column pairs are not orthogonal after max_sweeps sweeps.
SvdResult dense_svd(const DenseMatrix& w, int max_sweeps = 60);

}  // namespace sqla
