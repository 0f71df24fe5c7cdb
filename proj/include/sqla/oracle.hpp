#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sqla/dense.hpp"
#include "sqla/svd.hpp"

// Dense brute-force references. Nothing here touches the weight trees, the samplers or the
// parallel kernels, so the oracles stay independent of the code they check.
namespace sqla {
struct PcaResult;
}

namespace sqla::oracle {

/// Pairwise (cascade) summation.
double pairwise_sum(std::span<const double> x);

double exact_dot(std::span<const double> x, std::span<const double> y);
/// V w for V (n x k) and w of length k.
DenseVector exact_matvec(const DenseMatrix& v, std::span<const double> w);
double exact_frobenius(const DenseMatrix& a);

/// Thin SVD through Eigen's divide-and-conquer routine. Requires min(m, n) <= 512.
SvdResult exact_svd(const DenseMatrix& a);
std::vector<double> exact_singular_values(const DenseMatrix& a);

/// |u - (1/n) sum_i V_{i,*}|^2.
double exact_centroid_distance(const DenseMatrix& v, std::span<const double> u);
/// C(V, w) = sum_i |w_i V_{*,i}|^2 / |Vw|^2; throws ZeroImage when Vw = 0.
double exact_C(const DenseMatrix& v, std::span<const double> w);
/// |A - A_r|_F^2 = sum of the squared singular values beyond the r-th.
double exact_low_rank_error(const DenseMatrix& a, std::size_t r);

/// p_i = x_i^2 / |x|^2.
std::vector<double> l2_distribution(std::span<const double> x);
/// Total variation distance between empirical counts and a probability vector.
double tv_distance(std::span<const std::size_t> counts, std::span<const double> probs);

/// Eigenvector diagnostics for a PCA run against the dense SVD of A.
struct EigvecDiagnostics {
  std::vector<double> error;    // min over sign of |v_hat_i -+ v_i|
  std::vector<double> overlap;  // <v_i, v_hat_i>^2
  double subspace = 0.0;        // |V_hat_k^T V_k|_F^2
  std::vector<double> sigma_sq;  // exact sigma_i^2 for i <= k
};

/// Builds v_hat_i = S^T U_hat_{*,i} / sigma_hat_i densely from A and the description.
EigvecDiagnostics eigvec_error_oracle(const DenseMatrix& a, const PcaResult& res);

/// A = sum_i s_i u_i v_i^T + noise G with Haar-like orthonormal factors (QR of Gaussian matrices)
/// and G standard Gaussian.
DenseMatrix planted_matrix(std::size_t rows, std::size_t cols, std::span<const double> spectrum,
                           double noise, std::uint64_t seed);

/// Matrix with orthonormal columns from the QR factorization of a Gaussian matrix.
DenseMatrix random_orthonormal(std::size_t rows, std::size_t cols, std::uint64_t seed);

}  // namespace sqla::oracle
