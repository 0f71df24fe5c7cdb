#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sqla/dense.hpp"
#include "sqla/sq_matrix.hpp"

namespace sqla {

struct LowRankParams {
  double sigma = 1.0;    // singular value threshold
  double epsilon = 0.1;  // error parameter
  double delta = 0.1;    // failure probability
  std::optional<std::size_t> q_override;
  double theta_constant = 1.0;
  /// Builds the literal q x q column-normalized submatrix W instead of merging repeated columns.
  bool literal_w = false;
};

/// Implicit low-rank approximation D = A Vh Vh^T with Vh = S^T U_hat diag(sigma_hat)^{-1}.
/// S (q x n) is never stored: row r of S is A_{i_r,*} scaled by row_scale[r].
struct LowRankDescription {
  std::size_t source_rows = 0;
  std::size_t cols = 0;
  double frobenius_norm = 0.0;
  std::vector<std::size_t> row_indices;  // 1-based i_1..i_q
  std::vector<std::size_t> col_indices;  // 1-based j_1..j_q
  std::vector<double> row_scale;         // |A|_F / (sqrt(q) |A_{i_r,*}|)
  DenseMatrix u_hat;                     // q x l, orthonormal columns
  DenseVector sigma_hat;                 // l values, nonincreasing, all > threshold

  std::size_t q() const { return row_indices.size(); }
  std::size_t rank() const { return sigma_hat.size(); }
};

/// q = ceil(theta K^4 / eps^2 ln(1/delta)) with K = |A|_F^2 / sigma^2, unless overridden.
/// Throws InvalidEpsilon when no override is given and eps lies outside
/// (0, sqrt(sigma / |A|_F) / 4].
std::size_t sample_count(const LowRankParams& params, double frobenius_norm);

/// Two-stage length-squared subsampling followed by an SVD of the small matrix W; keeps the
/// left singular vectors whose singular value is strictly above params.sigma.
LowRankDescription low_rank_approx(const MatrixAccess& a, const LowRankParams& params, Rng& rng);

/// SQ access to S: the row-norm sampler is uniform over [q] since every row of S has norm
/// |A|_F / sqrt(q); row sampling and queries delegate to the rows of A.
class RowSampledMatrix final : public MatrixAccess {
 public:
  RowSampledMatrix(std::shared_ptr<const MatrixAccess> a, const LowRankDescription& desc);

  std::size_t rows() const override { return rows_.size(); }
  std::size_t cols() const override { return a_->cols(); }
  double query(std::size_t r, std::size_t j) const override;
  void query_column(std::span<const std::size_t> rows, std::size_t j,
                    std::span<double> out) const override;
  std::size_t sample_row(Rng& rng) const override;
  std::size_t sample_in_row(std::size_t r, Rng& rng) const override;
  double row_norm(std::size_t r) const override;
  double frobenius_norm() const override;

 private:
  void check_row(std::size_t r) const;

  std::shared_ptr<const MatrixAccess> a_;
  std::vector<std::size_t> rows_;
  std::vector<double> scale_;
  double row_norm_;
  double frobenius_;
};

std::shared_ptr<const RowSampledMatrix> sq_access_to_s(std::shared_ptr<const MatrixAccess> a,
                                                       const LowRankDescription& desc);

/// Dense S (q x n) from the description.
DenseMatrix materialize_s(const DenseMatrix& a, const LowRankDescription& desc);
/// Dense Vh = S^T U_hat diag(sigma_hat)^{-1} (n x l). Throws SingularSigma on a zero value.
DenseMatrix materialize_v_hat(const DenseMatrix& a, const LowRankDescription& desc);
/// Dense D = A Vh Vh^T; the zero matrix when l = 0.
DenseMatrix reconstruct_d_dense(const DenseMatrix& a, const LowRankDescription& desc);

/// Stores the description as consecutive SQM1 blocks: a 1 x 5 header
/// [q, l, cols, |A|_F, source rows], row indices, column indices, row scales (each 1 x q),
/// U_hat (q x l) and sigma_hat (1 x l).
void save_description(const std::string& path, const LowRankDescription& desc);
LowRankDescription load_description(const std::string& path);

}  // namespace sqla
