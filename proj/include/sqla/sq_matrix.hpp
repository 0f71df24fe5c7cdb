#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sqla/dense.hpp"
#include "sqla/sq_vector.hpp"

namespace sqla {

/// SQ(A): sample and query access to every row A_{i,*} plus SQ access to the vector of row
/// norms. All indices are 1-based. Counters on stats() cover every call made through this
/// interface.
class MatrixAccess {
 public:
  virtual ~MatrixAccess() = default;

  virtual std::size_t rows() const = 0;
  virtual std::size_t cols() const = 0;
  virtual double query(std::size_t i, std::size_t j) const = 0;
  /// Fills out[r] = A(rows[r], j). Counts rows.size() queries.
  virtual void query_column(std::span<const std::size_t> rows, std::size_t j,
                            std::span<double> out) const;
  /// Row index i with probability |A_{i,*}|^2 / |A|_F^2.
  virtual std::size_t sample_row(Rng& rng) const = 0;
  /// Column index j with probability A_{ij}^2 / |A_{i,*}|^2.
  virtual std::size_t sample_in_row(std::size_t i, Rng& rng) const = 0;
  virtual double row_norm(std::size_t i) const = 0;
  virtual double frobenius_norm() const = 0;

  const AccessStats& stats() const { return stats_; }

 protected:
  AccessStats stats_;
};

class SqMatrix final : public MatrixAccess {
 public:
  static SqMatrix build(const DenseMatrix& a);

  std::size_t rows() const override { return row_handles_.size(); }
  std::size_t cols() const override { return cols_; }
  double query(std::size_t i, std::size_t j) const override;
  void query_column(std::span<const std::size_t> rows, std::size_t j,
                    std::span<double> out) const override;
  std::size_t sample_row(Rng& rng) const override;
  std::size_t sample_in_row(std::size_t i, Rng& rng) const override;
  double row_norm(std::size_t i) const override;
  double frobenius_norm() const override;

  const SqVector& row(std::size_t i) const;
  /// SQ access to the row-norm vector (the rows of A collapsed to their lengths).
  const SqVector& row_norms() const { return row_norms_; }

 private:
  void check_row(std::size_t i) const;

  std::size_t cols_ = 0;
  std::vector<SqVector> row_handles_;
  SqVector row_norms_;
};

}  // namespace sqla
