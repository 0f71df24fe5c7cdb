#include "sqla/sq_matrix.hpp"

#include <cmath>

#include "sqla/errors.hpp"

namespace sqla {

void MatrixAccess::query_column(std::span<const std::size_t> rows, std::size_t j,
                                std::span<double> out) const {
  if (rows.size() != out.size()) throw DimensionMismatch(rows.size(), out.size());
  for (std::size_t r = 0; r < rows.size(); ++r) out[r] = query(rows[r], j);
}

SqMatrix SqMatrix::build(const DenseMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) throw InvalidParameter("matrix dimensions must be positive");
  SqMatrix m;
  m.cols_ = a.cols();
  m.row_handles_.reserve(a.rows());
  std::vector<double> norms(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    m.row_handles_.push_back(SqVector::build_dense(a.row(i)));
    norms[i] = m.row_handles_.back().exact_norm();
  }
  m.row_norms_ = SqVector::build_dense(norms);
  return m;
}

void SqMatrix::check_row(std::size_t i) const {
  if (i < 1 || i > row_handles_.size()) throw IndexOutOfRange(i, row_handles_.size());
}

const SqVector& SqMatrix::row(std::size_t i) const {
  check_row(i);
  return row_handles_[i - 1];
}

double SqMatrix::query(std::size_t i, std::size_t j) const {
  check_row(i);
  if (j < 1 || j > cols_) throw IndexOutOfRange(j, cols_);
  stats_.add_queries();
  return row_handles_[i - 1].value_unchecked(j - 1);
}

void SqMatrix::query_column(std::span<const std::size_t> rows, std::size_t j,
                            std::span<double> out) const {
  if (rows.size() != out.size()) throw DimensionMismatch(rows.size(), out.size());
  if (j < 1 || j > cols_) throw IndexOutOfRange(j, cols_);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    check_row(rows[r]);
    out[r] = row_handles_[rows[r] - 1].value_unchecked(j - 1);
  }
  stats_.add_queries(rows.size());
}

std::size_t SqMatrix::sample_row(Rng& rng) const {
  if (!(row_norms_.squared_norm() > 0.0)) throw EmptySupport();
  const std::size_t i = row_norms_.sample_unchecked(uniform01(rng)) + 1;
  stats_.add_samples();
  stats_.add_node_visits(row_norms_.depth());
  return i;
}

std::size_t SqMatrix::sample_in_row(std::size_t i, Rng& rng) const {
  check_row(i);
  const SqVector& r = row_handles_[i - 1];
  if (!(r.squared_norm() > 0.0)) throw EmptySupport();
  const std::size_t j = r.sample_unchecked(uniform01(rng)) + 1;
  stats_.add_samples();
  stats_.add_node_visits(r.depth());
  return j;
}

double SqMatrix::row_norm(std::size_t i) const {
  check_row(i);
  stats_.add_norm_queries();
  return row_handles_[i - 1].exact_norm();
}

double SqMatrix::frobenius_norm() const {
  stats_.add_norm_queries();
  return row_norms_.exact_norm();
}

}  // namespace sqla
