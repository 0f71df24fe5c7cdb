#include "sqla/lowrank.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>

#include "sqla/errors.hpp"
#include "sqla/kernels.hpp"
#include "sqla/sqm_io.hpp"
#include "sqla/svd.hpp"

namespace sqla {

namespace {
// Theoretical sample counts beyond this are not materializable; callers must override q.
constexpr double kMaxTheoreticalQ = 1e8;
}  // namespace

std::size_t sample_count(const LowRankParams& params, double frobenius_norm) {
  if (!(params.sigma > 0.0)) throw InvalidParameter("sigma must be positive");
  if (params.q_override) {
    if (*params.q_override == 0) throw InvalidParameter("q override must be positive");
    return *params.q_override;
  }
  const double eps_max = std::sqrt(params.sigma / frobenius_norm) / 4.0;
  if (!(params.epsilon > 0.0 && params.epsilon <= eps_max))
    throw InvalidEpsilon("epsilon " + std::to_string(params.epsilon) + " outside (0, " +
                         std::to_string(eps_max) + "]");
  if (!(params.delta > 0.0 && params.delta < 1.0)) throw InvalidParameter("delta must lie in (0, 1)");
  if (!(params.theta_constant > 0.0)) throw InvalidParameter("theta constant must be positive");
  const double k = frobenius_norm * frobenius_norm / (params.sigma * params.sigma);
  const double q = params.theta_constant * std::pow(k, 4) / (params.epsilon * params.epsilon) *
                   std::log(1.0 / params.delta);
  if (!(q <= kMaxTheoreticalQ))
    throw InvalidParameter("theoretical q = " + std::to_string(q) +
                           " is too large to materialize; supply a q override");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(q)));
}

LowRankDescription low_rank_approx(const MatrixAccess& a, const LowRankParams& params, Rng& rng) {
  const double fro = a.frobenius_norm();
  if (!(fro > 0.0)) throw EmptySupport();
  const std::size_t q = sample_count(params, fro);

  LowRankDescription desc;
  desc.source_rows = a.rows();
  desc.cols = a.cols();
  desc.frobenius_norm = fro;
  desc.row_indices.resize(q);
  desc.row_scale.resize(q);
  desc.col_indices.resize(q);

  const double sqrt_q = std::sqrt(static_cast<double>(q));
  std::vector<double> row_norm(q);
  for (std::size_t r = 0; r < q; ++r) {
    desc.row_indices[r] = a.sample_row(rng);
    row_norm[r] = a.row_norm(desc.row_indices[r]);
    desc.row_scale[r] = fro / (sqrt_q * row_norm[r]);
  }
  // Columns from F: a uniform row of S, then length-squared within it (the row of A).
  for (std::size_t c = 0; c < q; ++c) {
    const std::size_t r = uniform_index(rng, q);
    desc.col_indices[c] = a.sample_in_row(desc.row_indices[r], rng);
  }

  std::map<std::size_t, std::size_t> multiplicity;
  for (std::size_t j : desc.col_indices) ++multiplicity[j];
  std::vector<std::size_t> distinct;
  distinct.reserve(multiplicity.size());
  for (const auto& [j, count] : multiplicity) distinct.push_back(j);

  // Column j of S, and F(j) = (1/q) sum_r S_{rj}^2 / |S_{r,*}|^2.
  DenseMatrix s_cols(distinct.size(), q);
  std::vector<double> f(distinct.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t d = 0; d < static_cast<std::int64_t>(distinct.size()); ++d) {
    const auto di = static_cast<std::size_t>(d);
    auto col = s_cols.row(di);
    a.query_column(desc.row_indices, distinct[di], col);
    double acc = 0.0;
    for (std::size_t r = 0; r < q; ++r) {
      const double raw = col[r];
      col[r] = raw * desc.row_scale[r];
      acc += raw * raw / (row_norm[r] * row_norm[r]);
    }
    f[di] = acc / static_cast<double>(q);
  }

  // W_{*,c} = S_{*,j_c} / sqrt(q F(j_c)). Repeated columns are merged into one column scaled by
  // sqrt(multiplicity), which leaves W W^T, and so the left singular pairs, unchanged.
  DenseMatrix w;
  if (params.literal_w) {
    std::map<std::size_t, std::size_t> slot;
    for (std::size_t d = 0; d < distinct.size(); ++d) slot[distinct[d]] = d;
    w = DenseMatrix(q, q);
    for (std::size_t c = 0; c < q; ++c) {
      const std::size_t d = slot[desc.col_indices[c]];
      const double inv = 1.0 / std::sqrt(static_cast<double>(q) * f[d]);
      for (std::size_t r = 0; r < q; ++r) w(r, c) = s_cols(d, r) * inv;
    }
  } else {
    w = DenseMatrix(q, distinct.size());
    for (std::size_t d = 0; d < distinct.size(); ++d) {
      const double m = static_cast<double>(multiplicity[distinct[d]]);
      const double scale = std::sqrt(m / (static_cast<double>(q) * f[d]));
      for (std::size_t r = 0; r < q; ++r) w(r, d) = s_cols(d, r) * scale;
    }
  }

  const SvdResult svd = dense_svd(w);
  std::size_t rank = 0;
  while (rank < svd.sigma.size() && svd.sigma[rank] > params.sigma) ++rank;
  desc.sigma_hat.assign(svd.sigma.begin(), svd.sigma.begin() + static_cast<std::ptrdiff_t>(rank));
  desc.u_hat = DenseMatrix(q, rank);
  for (std::size_t r = 0; r < q; ++r)
    for (std::size_t c = 0; c < rank; ++c) desc.u_hat(r, c) = svd.u(r, c);
  return desc;
}

// ---------------------------------------------------------------------------------------------

RowSampledMatrix::RowSampledMatrix(std::shared_ptr<const MatrixAccess> a,
                                   const LowRankDescription& desc)
    : a_(std::move(a)),
      rows_(desc.row_indices),
      scale_(desc.row_scale),
      row_norm_(desc.frobenius_norm / std::sqrt(static_cast<double>(desc.q()))),
      frobenius_(desc.frobenius_norm) {
  if (!a_) throw InvalidParameter("null matrix handle");
  if (rows_.empty()) throw InvalidParameter("description has no sampled rows");
  if (a_->cols() != desc.cols) throw DimensionMismatch(a_->cols(), desc.cols);
}

void RowSampledMatrix::check_row(std::size_t r) const {
  if (r < 1 || r > rows_.size()) throw IndexOutOfRange(r, rows_.size());
}

double RowSampledMatrix::query(std::size_t r, std::size_t j) const {
  check_row(r);
  stats_.add_queries();
  return a_->query(rows_[r - 1], j) * scale_[r - 1];
}

void RowSampledMatrix::query_column(std::span<const std::size_t> rows, std::size_t j,
                                    std::span<double> out) const {
  if (rows.size() != out.size()) throw DimensionMismatch(rows.size(), out.size());
  thread_local std::vector<std::size_t> mapped;
  mapped.resize(rows.size());
  for (std::size_t t = 0; t < rows.size(); ++t) {
    check_row(rows[t]);
    mapped[t] = rows_[rows[t] - 1];
  }
  a_->query_column(mapped, j, out);
  for (std::size_t t = 0; t < rows.size(); ++t) out[t] *= scale_[rows[t] - 1];
  stats_.add_queries(rows.size());
}

std::size_t RowSampledMatrix::sample_row(Rng& rng) const {
  stats_.add_samples();
  return uniform_index(rng, rows_.size()) + 1;
}

std::size_t RowSampledMatrix::sample_in_row(std::size_t r, Rng& rng) const {
  check_row(r);
  stats_.add_samples();
  return a_->sample_in_row(rows_[r - 1], rng);
}

double RowSampledMatrix::row_norm(std::size_t r) const {
  check_row(r);
  stats_.add_norm_queries();
  return row_norm_;
}

double RowSampledMatrix::frobenius_norm() const {
  stats_.add_norm_queries();
  return frobenius_;
}

std::shared_ptr<const RowSampledMatrix> sq_access_to_s(std::shared_ptr<const MatrixAccess> a,
                                                       const LowRankDescription& desc) {
  return std::make_shared<const RowSampledMatrix>(std::move(a), desc);
}

// ---------------------------------------------------------------------------------------------

DenseMatrix materialize_s(const DenseMatrix& a, const LowRankDescription& desc) {
  if (a.cols() != desc.cols) throw DimensionMismatch(a.cols(), desc.cols);
  DenseMatrix s(desc.q(), a.cols());
  for (std::size_t r = 0; r < desc.q(); ++r) {
    auto src = a.row(desc.row_indices[r] - 1);
    auto dst = s.row(r);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] = src[j] * desc.row_scale[r];
  }
  return s;
}

DenseMatrix materialize_v_hat(const DenseMatrix& a, const LowRankDescription& desc) {
  for (double sv : desc.sigma_hat)
    if (sv == 0.0) throw SingularSigma();
  const DenseMatrix s = materialize_s(a, desc);
  DenseMatrix v = kernels::matmul(s.transpose(), desc.u_hat);
  for (std::size_t i = 0; i < v.rows(); ++i)
    for (std::size_t c = 0; c < v.cols(); ++c) v(i, c) /= desc.sigma_hat[c];
  return v;
}

DenseMatrix reconstruct_d_dense(const DenseMatrix& a, const LowRankDescription& desc) {
  if (desc.rank() == 0) return DenseMatrix(a.rows(), a.cols());
  const DenseMatrix v = materialize_v_hat(a, desc);
  return kernels::matmul(kernels::matmul(a, v), v.transpose());
}

// ---------------------------------------------------------------------------------------------

void save_description(const std::string& path, const LowRankDescription& desc) {
  const std::size_t q = desc.q();
  DenseMatrix header(1, 5, {static_cast<double>(q), static_cast<double>(desc.rank()),
                            static_cast<double>(desc.cols), desc.frobenius_norm,
                            static_cast<double>(desc.source_rows)});
  DenseMatrix rows(1, q);
  DenseMatrix cols(1, q);
  DenseMatrix scale(1, q);
  for (std::size_t r = 0; r < q; ++r) {
    rows(0, r) = static_cast<double>(desc.row_indices[r]);
    cols(0, r) = static_cast<double>(desc.col_indices[r]);
    scale(0, r) = desc.row_scale[r];
  }
  DenseMatrix sigma(1, desc.rank(), desc.sigma_hat);
  io::save_blocks(path, {header, rows, cols, scale, desc.u_hat, sigma});
}

LowRankDescription load_description(const std::string& path) {
  const auto blocks = io::load_blocks(path);
  if (blocks.size() != 6) throw FormatError("description: expected 6 SQM1 blocks");
  const DenseMatrix& h = blocks[0];
  if (h.rows() != 1 || h.cols() != 5) throw FormatError("description: bad header block");
  const auto q = static_cast<std::size_t>(h(0, 0));
  const auto rank = static_cast<std::size_t>(h(0, 1));
  LowRankDescription d;
  d.cols = static_cast<std::size_t>(h(0, 2));
  d.frobenius_norm = h(0, 3);
  d.source_rows = static_cast<std::size_t>(h(0, 4));
  for (int b = 1; b <= 3; ++b)
    if (blocks[static_cast<std::size_t>(b)].rows() != 1 || blocks[static_cast<std::size_t>(b)].cols() != q)
      throw FormatError("description: index block shape mismatch");
  if (blocks[4].rows() != q || blocks[4].cols() != rank || blocks[5].cols() != rank)
    throw FormatError("description: factor block shape mismatch");
  for (std::size_t r = 0; r < q; ++r) {
    d.row_indices.push_back(static_cast<std::size_t>(blocks[1](0, r)));
    d.col_indices.push_back(static_cast<std::size_t>(blocks[2](0, r)));
    d.row_scale.push_back(blocks[3](0, r));
  }
  d.u_hat = blocks[4];
  d.sigma_hat.assign(blocks[5].data().begin(), blocks[5].data().end());
  return d;
}

}  // namespace sqla
