#include "sqla/centroid.hpp"

#include <cmath>

#include "sqla/errors.hpp"

namespace sqla {

CentroidInstance::CentroidInstance(std::shared_ptr<const SqMatrix> v,
                                   std::shared_ptr<const SqVector> u)
    : v_(std::move(v)), u_(std::move(u)) {
  if (!v_ || !u_) throw InvalidParameter("null centroid input");
  if (v_->cols() != u_->dim()) throw DimensionMismatch(v_->cols(), u_->dim());
  const std::size_t rows = v_->rows();
  inv_sqrt_n_ = 1.0 / std::sqrt(static_cast<double>(rows));
  u_norm_ = u_->norm();
  // Row norms are read once here; the per-sample paths below use this copy so that only the
  // entry queries and samples of u and V show up in their access counters.
  v_row_norms_.resize(rows);
  for (std::size_t i = 1; i <= rows; ++i) v_row_norms_[i - 1] = v_->row_norm(i);
  std::vector<double> m_tilde(rows + 1);
  m_tilde[0] = u_norm_ > 0.0 ? 1.0 : 0.0;
  for (std::size_t i = 1; i <= rows; ++i)
    m_tilde[i] = v_row_norms_[i - 1] > 0.0 ? inv_sqrt_n_ : 0.0;
  m_tilde_ = SqVector::build_dense(m_tilde);
  const double fro = v_->frobenius_norm();
  z_ = u_norm_ * u_norm_ + fro * fro / static_cast<double>(rows);
}

double CentroidInstance::m_entry(std::size_t j, std::size_t i) const {
  if (j < 1 || j > n() + 1) throw IndexOutOfRange(j, n() + 1);
  if (j == 1) return u_norm_ > 0.0 ? u_->query(i) / u_norm_ : 0.0;
  const double rn = v_row_norms_[j - 2];
  return rn > 0.0 ? v_->query(j - 1, i) * inv_sqrt_n_ / rn : 0.0;
}

double CentroidInstance::m_row_norm(std::size_t j) const {
  if (j < 1 || j > n() + 1) throw IndexOutOfRange(j, n() + 1);
  return m_tilde_.value_unchecked(j - 1);
}

double CentroidInstance::w_entry(std::size_t j) const {
  if (j < 1 || j > n() + 1) throw IndexOutOfRange(j, n() + 1);
  if (j == 1) return u_norm_;
  return -v_row_norms_[j - 2] * inv_sqrt_n_;
}

std::size_t CentroidInstance::sample_m_row(Rng& rng) const {
  if (!(m_tilde_.squared_norm() > 0.0)) throw EmptySupport();
  return m_tilde_.sample_unchecked(uniform01(rng)) + 1;
}

std::size_t CentroidInstance::sample_in_m_row(std::size_t j, Rng& rng) const {
  if (j < 1 || j > n() + 1) throw IndexOutOfRange(j, n() + 1);
  return j == 1 ? u_->sample(rng) : v_->sample_in_row(j - 1, rng);
}

DenseMatrix CentroidInstance::dense_m() const {
  DenseMatrix m(n() + 1, d());
  for (std::size_t j = 1; j <= n() + 1; ++j)
    for (std::size_t i = 1; i <= d(); ++i) m(j - 1, i - 1) = m_entry(j, i);
  return m;
}

DenseVector CentroidInstance::dense_w() const {
  DenseVector w(n() + 1);
  for (std::size_t j = 1; j <= n() + 1; ++j) w[j - 1] = w_entry(j);
  return w;
}

// ---------------------------------------------------------------------------------------------

std::size_t TensorA::dim() const {
  const std::size_t rows = inst_->n() + 1;
  return inst_->d() * rows * rows;
}

TensorIndex TensorA::unflatten(std::size_t flat) const {
  if (flat < 1 || flat > dim()) throw IndexOutOfRange(flat, dim());
  const std::size_t rows = inst_->n() + 1;
  std::size_t z = flat - 1;
  const std::size_t k = z % rows;
  z /= rows;
  const std::size_t j = z % rows;
  const std::size_t i = z / rows;
  return {i + 1, j + 1, k + 1};
}

std::size_t TensorA::flatten(const TensorIndex& t) const {
  const std::size_t rows = inst_->n() + 1;
  if (t.i < 1 || t.i > inst_->d()) throw IndexOutOfRange(t.i, inst_->d());
  if (t.j < 1 || t.j > rows) throw IndexOutOfRange(t.j, rows);
  if (t.k < 1 || t.k > rows) throw IndexOutOfRange(t.k, rows);
  return ((t.i - 1) * rows + (t.j - 1)) * rows + (t.k - 1) + 1;
}

double TensorA::entry(const TensorIndex& t) const {
  return inst_->m_entry(t.j, t.i) * inst_->m_row_norm(t.k);
}

double TensorA::query(std::size_t flat) const {
  const TensorIndex t = unflatten(flat);
  stats_.add_queries();
  return entry(t);
}

TensorIndex TensorA::sample_triple(Rng& rng) const {
  const std::size_t j = inst_->sample_m_row(rng);
  const std::size_t k = inst_->sample_m_row(rng);
  const std::size_t i = inst_->sample_in_m_row(j, rng);
  return {i, j, k};
}

std::size_t TensorA::sample(Rng& rng) const {
  if (!(inst_->m_frobenius_sq() > 0.0)) throw EmptySupport();
  const std::size_t flat = flatten(sample_triple(rng));
  stats_.add_samples();
  return flat;
}

double TensorA::norm() const {
  stats_.add_norm_queries();
  return inst_->m_frobenius_sq();
}

double TensorB::entry(const TensorIndex& t) const {
  const double mk = inst_->m_row_norm(t.k);
  if (mk == 0.0) return 0.0;
  return inst_->w_entry(t.j) * inst_->w_entry(t.k) * inst_->m_entry(t.k, t.i) / mk;
}

double TensorB::query(std::size_t flat) const {
  const TensorIndex t = a_.unflatten(flat);
  stats_.add_queries();
  return entry(t);
}

// ---------------------------------------------------------------------------------------------

CentroidEstimate centroid_distance_estimate(std::shared_ptr<const CentroidInstance> inst, double eps,
                                            double delta, Rng& rng) {
  if (!inst) throw InvalidParameter("null centroid instance");
  if (!(eps > 0.0 && std::isfinite(eps))) throw InvalidEpsilon("centroid epsilon must be positive");
  CentroidEstimate out;
  out.z = inst->z();
  if (!(out.z > 0.0)) throw EmptySupport();
  out.sizing_scale = 4.0 * out.z;
  out.inner_epsilon = eps / out.sizing_scale;
  const TensorA a(inst);
  const TensorB b(inst);
  // |b| = |w|^2 = Z.
  out.norm_product = inst->m_frobenius_sq() * out.z;
  const EstimatorParams params(out.inner_epsilon, delta);
  out.samples = params.total_samples();
  out.value = inner_product_estimate(a, b, params, rng);
  out.counts = a.stats().snapshot();
  out.counts += b.stats().snapshot();
  return out;
}

}  // namespace sqla
