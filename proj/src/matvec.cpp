#include "sqla/matvec.hpp"

#include <cassert>
#include <cmath>
#include <numeric>

#include "sqla/errors.hpp"

namespace sqla {

MatVecHandle::MatVecHandle(std::shared_ptr<const MatrixAccess> v_transpose, std::vector<double> w,
                           MatVecOptions options)
    : vt_(std::move(v_transpose)), w_(std::move(w)), options_(options) {
  if (!vt_) throw InvalidParameter("null matrix handle");
  if (w_.empty()) throw InvalidParameter("k must be at least 1");
  if (vt_->rows() != w_.size()) throw DimensionMismatch(vt_->rows(), w_.size());
  if (!(options_.delta > 0.0 && options_.delta < 1.0))
    throw InvalidParameter("delta must lie in (0, 1)");
  if (!(options_.c_bound > 0.0)) throw InvalidParameter("C bound must be positive");

  std::vector<double> weights(w_.size());
  for (std::size_t i = 0; i < w_.size(); ++i)
    weights[i] = std::abs(w_[i]) * vt_->row_norm(i + 1);
  column_weights_ = SqVector::build_dense(weights);

  if (options_.attempt_budget) {
    budget_ = *options_.attempt_budget;
  } else {
    const double b = static_cast<double>(k()) * options_.c_bound * std::log(1.0 / options_.delta);
    budget_ = static_cast<std::size_t>(std::ceil(b));
  }
  if (budget_ == 0) budget_ = 1;
  all_rows_.resize(w_.size());
  std::iota(all_rows_.begin(), all_rows_.end(), std::size_t{1});
}

double MatVecHandle::image_entry(std::size_t s, double* term_sq_sum) const {
  thread_local std::vector<double> col;
  col.resize(w_.size());
  vt_->query_column(all_rows_, s, col);
  double sum = 0.0;
  double sq = 0.0;
  for (std::size_t j = 0; j < w_.size(); ++j) {
    const double t = col[j] * w_[j];
    sum += t;
    sq += t * t;
  }
  // Q(w) accesses.
  stats_.add_queries(2 * w_.size());
  if (term_sq_sum) *term_sq_sum = sq;
  return sum;
}

std::optional<std::size_t> MatVecHandle::rejection_sample_once(Rng& rng) const {
  if (!(column_weights_.squared_norm() > 0.0)) throw EmptySupport();
  stats_.add_attempts();
  const std::size_t i = column_weights_.sample_unchecked(uniform01(rng)) + 1;
  const std::size_t s = vt_->sample_in_row(i, rng);
  double sq = 0.0;
  const double entry = image_entry(s, &sq);
  const double r = entry * entry / (static_cast<double>(k()) * sq);
  assert(r <= 1.0 + 1e-9);
  if (uniform01(rng) < r) {
    stats_.add_samples();
    return s;
  }
  return std::nullopt;
}

double MatVecHandle::query(std::size_t s) const {
  if (s < 1 || s > dim()) throw IndexOutOfRange(s, dim());
  return image_entry(s, nullptr);
}

std::size_t MatVecHandle::sample(Rng& rng) const {
  for (std::size_t attempt = 0; attempt < budget_; ++attempt)
    if (auto s = rejection_sample_once(rng)) return *s;
  throw AbortedAfterBudget(budget_);
}

std::size_t MatVecHandle::norm_attempts(double nu) const {
  const double n = static_cast<double>(k()) / (nu * nu) * options_.c_bound *
                   std::log(1.0 / options_.delta);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(n)));
}

double MatVecHandle::norm_sq_estimate(double nu, Rng& rng) const {
  if (!(nu > 0.0 && nu < 1.0)) throw InvalidParameter("nu must lie in (0, 1)");
  const double mass = column_mass();
  if (mass == 0.0) return 0.0;
  const std::size_t attempts = norm_attempts(nu);
  std::size_t successes = 0;
  for (std::size_t t = 0; t < attempts; ++t)
    if (rejection_sample_once(rng)) ++successes;
  const double p = static_cast<double>(successes) / static_cast<double>(attempts);
  return p * static_cast<double>(k()) * mass;
}

// ---------------------------------------------------------------------------------------------

MatVecVector::MatVecVector(std::shared_ptr<const MatVecHandle> handle, double nu,
                           std::uint64_t norm_seed)
    : handle_(std::move(handle)), nu_(nu), norm_seed_(norm_seed) {
  if (!handle_) throw InvalidParameter("null matvec handle");
  if (!(nu_ > 0.0 && nu_ < 1.0)) throw InvalidParameter("nu must lie in (0, 1)");
}

double MatVecVector::query(std::size_t i) const {
  stats_.add_queries();
  return handle_->query(i);
}

std::size_t MatVecVector::sample(Rng& rng) const {
  const std::size_t s = handle_->sample(rng);
  stats_.add_samples();
  return s;
}

double MatVecVector::norm() const {
  std::call_once(norm_once_, [this] {
    // A squared-norm estimate within (1 +- a) becomes, after dividing by (1 - a), a norm in
    // [|Vw|, (1+nu)|Vw|] when (1+a)/(1-a) = (1+nu)^2.
    const double g = (1.0 + nu_) * (1.0 + nu_);
    const double a = (g - 1.0) / (g + 1.0);
    Rng rng(norm_seed_);
    const double est = handle_->norm_sq_estimate(a, rng);
    norm_ = std::sqrt(est / (1.0 - a));
  });
  stats_.add_norm_queries();
  return norm_;
}

// ---------------------------------------------------------------------------------------------

double overhead_c_exact(const DenseMatrix& v, std::span<const double> w) {
  if (v.cols() != w.size()) throw DimensionMismatch(v.cols(), w.size());
  double numer = 0.0;
  for (std::size_t i = 0; i < v.cols(); ++i) {
    double col_sq = 0.0;
    for (std::size_t s = 0; s < v.rows(); ++s) col_sq += v(s, i) * v(s, i);
    numer += w[i] * w[i] * col_sq;
  }
  double image_sq = 0.0;
  for (std::size_t s = 0; s < v.rows(); ++s) {
    double e = 0.0;
    for (std::size_t i = 0; i < v.cols(); ++i) e += v(s, i) * w[i];
    image_sq += e * e;
  }
  if (image_sq == 0.0 || image_sq < numer * 1e-28) throw ZeroImage();
  return numer / image_sq;
}

}  // namespace sqla
