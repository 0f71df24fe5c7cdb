#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "sqla/dense.hpp"
#include "sqla/sq_matrix.hpp"

namespace sqla {

struct MatVecOptions {
  /// Failure probability for a single sample() call and for norm_sq_estimate().
  double delta = 1e-3;
  /// Caller-supplied upper bound on C(V, w).
  double c_bound = 1.0;
  /// Explicit attempt cap for sample(); overrides ceil(k * c_bound * ln(1/delta)).
  std::optional<std::size_t> attempt_budget;
};

/// Simulated access to Vw given SQ(V^T) (the k columns of V as sampleable rows of a k x n
/// matrix) and query access to w, through rejection sampling.
///
/// One attempt picks column i with probability w_i^2 |V_{*,i}|^2, draws s from that column and
/// accepts with probability (Vw)_s^2 / (k sum_j (V_{sj} w_j)^2). Accepted indices are distributed
/// exactly as (Vw)_s^2 / |Vw|^2 and the acceptance rate is 1 / (k C(V, w)).
class MatVecHandle {
 public:
  MatVecHandle(std::shared_ptr<const MatrixAccess> v_transpose, std::vector<double> w,
               MatVecOptions options = {});

  std::size_t k() const { return w_.size(); }
  std::size_t dim() const { return vt_->cols(); }

  /// One attempt: the accepted 1-based index, or nullopt on rejection.
  std::optional<std::size_t> rejection_sample_once(Rng& rng) const;
  /// (Vw)_s using k entry queries.
  double query(std::size_t s) const;
  /// Repeats attempts until success; throws AbortedAfterBudget when the budget runs out.
  std::size_t sample(Rng& rng) const;
  /// Estimate of |Vw|^2 within a factor (1 +- nu) with probability 1 - delta, from
  /// ceil((k / nu^2) c_bound ln(1/delta)) attempts.
  double norm_sq_estimate(double nu, Rng& rng) const;

  std::size_t attempt_budget() const { return budget_; }
  std::size_t norm_attempts(double nu) const;
  /// sum_i w_i^2 |V_{*,i}|^2.
  double column_mass() const { return column_weights_.squared_norm(); }
  const MatVecOptions& options() const { return options_; }

  const AccessStats& stats() const { return stats_; }

 private:
  double image_entry(std::size_t s, double* term_sq_sum) const;

  std::shared_ptr<const MatrixAccess> vt_;
  std::vector<double> w_;
  MatVecOptions options_;
  SqVector column_weights_;  // entries |w_i| |V_{*,i}|
  std::size_t budget_ = 0;
  std::vector<std::size_t> all_rows_;
  AccessStats stats_;
};

/// SQ^nu(Vw) view of a MatVecHandle. The norm is estimated once, on first use, from a generator
/// seeded at construction, and reported as an overestimate in [|Vw|, (1+nu)|Vw|) with
/// probability 1 - delta.
class MatVecVector final : public SqAccess {
 public:
  MatVecVector(std::shared_ptr<const MatVecHandle> handle, double nu, std::uint64_t norm_seed);

  std::size_t dim() const override { return handle_->dim(); }
  double query(std::size_t i) const override;
  std::size_t sample(Rng& rng) const override;
  double norm() const override;
  double nu() const override { return nu_; }

  const MatVecHandle& handle() const { return *handle_; }

 private:
  std::shared_ptr<const MatVecHandle> handle_;
  double nu_;
  std::uint64_t norm_seed_;
  mutable std::once_flag norm_once_;
  mutable double norm_ = 0.0;
};

/// C(V, w) = sum_i |w_i V_{*,i}|^2 / |Vw|^2 by dense arithmetic. Throws ZeroImage if Vw = 0.
double overhead_c_exact(const DenseMatrix& v, std::span<const double> w);

}  // namespace sqla
