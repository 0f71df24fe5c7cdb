#pragma once

#include <array>
#include <cstddef>
#include <memory>

#include "sqla/dense.hpp"
#include "sqla/estimators.hpp"
#include "sqla/sq_matrix.hpp"

namespace sqla {

/// Distance from u to the centroid of the rows of V, rewritten as |wM|^2 where
/// M = [u/|u| ; V_i/(sqrt(n)|V_i|)] is (n+1) x d and w = [|u|, -|V_1|/sqrt(n), ...].
/// Zero rows of V give a zero row of M and a zero entry of w, which keeps wM = u - mean(V).
class CentroidInstance {
 public:
  CentroidInstance(std::shared_ptr<const SqMatrix> v, std::shared_ptr<const SqVector> u);

  std::size_t n() const { return v_->rows(); }
  std::size_t d() const { return v_->cols(); }

  /// M_{ji} for 1 <= j <= n+1, 1 <= i <= d.
  double m_entry(std::size_t j, std::size_t i) const;
  /// |M_{j,*}|: 1 for the u row, 1/sqrt(n) for nonzero rows of V, 0 for zero rows.
  double m_row_norm(std::size_t j) const;
  double w_entry(std::size_t j) const;
  /// Z = |u|^2 + |V|_F^2 / n = |w|^2.
  double z() const { return z_; }
  /// |M|_F^2 (2 when u and every row of V are nonzero).
  double m_frobenius_sq() const { return m_tilde_.squared_norm(); }

  /// Samples j with probability |M_{j,*}|^2 / |M|_F^2.
  std::size_t sample_m_row(Rng& rng) const;
  /// Samples i with probability M_{ji}^2 / |M_{j,*}|^2.
  std::size_t sample_in_m_row(std::size_t j, Rng& rng) const;

  const SqMatrix& v() const { return *v_; }
  const SqVector& u() const { return *u_; }

  /// Dense M and w, for checks on small instances.
  DenseMatrix dense_m() const;
  DenseVector dense_w() const;

 private:
  std::shared_ptr<const SqMatrix> v_;
  std::shared_ptr<const SqVector> u_;
  SqVector m_tilde_;
  std::vector<double> v_row_norms_;
  double u_norm_;
  double inv_sqrt_n_;
  double z_;
};

/// Flat index of the triple (i, j, k) in [d] x [n+1] x [n+1]; all 1-based.
struct TensorIndex {
  std::size_t i, j, k;
};

/// SQ access to a = M (x) M~, a_{ijk} = M_{ji} |M_{k,*}|, over a flattened index. Never
/// materialized.
class TensorA final : public SqAccess {
 public:
  explicit TensorA(std::shared_ptr<const CentroidInstance> inst) : inst_(std::move(inst)) {}

  std::size_t dim() const override;
  double query(std::size_t flat) const override;
  std::size_t sample(Rng& rng) const override;
  /// |a| = |M|_F |M~| = |M|_F^2.
  double norm() const override;

  TensorIndex unflatten(std::size_t flat) const;
  std::size_t flatten(const TensorIndex& t) const;
  double entry(const TensorIndex& t) const;
  TensorIndex sample_triple(Rng& rng) const;

 private:
  std::shared_ptr<const CentroidInstance> inst_;
};

/// Query access to b, b_{ijk} = w_j w_k M_{ki} / |M_{k,*}| (0 when row k of M is zero).
class TensorB final : public QueryAccess {
 public:
  explicit TensorB(std::shared_ptr<const CentroidInstance> inst) : a_(inst), inst_(std::move(inst)) {}

  std::size_t dim() const override { return a_.dim(); }
  double query(std::size_t flat) const override;
  double entry(const TensorIndex& t) const;

 private:
  TensorA a_;
  std::shared_ptr<const CentroidInstance> inst_;
};

/// Estimate plus the constants used to size it.
struct CentroidEstimate {
  double value = 0.0;
  double z = 0.0;
  /// Scale used for sample sizing: 4Z.
  double sizing_scale = 0.0;
  /// |a| |b| computed from the instance (2Z when no row is zero).
  double norm_product = 0.0;
  double inner_epsilon = 0.0;
  std::size_t samples = 0;
  /// Accesses made to a and b.
  AccessCounts counts;
};

/// Estimates |u - (1/n) 1V|^2 to additive error eps with probability 1 - delta by running the
/// median-of-means inner-product estimator on <a, b> with relative accuracy eps / (4Z).
CentroidEstimate centroid_distance_estimate(std::shared_ptr<const CentroidInstance> inst, double eps,
                                            double delta, Rng& rng);

}  // namespace sqla
