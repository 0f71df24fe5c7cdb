#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sqla/lowrank.hpp"
#include "sqla/matvec.hpp"

namespace sqla {

struct PcaParams {
  double sigma = 1.0;  // sigma_i >= sigma for i <= k
  std::size_t k = 1;
  double eta = 0.1;    // relative gap: sigma_i^2 - sigma_{i+1}^2 >= eta |A|_F^2
  double eps_sigma = 0.005;
  double eps_v = 0.005;
  double delta = 0.005;
  std::optional<std::size_t> q_override;
  double theta_constant = 1.0;
  /// Failure probability of each sample()/norm() call on an eigenvector handle.
  double handle_delta = 1e-3;
  /// Norm slack of the eigenvector handles.
  double handle_nu = 0.01;
};

/// eps = min(eps_sigma K^1.5, eps_v^2 eta, K^{-1/2} / 4) with K = |A|_F^2 / sigma^2.
double pca_epsilon(const PcaParams& params, double frobenius_norm);

struct PcaResult {
  std::vector<double> sigma_hat_sq;  // k estimates, nonincreasing
  LowRankDescription desc;
  std::shared_ptr<const MatrixAccess> a;
  std::shared_ptr<const RowSampledMatrix> s;
  PcaParams params;
  double epsilon = 0.0;
  double sigma_prime = 0.0;
  double frobenius_norm = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;

  std::size_t q() const { return desc.q(); }
};

/// Runs the low-rank stage with threshold sigma' = sigma - eps |A|_F, error eps and failure
/// probability delta / k, then reads off the top k singular values. Throws InsufficientRank when
/// fewer than k values survive the threshold. `seed` seeds the run and the eigenvector handles.
PcaResult pca(std::shared_ptr<const MatrixAccess> a, const PcaParams& params, std::uint64_t seed);

/// C bound for the eigenvector handle i (1-based): every row of S has squared norm |A|_F^2 / q,
/// so C(S^T, U_i / s_i) <= |A|_F^2 / (q s_i^2 (1 - eps)^2).
double eigvec_c_bound(const PcaResult& res, std::size_t i);

/// SQ^nu access to v_i = S^T U_hat_{*,i} / sigma_hat_i through the rejection-sampling matvec.
std::shared_ptr<const MatVecVector> eigvec_access(const PcaResult& res, std::size_t i);

}  // namespace sqla
