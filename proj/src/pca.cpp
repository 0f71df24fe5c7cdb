#include "sqla/pca.hpp"

#include <algorithm>
#include <cmath>

#include "sqla/errors.hpp"

namespace sqla {

namespace {

void validate(const PcaParams& p) {
  if (!(p.sigma > 0.0)) throw InvalidParameter("sigma must be positive");
  if (p.k == 0) throw InvalidParameter("k must be at least 1");
  if (!(p.eta > 0.0)) throw InvalidParameter("eta must be positive");
  if (!(p.eps_sigma > 0.0) || !(p.eps_v > 0.0)) throw InvalidEpsilon("accuracies must be positive");
  if (!(p.eps_sigma < p.eta)) throw InvalidEpsilon("eps_sigma must be smaller than eta");
  if (!(p.delta > 0.0 && p.delta < 1.0)) throw InvalidParameter("delta must lie in (0, 1)");
  if (!(p.handle_delta > 0.0 && p.handle_delta < 1.0))
    throw InvalidParameter("handle delta must lie in (0, 1)");
  if (!(p.handle_nu > 0.0 && p.handle_nu < 1.0))
    throw InvalidParameter("handle nu must lie in (0, 1)");
}

}  // namespace

double pca_epsilon(const PcaParams& params, double frobenius_norm) {
  const double k = frobenius_norm * frobenius_norm / (params.sigma * params.sigma);
  return std::min({params.eps_sigma * std::pow(k, 1.5), params.eps_v * params.eps_v * params.eta,
                   0.25 / std::sqrt(k)});
}

PcaResult pca(std::shared_ptr<const MatrixAccess> a, const PcaParams& params, std::uint64_t seed) {
  if (!a) throw InvalidParameter("null matrix handle");
  validate(params);
  PcaResult res;
  res.a = a;
  res.params = params;
  res.seed = seed;
  res.frobenius_norm = a->frobenius_norm();
  if (!(res.frobenius_norm > 0.0)) throw EmptySupport();

  for (const auto& [name, value] : {std::pair{"eps_sigma", params.eps_sigma},
                                    std::pair{"eps_v", params.eps_v},
                                    std::pair{"delta", params.delta}}) {
    if (!(value < 0.01))
      res.warnings.push_back(std::string(name) + " = " + std::to_string(value) +
                             " is outside the stated theorem range (0, 0.01)");
  }

  res.epsilon = pca_epsilon(params, res.frobenius_norm);
  res.sigma_prime = params.sigma - res.epsilon * res.frobenius_norm;

  LowRankParams lr;
  lr.sigma = res.sigma_prime;
  lr.epsilon = res.epsilon;
  lr.delta = params.delta / static_cast<double>(params.k);
  lr.q_override = params.q_override;
  lr.theta_constant = params.theta_constant;

  Rng rng(derive_seed(seed, 0));
  res.desc = low_rank_approx(*a, lr, rng);
  if (res.desc.rank() < params.k) throw InsufficientRank(res.desc.rank(), params.k);
  res.sigma_hat_sq.resize(params.k);
  for (std::size_t i = 0; i < params.k; ++i)
    res.sigma_hat_sq[i] = res.desc.sigma_hat[i] * res.desc.sigma_hat[i];
  res.s = sq_access_to_s(a, res.desc);
  return res;
}

double eigvec_c_bound(const PcaResult& res, std::size_t i) {
  if (i < 1 || i > res.sigma_hat_sq.size()) throw IndexOutOfRange(i, res.sigma_hat_sq.size());
  const double slack = (1.0 - res.epsilon) * (1.0 - res.epsilon);
  return res.frobenius_norm * res.frobenius_norm /
         (static_cast<double>(res.q()) * res.sigma_hat_sq[i - 1] * slack);
}

std::shared_ptr<const MatVecVector> eigvec_access(const PcaResult& res, std::size_t i) {
  if (i < 1 || i > res.sigma_hat_sq.size()) throw IndexOutOfRange(i, res.sigma_hat_sq.size());
  const double s = res.desc.sigma_hat[i - 1];
  std::vector<double> w(res.q());
  for (std::size_t r = 0; r < res.q(); ++r) w[r] = res.desc.u_hat(r, i - 1) / s;
  MatVecOptions opts;
  opts.delta = res.params.handle_delta;
  opts.c_bound = eigvec_c_bound(res, i);
  auto handle = std::make_shared<const MatVecHandle>(res.s, std::move(w), opts);
  return std::make_shared<const MatVecVector>(std::move(handle), res.params.handle_nu,
                                              derive_seed(res.seed, 1000 + i));
}

}  // namespace sqla
