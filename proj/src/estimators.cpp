#include "sqla/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "sqla/errors.hpp"

namespace sqla {

EstimatorParams::EstimatorParams(double eps, double del) : epsilon(eps), delta(del) {
  if (!(epsilon > 0.0 && std::isfinite(epsilon)))
    throw InvalidEpsilon("estimator epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidParameter("delta must lie in (0, 1)");
}

std::size_t EstimatorParams::bucket_count() const {
  return static_cast<std::size_t>(std::ceil(6.0 * std::log(2.0 / delta)));
}

std::size_t EstimatorParams::bucket_size() const {
  return static_cast<std::size_t>(std::ceil(9.0 / (epsilon * epsilon)));
}

double median_of_means(std::span<const double> values, std::size_t bucket_count,
                       std::size_t bucket_size) {
  if (bucket_count == 0 || bucket_size == 0 || values.size() != bucket_count * bucket_size)
    throw LengthMismatch("median_of_means: " + std::to_string(values.size()) + " values for " +
                         std::to_string(bucket_count) + " buckets of " +
                         std::to_string(bucket_size));
  std::vector<double> means(bucket_count);
  for (std::size_t b = 0; b < bucket_count; ++b) {
    double s = 0.0;
    for (std::size_t t = 0; t < bucket_size; ++t) s += values[b * bucket_size + t];
    means[b] = s / static_cast<double>(bucket_size);
  }
  const std::size_t mid = bucket_count / 2;
  std::nth_element(means.begin(), means.begin() + static_cast<std::ptrdiff_t>(mid), means.end());
  if (bucket_count % 2 == 1) return means[mid];
  const double upper = means[mid];
  const double lower = *std::max_element(means.begin(), means.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double inner_product_estimate(const SqAccess& x, const QueryAccess& y, const EstimatorParams& params,
                              Rng& rng) {
  if (x.dim() != y.dim()) throw DimensionMismatch(x.dim(), y.dim());
  const double reported = x.norm();
  if (!(reported > 0.0)) throw EmptySupport();
  const double norm_sq = reported * reported;
  const std::size_t count = params.bucket_count();
  const std::size_t size = params.bucket_size();
  std::vector<double> z(count * size);
  for (double& zj : z) zj = elementary_estimate(x, y, norm_sq, rng);
  return median_of_means(z, count, size);
}

double elementary_estimate(const SqAccess& x, const QueryAccess& y, double norm_sq, Rng& rng) {
  const std::size_t i = x.sample(rng);
  const double xi = x.query(i);
  const double yi = y.query(i);
  return xi * yi * norm_sq / (xi * xi);
}

}  // namespace sqla
