#pragma once

#include <cstddef>
#include <span>

#include "sqla/sq_access.hpp"

namespace sqla {

/// Sample sizing for median-of-means inner-product estimation.
struct EstimatorParams {
  double epsilon;
  double delta;

  EstimatorParams(double eps, double del);

  /// ceil(6 ln(2/delta)).
  std::size_t bucket_count() const;
  /// ceil(9 / eps^2).
  std::size_t bucket_size() const;
  std::size_t total_samples() const { return bucket_count() * bucket_size(); }
};

/// Splits values into consecutive buckets, averages each, and returns the median of the means
/// (mean of the two middle values for an even bucket count).
double median_of_means(std::span<const double> values, std::size_t bucket_count,
                       std::size_t bucket_size);

/// One elementary estimate x_i y_i norm_sq / x_i^2 for i drawn from x. Unbiased for <x, y> when
/// norm_sq = |x|^2, with variance at most |x|^2 |y|^2.
double elementary_estimate(const SqAccess& x, const QueryAccess& y, double norm_sq, Rng& rng);

/// Estimates <x, y> from SQ^nu(x) and Q(y). Each elementary estimate is
/// x_i y_i n~^2 / x_i^2 for a length-squared sample i, where n~ is the reported norm of x;
/// the output is within (eps + nu)|x||y| of the truth with probability at least 1 - delta.
/// Performs exactly total_samples() samples and entry queries on x and on y, plus one norm query.
double inner_product_estimate(const SqAccess& x, const QueryAccess& y, const EstimatorParams& params,
                              Rng& rng);

}  // namespace sqla
