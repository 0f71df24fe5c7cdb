#pragma once

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include "sqla/dense.hpp"
#include "sqla/random.hpp"

namespace testing {

inline std::vector<double> gaussian(std::size_t n, sqla::Rng& rng) {
  std::normal_distribution<double> g;
  std::vector<double> x(n);
  for (double& v : x) v = g(rng);
  return x;
}

inline sqla::DenseMatrix gaussian(std::size_t r, std::size_t c, sqla::Rng& rng) {
  std::normal_distribution<double> g;
  sqla::DenseMatrix a(r, c);
  for (double& v : a.data()) v = g(rng);
  return a;
}

/// Histogram of n draws from a 1-based sampler over [dim].
inline std::vector<std::size_t> histogram(std::size_t dim, std::size_t n,
                                          const std::function<std::size_t()>& draw) {
  std::vector<std::size_t> c(dim, 0);
  for (std::size_t i = 0; i < n; ++i) ++c.at(draw() - 1);
  return c;
}

/// Pearson goodness-of-fit p-value. Cells with expected count below 5 are pooled; a draw in a
/// zero-probability cell gives p = 0.
inline double chi_square_pvalue(const std::vector<std::size_t>& counts, const std::vector<double>& p) {
  double n = 0.0;
  for (auto c : counts) n += static_cast<double>(c);
  double stat = 0.0;
  std::size_t cells = 0;
  double pool_obs = 0.0, pool_exp = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double e = n * p[i];
    if (e == 0.0) {
      if (counts[i] > 0) return 0.0;
      continue;
    }
    if (e < 5.0) {
      pool_obs += static_cast<double>(counts[i]);
      pool_exp += e;
      continue;
    }
    const double d = static_cast<double>(counts[i]) - e;
    stat += d * d / e;
    ++cells;
  }
  if (pool_exp > 0.0) {
    const double d = pool_obs - pool_exp;
    stat += d * d / pool_exp;
    ++cells;
  }
  if (cells < 2) return 1.0;
  boost::math::chi_squared dist(static_cast<double>(cells - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace testing
