#pragma once

#include <cstddef>

#include "sqla/access_stats.hpp"
#include "sqla/random.hpp"

namespace sqla {

/// Query access Q(x): entry lookup by 1-based index.
class QueryAccess {
 public:
  virtual ~QueryAccess() = default;

  virtual std::size_t dim() const = 0;
  /// Entry x_i for 1 <= i <= dim(); throws IndexOutOfRange otherwise.
  virtual double query(std::size_t i) const = 0;

  const AccessStats& stats() const { return stats_; }

 protected:
  AccessStats stats_;
};

/// Sample-and-query access SQ^nu(x): entry queries, length-squared index sampling and a norm
/// query returning a value in [|x|, (1+nu)|x|).
class SqAccess : public QueryAccess {
 public:
  /// Draws a 1-based index i with probability x_i^2 / |x|^2. Throws EmptySupport when |x| = 0.
  virtual std::size_t sample(Rng& rng) const = 0;
  virtual double norm() const = 0;
  /// Relative slack of norm(); zero for exact handles.
  virtual double nu() const { return 0.0; }
};

}  // namespace sqla
