#include "sqla/sq_vector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "sqla/errors.hpp"

namespace sqla {

SqVector SqVector::build_dense(std::span<const double> x) {
  if (x.empty()) throw InvalidParameter("vector dimension must be at least 1");
  SqVector v;
  v.n_ = x.size();
  v.values_.assign(x.begin(), x.end());
  v.build_tree();
  return v;
}

SqVector SqVector::build_sparse(std::span<const std::pair<std::size_t, double>> pairs,
                                std::size_t n) {
  if (n == 0) throw InvalidParameter("vector dimension must be at least 1");
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return pairs[a].first < pairs[b].first; });
  SqVector v;
  v.n_ = n;
  v.sparse_ = true;
  v.support_.reserve(pairs.size());
  v.values_.reserve(pairs.size());
  for (std::size_t k : order) {
    const auto [index, value] = pairs[k];
    if (index < 1 || index > n) throw IndexOutOfRange(index, n);
    if (!v.support_.empty() && v.support_.back() == index - 1) throw DuplicateIndex(index);
    v.support_.push_back(index - 1);
    v.values_.push_back(value);
  }
  v.build_tree();
  return v;
}

void SqVector::build_tree() {
  leaves_ = std::bit_ceil(std::max<std::size_t>(values_.size(), 1));
  depth_ = static_cast<std::size_t>(std::countr_zero(leaves_));
  tree_.assign(2 * leaves_, 0.0);
  for (std::size_t i = 0; i < values_.size(); ++i) tree_[leaves_ + i] = values_[i] * values_[i];
  for (std::size_t k = leaves_ - 1; k >= 1; --k) tree_[k] = tree_[2 * k] + tree_[2 * k + 1];
  exact_norm_ = std::sqrt(tree_[1]);
  reported_norm_ = exact_norm_;
}

SqVector SqVector::with_norm_overestimate(double nu, double factor) const {
  if (!(nu >= 0.0)) throw InvalidParameter("nu must be nonnegative");
  const bool ok = nu == 0.0 ? factor == 1.0 : (factor >= 1.0 && factor < 1.0 + nu);
  if (!ok) throw InvalidParameter("norm factor must lie in [1, 1 + nu)");
  SqVector v = *this;
  v.stats_.reset();
  v.nu_ = nu;
  v.reported_norm_ = exact_norm_ * factor;
  return v;
}

double SqVector::value_unchecked(std::size_t i) const {
  if (!sparse_) return values_[i];
  auto it = std::lower_bound(support_.begin(), support_.end(), i);
  if (it == support_.end() || *it != i) return 0.0;
  return values_[static_cast<std::size_t>(it - support_.begin())];
}

double SqVector::query(std::size_t i) const {
  if (i < 1 || i > n_) throw IndexOutOfRange(i, n_);
  stats_.add_queries();
  return value_unchecked(i - 1);
}

std::size_t SqVector::sample_unchecked(double u) const {
  double target = u * tree_[1];
  std::size_t node = 1;
  while (node < leaves_) {
    const double left = tree_[2 * node];
    const double right = tree_[2 * node + 1];
    if (target < left || right <= 0.0) {
      node = 2 * node;
    } else {
      target -= left;
      node = 2 * node + 1;
    }
  }
  const std::size_t leaf = std::min(node - leaves_, values_.size() - 1);
  return sparse_ ? support_[leaf] : leaf;
}

std::size_t SqVector::sample(Rng& rng) const {
  if (tree_.empty() || !(tree_[1] > 0.0)) throw EmptySupport();
  const std::size_t i = sample_unchecked(uniform01(rng));
  stats_.add_samples();
  stats_.add_node_visits(depth_);
  return i + 1;
}

double SqVector::norm() const {
  stats_.add_norm_queries();
  return reported_norm_;
}

// ---------------------------------------------------------------------------------------------

IntegrationVector::IntegrationVector(IntegrationOracle oracle, std::size_t n,
                                     std::function<double(std::size_t)> entries)
    : oracle_(std::move(oracle)), entries_(std::move(entries)), n_(n) {
  if (n_ == 0) throw InvalidParameter("vector dimension must be at least 1");
  span_ = std::bit_ceil(n_);
  levels_ = static_cast<std::size_t>(std::countr_zero(span_));
  total_ = oracle_(1, n_);
  if (!(total_ >= 0.0)) throw InconsistentOracle("I(1, n) is negative");
}

double IntegrationVector::query(std::size_t i) const {
  if (i < 1 || i > n_) throw IndexOutOfRange(i, n_);
  if (!entries_) throw InvalidParameter("integration handle was built without entry access");
  stats_.add_queries();
  return entries_(i);
}

std::size_t IntegrationVector::sample(Rng& rng) const {
  if (!(total_ > 0.0)) throw EmptySupport();
  constexpr double kTol = 1e-9;
  double target = uniform01(rng) * total_;
  double mass = total_;
  std::size_t lo = 1;
  std::size_t width = span_;
  for (std::size_t level = 0; level < levels_; ++level) {
    width /= 2;
    const std::size_t mid = std::min(lo + width - 1, n_);
    const double left = oracle_(lo, mid);
    const double p = mass > 0.0 ? left / mass : 0.0;
    if (p < -kTol || p > 1.0 + kTol || !std::isfinite(p))
      throw InconsistentOracle("branch probability " + std::to_string(p) + " outside [0, 1]");
    const double right = mass - left;
    if (target < left || right <= 0.0 || lo + width > n_) {
      mass = left;
    } else {
      target -= left;
      mass = right;
      lo += width;
    }
  }
  stats_.add_samples();
  stats_.add_node_visits(levels_);
  return lo;
}

double IntegrationVector::norm() const {
  stats_.add_norm_queries();
  return std::sqrt(total_);
}

// ---------------------------------------------------------------------------------------------

UniformRejectionVector::UniformRejectionVector(std::function<double(std::size_t)> entries,
                                               std::size_t n, double c_bound, double norm)
    : entries_(std::move(entries)), n_(n), c_(c_bound), norm_(norm) {
  if (n_ == 0) throw InvalidParameter("vector dimension must be at least 1");
  if (!(c_ > 0.0)) throw InvalidParameter("rejection bound C must be positive");
  if (!(norm_ >= 0.0)) throw InvalidParameter("norm must be nonnegative");
}

double UniformRejectionVector::query(std::size_t i) const {
  if (i < 1 || i > n_) throw IndexOutOfRange(i, n_);
  stats_.add_queries();
  return entries_(i);
}

std::size_t UniformRejectionVector::sample(Rng& rng) const {
  if (!(norm_ > 0.0)) throw EmptySupport();
  const double scale = static_cast<double>(n_) / (c_ * norm_ * norm_);
  for (;;) {
    const std::size_t i = uniform_index(rng, n_) + 1;
    const double x = entries_(i);
    stats_.add_queries();
    stats_.add_attempts();
    const double p = scale * x * x;
    if (p > 1.0 + 1e-12) throw AcceptanceBoundViolated(i, p);
    if (uniform01(rng) < p) {
      stats_.add_samples();
      return i;
    }
  }
}

double UniformRejectionVector::norm() const {
  stats_.add_norm_queries();
  return norm_;
}

double QueryVector::query(std::size_t i) const {
  if (i < 1 || i > y_.size()) throw IndexOutOfRange(i, y_.size());
  stats_.add_queries();
  return y_[i - 1];
}

}  // namespace sqla
