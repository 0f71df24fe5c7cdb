#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "sqla/sq_access.hpp"

namespace sqla {

/// Vector stored behind a complete binary weight tree: leaves hold x_i^2 and every internal node
/// holds the sum of its two children. Sampling is one uniform draw and a root-to-leaf descent.
///
/// Dense vectors put every coordinate in a leaf; sparse vectors only the listed support, so that
/// construction is O(s). Handles are immutable after construction.
class SqVector final : public SqAccess {
 public:
  SqVector() = default;

  static SqVector build_dense(std::span<const double> x);
  /// pairs hold (1-based index, value); indices must be distinct and within [1, n].
  static SqVector build_sparse(std::span<const std::pair<std::size_t, double>> pairs, std::size_t n);

  /// Copy whose norm() reports factor * |x|, declaring slack nu. Requires 1 <= factor < 1 + nu.
  SqVector with_norm_overestimate(double nu, double factor) const;

  std::size_t dim() const override { return n_; }
  double query(std::size_t i) const override;
  std::size_t sample(Rng& rng) const override;
  double norm() const override;
  double nu() const override { return nu_; }

  /// Exact |x| (the tree root), ignoring any declared overestimate.
  double exact_norm() const { return exact_norm_; }
  double squared_norm() const { return tree_.empty() ? 0.0 : tree_[1]; }
  /// Tree depth; each sample visits exactly this many internal-to-child steps.
  std::size_t depth() const { return depth_; }
  std::size_t support_size() const { return values_.size(); }
  bool is_sparse() const { return sparse_; }

  /// Heap-ordered tree (node 1 is the root, children of k are 2k and 2k+1). Index 0 is unused.
  std::span<const double> weight_tree() const { return tree_; }
  std::size_t leaf_offset() const { return leaves_; }

  /// Untracked entry read used by composite handles that account for the access themselves.
  double value_unchecked(std::size_t zero_based) const;
  /// Untracked descent; returns the 0-based coordinate.
  std::size_t sample_unchecked(double u) const;

 private:
  void build_tree();

  std::size_t n_ = 0;
  bool sparse_ = false;
  std::vector<std::size_t> support_;  // 0-based, sorted; only for sparse vectors
  std::vector<double> values_;
  std::vector<double> tree_;
  std::size_t leaves_ = 0;
  std::size_t depth_ = 0;
  double exact_norm_ = 0.0;
  double reported_norm_ = 0.0;
  double nu_ = 0.0;
};

/// I(s, t) = sum_{i=s}^{t} x_i^2 for 1 <= s <= t <= n.
using IntegrationOracle = std::function<double(std::size_t, std::size_t)>;

/// SQ access driven only by an integration oracle. Sampling descends a virtual power-of-two
/// interval tree making one oracle call per level, ceil(log2 n) calls per sample.
class IntegrationVector final : public SqAccess {
 public:
  /// entries answers queries; it may be empty if only sampling and norms are needed.
  IntegrationVector(IntegrationOracle oracle, std::size_t n,
                    std::function<double(std::size_t)> entries = {});

  std::size_t dim() const override { return n_; }
  double query(std::size_t i) const override;
  std::size_t sample(Rng& rng) const override;
  double norm() const override;

  std::size_t levels() const { return levels_; }

 private:
  IntegrationOracle oracle_;
  std::function<double(std::size_t)> entries_;
  std::size_t n_;
  std::size_t levels_;
  std::size_t span_;
  double total_;
};

/// SQ access for close-to-uniform vectors: draw i uniformly and accept with probability
/// n x_i^2 / (C |x|^2). The expected number of attempts per accepted sample is C.
class UniformRejectionVector final : public SqAccess {
 public:
  UniformRejectionVector(std::function<double(std::size_t)> entries, std::size_t n, double c_bound,
                         double norm);

  std::size_t dim() const override { return n_; }
  double query(std::size_t i) const override;
  std::size_t sample(Rng& rng) const override;
  double norm() const override;

  double c_bound() const { return c_; }

 private:
  std::function<double(std::size_t)> entries_;
  std::size_t n_;
  double c_;
  double norm_;
};

/// Q(y) over an explicit vector.
class QueryVector final : public QueryAccess {
 public:
  explicit QueryVector(std::vector<double> y) : y_(std::move(y)) {}
  std::size_t dim() const override { return y_.size(); }
  double query(std::size_t i) const override;

 private:
  std::vector<double> y_;
};

}  // namespace sqla
