#pragma once

#include <atomic>
#include <cstdint>

namespace sqla {

/// Plain snapshot of access counters.
struct AccessCounts {
  std::uint64_t queries = 0;
  std::uint64_t samples = 0;
  std::uint64_t norm_queries = 0;
  // Tree nodes visited or integration-oracle calls made while sampling.
  std::uint64_t node_visits = 0;
  // Rejection-sampling attempts, accepted or not.
  std::uint64_t attempts = 0;

  AccessCounts& operator+=(const AccessCounts& o) {
    queries += o.queries;
    samples += o.samples;
    norm_queries += o.norm_queries;
    node_visits += o.node_visits;
    attempts += o.attempts;
    return *this;
  }
  friend AccessCounts operator-(AccessCounts a, const AccessCounts& b) {
    a.queries -= b.queries;
    a.samples -= b.samples;
    a.norm_queries -= b.norm_queries;
    a.node_visits -= b.node_visits;
    a.attempts -= b.attempts;
    return a;
  }
  bool operator==(const AccessCounts&) const = default;
};

/// Monotone access counters attached to a handle. Increments are relaxed atomics so that
/// const handles can be shared between threads; totals are exact once accessors quiesce.
class AccessStats {
 public:
  AccessStats() = default;
  AccessStats(const AccessStats& o) { store(o.snapshot()); }
  AccessStats& operator=(const AccessStats& o) {
    store(o.snapshot());
    return *this;
  }

  void add_queries(std::uint64_t n = 1) const { queries_.fetch_add(n, std::memory_order_relaxed); }
  void add_samples(std::uint64_t n = 1) const { samples_.fetch_add(n, std::memory_order_relaxed); }
  void add_norm_queries(std::uint64_t n = 1) const {
    norm_queries_.fetch_add(n, std::memory_order_relaxed);
  }
  void add_node_visits(std::uint64_t n) const {
    node_visits_.fetch_add(n, std::memory_order_relaxed);
  }
  void add_attempts(std::uint64_t n = 1) const {
    attempts_.fetch_add(n, std::memory_order_relaxed);
  }

  AccessCounts snapshot() const {
    return {queries_.load(std::memory_order_relaxed), samples_.load(std::memory_order_relaxed),
            norm_queries_.load(std::memory_order_relaxed),
            node_visits_.load(std::memory_order_relaxed), attempts_.load(std::memory_order_relaxed)};
  }

  void reset() const { store({}); }

 private:
  void store(const AccessCounts& c) const {
    queries_.store(c.queries, std::memory_order_relaxed);
    samples_.store(c.samples, std::memory_order_relaxed);
    norm_queries_.store(c.norm_queries, std::memory_order_relaxed);
    node_visits_.store(c.node_visits, std::memory_order_relaxed);
    attempts_.store(c.attempts, std::memory_order_relaxed);
  }

  mutable std::atomic<std::uint64_t> queries_{0};
  mutable std::atomic<std::uint64_t> samples_{0};
  mutable std::atomic<std::uint64_t> norm_queries_{0};
  mutable std::atomic<std::uint64_t> node_visits_{0};
  mutable std::atomic<std::uint64_t> attempts_{0};
};

}  // namespace sqla
