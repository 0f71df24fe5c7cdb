#include "sqla/kernels.hpp"

#include <algorithm>
#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sqla/errors.hpp"

namespace sqla::kernels {

namespace {
constexpr std::size_t kBlock = 4096;

void check_matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch(a.cols(), b.rows());
}
}  // namespace

namespace serial {

double sum_sq(std::span<const double> x) {
  // Same block structure as the parallel version so both agree bit for bit.
  double total = 0.0;
  for (std::size_t start = 0; start < x.size(); start += kBlock) {
    const std::size_t end = std::min(x.size(), start + kBlock);
    double s = 0.0;
    for (std::size_t i = start; i < end; ++i) s += x[i] * x[i];
    total += s;
  }
  return total;
}

DenseVector row_sq_norms(const DenseMatrix& a) {
  DenseVector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = sum_sq(a.row(i));
  return out;
}

DenseVector matvec(const DenseMatrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw DimensionMismatch(a.cols(), x.size());
  DenseVector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto r = a.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) s += r[j] * x[j];
    y[i] = s;
  }
  return y;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  check_matmul(a, b);
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ci = c.row(i);
    for (std::size_t p = 0; p < a.cols(); ++p) {
      const double aip = a(i, p);
      if (aip == 0.0) continue;
      auto bp = b.row(p);
      for (std::size_t j = 0; j < ci.size(); ++j) ci[j] += aip * bp[j];
    }
  }
  return c;
}

DenseMatrix gram(const DenseMatrix& a) {
  const std::size_t n = a.cols();
  DenseMatrix g(n, n);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto ar = a.row(r);
    for (std::size_t i = 0; i < n; ++i) {
      const double ai = ar[i];
      if (ai == 0.0) continue;
      auto gi = g.row(i);
      for (std::size_t j = i; j < n; ++j) gi[j] += ai * ar[j];
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  return g;
}

}  // namespace serial

namespace parallel {

double sum_sq(std::span<const double> x) {
  const std::size_t blocks = (x.size() + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
    const std::size_t start = static_cast<std::size_t>(b) * kBlock;
    const std::size_t end = std::min(x.size(), start + kBlock);
    double s = 0.0;
    for (std::size_t i = start; i < end; ++i) s += x[i] * x[i];
    partial[static_cast<std::size_t>(b)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

DenseVector row_sq_norms(const DenseMatrix& a) {
  DenseVector out(a.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(a.rows()); ++i)
    out[static_cast<std::size_t>(i)] = serial::sum_sq(a.row(static_cast<std::size_t>(i)));
  return out;
}

DenseVector matvec(const DenseMatrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw DimensionMismatch(a.cols(), x.size());
  DenseVector y(a.rows(), 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(a.rows()); ++i) {
    auto r = a.row(static_cast<std::size_t>(i));
    double s = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) s += r[j] * x[j];
    y[static_cast<std::size_t>(i)] = s;
  }
  return y;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  check_matmul(a, b);
  DenseMatrix c(a.rows(), b.cols());
#pragma omp parallel for schedule(static)
  for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(a.rows()); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    auto ci = c.row(i);
    for (std::size_t p = 0; p < a.cols(); ++p) {
      const double aip = a(i, p);
      if (aip == 0.0) continue;
      auto bp = b.row(p);
      for (std::size_t j = 0; j < ci.size(); ++j) ci[j] += aip * bp[j];
    }
  }
  return c;
}

DenseMatrix gram(const DenseMatrix& a) {
  const std::size_t n = a.cols();
  DenseMatrix g(n, n);
  // Row i of the upper triangle is owned by one thread; rows of a are streamed in order so the
  // accumulation order matches the serial kernel.
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    auto gi = g.row(i);
    for (std::size_t r = 0; r < a.rows(); ++r) {
      auto ar = a.row(r);
      const double ai = ar[i];
      if (ai == 0.0) continue;
      for (std::size_t j = i; j < n; ++j) gi[j] += ai * ar[j];
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  return g;
}

}  // namespace parallel

int set_max_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
  return omp_get_max_threads();
#else
  (void)threads;
  return 1;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace sqla::kernels
