#pragma once

#include <span>

#include "sqla/dense.hpp"

// Dense kernels used by the low-rank stage, the oracles and the harness. Every kernel has an
// OpenMP implementation and a serial reference kept for testing and benchmarking. Parallel
// results do not depend on the thread count: each output element is owned by one thread and
// reductions combine fixed-size blocks in order.
namespace sqla::kernels {

namespace serial {
double sum_sq(std::span<const double> x);
DenseVector row_sq_norms(const DenseMatrix& a);
DenseVector matvec(const DenseMatrix& a, std::span<const double> x);
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix gram(const DenseMatrix& a);  // a^T a
}  // namespace serial

namespace parallel {
double sum_sq(std::span<const double> x);
DenseVector row_sq_norms(const DenseMatrix& a);
DenseVector matvec(const DenseMatrix& a, std::span<const double> x);
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix gram(const DenseMatrix& a);
}  // namespace parallel

using parallel::gram;
using parallel::matmul;
using parallel::matvec;
using parallel::row_sq_norms;
using parallel::sum_sq;

/// Caps the OpenMP team size (0 leaves the runtime default). Returns the active cap.
int set_max_threads(int threads);
int max_threads();

}  // namespace sqla::kernels
