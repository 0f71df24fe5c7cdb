// Serial reference vs OpenMP kernels, plus the sampling primitives the estimators lean on.
#include <benchmark/benchmark.h>

#include <random>

#include "sqla/kernels.hpp"
#include "sqla/random.hpp"
#include "sqla/sq_matrix.hpp"
#include "sqla/sq_vector.hpp"

using namespace sqla;

namespace {

DenseMatrix random_matrix(std::size_t r, std::size_t c) {
  Rng rng(1);
  std::normal_distribution<double> g;
  DenseMatrix a(r, c);
  for (double& v : a.data()) v = g(rng);
  return a;
}

template <auto Fn>
void bm_sum_sq(benchmark::State& st) {
  const auto a = random_matrix(1, static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(Fn(a.data()));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <auto Fn>
void bm_row_sq_norms(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto a = random_matrix(n, n);
  for (auto _ : st) benchmark::DoNotOptimize(Fn(a));
}

template <auto Fn>
void bm_matvec(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto a = random_matrix(n, n);
  const auto x = random_matrix(1, n);
  for (auto _ : st) benchmark::DoNotOptimize(Fn(a, x.data()));
}

template <auto Fn>
void bm_matmul(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto a = random_matrix(n, n);
  const auto b = random_matrix(n, n);
  for (auto _ : st) benchmark::DoNotOptimize(Fn(a, b));
}

template <auto Fn>
void bm_gram(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto a = random_matrix(2 * n, n);
  for (auto _ : st) benchmark::DoNotOptimize(Fn(a));
}

void bm_vector_sample(benchmark::State& st) {
  const auto x = random_matrix(1, static_cast<std::size_t>(st.range(0)));
  const auto v = SqVector::build_dense(x.data());
  Rng rng(2);
  for (auto _ : st) benchmark::DoNotOptimize(v.sample(rng));
}

void bm_matrix_build(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto a = random_matrix(n, n);
  for (auto _ : st) benchmark::DoNotOptimize(SqMatrix::build(a));
}

}  // namespace

BENCHMARK(bm_sum_sq<&kernels::serial::sum_sq>)->Name("sum_sq/serial")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(bm_sum_sq<&kernels::parallel::sum_sq>)->Name("sum_sq/parallel")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(bm_row_sq_norms<&kernels::serial::row_sq_norms>)->Name("row_sq_norms/serial")->Arg(512);
BENCHMARK(bm_row_sq_norms<&kernels::parallel::row_sq_norms>)->Name("row_sq_norms/parallel")->Arg(512);
BENCHMARK(bm_matvec<&kernels::serial::matvec>)->Name("matvec/serial")->Arg(512)->Arg(2048);
BENCHMARK(bm_matvec<&kernels::parallel::matvec>)->Name("matvec/parallel")->Arg(512)->Arg(2048);
BENCHMARK(bm_matmul<&kernels::serial::matmul>)->Name("matmul/serial")->Arg(128)->Arg(256);
BENCHMARK(bm_matmul<&kernels::parallel::matmul>)->Name("matmul/parallel")->Arg(128)->Arg(256);
BENCHMARK(bm_gram<&kernels::serial::gram>)->Name("gram/serial")->Arg(128)->Arg(256);
BENCHMARK(bm_gram<&kernels::parallel::gram>)->Name("gram/parallel")->Arg(128)->Arg(256);
BENCHMARK(bm_vector_sample)->Arg(1000)->Arg(1 << 20);
BENCHMARK(bm_matrix_build)->Arg(200)->Arg(1000);

BENCHMARK_MAIN();
