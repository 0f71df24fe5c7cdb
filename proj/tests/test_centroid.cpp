#include <doctest.h>

#include <cmath>

#include "sqla/centroid.hpp"
#include "sqla/errors.hpp"
#include "sqla/oracle.hpp"
#include "support.hpp"

using namespace sqla;

namespace {

std::shared_ptr<const CentroidInstance> instance(const DenseMatrix& v, const std::vector<double>& u) {
  return std::make_shared<const CentroidInstance>(std::make_shared<const SqMatrix>(SqMatrix::build(v)),
                                                  std::make_shared<const SqVector>(SqVector::build_dense(u)));
}

// <a, b> summed densely over every triple.
double dense_ab(const CentroidInstance& inst) {
  const auto self = std::shared_ptr<const CentroidInstance>(&inst, [](const CentroidInstance*) {});
  const TensorA a(self);
  const TensorB b(self);
  std::vector<double> terms;
  for (std::size_t f = 1; f <= a.dim(); ++f) terms.push_back(a.query(f) * b.query(f));
  return oracle::pairwise_sum(terms);
}

double dense_b_norm(const CentroidInstance& inst) {
  const auto self = std::shared_ptr<const CentroidInstance>(&inst, [](const CentroidInstance*) {});
  const TensorB b(self);
  std::vector<double> sq;
  for (std::size_t f = 1; f <= b.dim(); ++f) sq.push_back(b.query(f) * b.query(f));
  return std::sqrt(oracle::pairwise_sum(sq));
}

double dense_a_norm(const CentroidInstance& inst) {
  const auto self = std::shared_ptr<const CentroidInstance>(&inst, [](const CentroidInstance*) {});
  const TensorA a(self);
  std::vector<double> sq;
  for (std::size_t f = 1; f <= a.dim(); ++f) sq.push_back(a.query(f) * a.query(f));
  return std::sqrt(oracle::pairwise_sum(sq));
}

}  // namespace

TEST_CASE("all rows equal to u") {
  const std::vector<double> u = {0.5, -1.0, 2.0};
  DenseMatrix v(6, 3);
  for (std::size_t r = 0; r < 6; ++r)
    for (std::size_t c = 0; c < 3; ++c) v(r, c) = u[c];
  const auto inst = instance(v, u);
  for (std::uint64_t s = 0; s < 5; ++s) {
    Rng rng(s);
    CHECK(std::abs(centroid_distance_estimate(inst, 0.1, 0.05, rng).value) <= 0.1);
  }
}

TEST_CASE("n = 1, u = [1,0], V = [[0,1]]") {
  const auto inst = instance(DenseMatrix(1, 2, {0, 1}), {1, 0});
  CHECK(inst->z() == doctest::Approx(2.0));
  int ok = 0;
#pragma omp parallel for reduction(+ : ok) schedule(dynamic)
  for (int t = 0; t < 400; ++t) {
    Rng rng = make_rng(1, static_cast<std::uint64_t>(t));
    if (std::abs(centroid_distance_estimate(inst, 0.1, 0.05, rng).value - 2.0) <= 0.1) ++ok;
  }
  CHECK(ok >= 380);
}

TEST_CASE("n = 50, d = 20 Gaussian instance against the dense distance") {
  Rng gen(2);
  const auto v = testing::gaussian(50, 20, gen);
  const auto u = testing::gaussian(20, gen);
  const auto inst = instance(v, u);
  const double truth = oracle::exact_centroid_distance(v, u);
  const double eps = 0.05 * inst->z();
  int ok = 0;
#pragma omp parallel for reduction(+ : ok) schedule(dynamic)
  for (int t = 0; t < 400; ++t) {
    Rng rng = make_rng(3, static_cast<std::uint64_t>(t));
    if (std::abs(centroid_distance_estimate(inst, eps, 0.05, rng).value - truth) <= eps) ++ok;
  }
  CHECK(ok >= 380);
}

TEST_CASE("estimate metadata and access counts") {
  Rng gen(4);
  const auto inst = instance(testing::gaussian(5, 4, gen), testing::gaussian(4, gen));
  Rng rng(5);
  const auto e = centroid_distance_estimate(inst, 0.5, 0.1, rng);
  CHECK(e.z == doctest::Approx(inst->z()));
  CHECK(e.sizing_scale == doctest::Approx(4.0 * inst->z()));
  CHECK(e.norm_product == doctest::Approx(2.0 * inst->z()));
  CHECK(e.inner_epsilon == doctest::Approx(0.5 / (4.0 * inst->z())));
  const EstimatorParams p(e.inner_epsilon, 0.1);
  CHECK(e.samples == p.total_samples());
  CHECK(e.counts.samples == p.total_samples());
  CHECK(e.counts.queries == 2 * p.total_samples());
  // sample count grows as 1/eps^2 through the bucket size
  Rng r2(5);
  const auto half = centroid_distance_estimate(inst, 0.25, 0.1, r2);
  CHECK(EstimatorParams(half.inner_epsilon, 0.1).bucket_size() ==
        static_cast<std::size_t>(std::ceil(9.0 / (half.inner_epsilon * half.inner_epsilon))));
}

TEST_CASE("tensor a sampling") {
  SUBCASE("n = 1: M~ = [1, 1], j and k uniform") {
    const auto inst = instance(DenseMatrix(1, 2, {0, 3}), {2, 0});
    CHECK(inst->m_row_norm(1) == 1.0);
    CHECK(inst->m_row_norm(2) == 1.0);
    Rng rng(6);
    std::size_t j1 = 0, k1 = 0;
    const TensorA a(inst);
    for (int t = 0; t < 20000; ++t) {
      const auto s = a.sample_triple(rng);
      j1 += s.j == 1;
      k1 += s.k == 1;
    }
    CHECK(std::abs(j1 / 20000.0 - 0.5) <= 0.02);
    CHECK(std::abs(k1 / 20000.0 - 0.5) <= 0.02);
  }
  SUBCASE("query_a at a zero entry of M") {
    const auto inst = instance(DenseMatrix(1, 2, {0, 3}), {2, 0});
    const TensorA a(inst);
    CHECK(a.entry({2, 1, 1}) == 0.0);  // M_{1,2} = u_2 / |u| = 0
    CHECK(a.entry({1, 2, 2}) == 0.0);
    CHECK(a.entry({1, 1, 2}) == 1.0);
  }
  SUBCASE("n = 2, d = 2: empirical distribution against dense |a|^2") {
    const auto inst = instance(DenseMatrix(2, 2, {1, 2, -3, 0.5}), {0.7, -1.1});
    const TensorA a(inst);
    std::vector<double> dense(a.dim());
    for (std::size_t f = 1; f <= a.dim(); ++f) dense[f - 1] = a.query(f);
    Rng rng(7);
    const auto c = testing::histogram(a.dim(), 100000, [&] { return a.sample(rng); });
    const auto p = oracle::l2_distribution(dense);
    CHECK(oracle::tv_distance(c, p) <= 0.02);
    CHECK(testing::chi_square_pvalue(c, p) > 0.001);
  }
}

TEST_CASE("dense identities of the reduction") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng gen(100 + s);
    const std::size_t n = 1 + s % 7, d = 2 + s % 5;
    const auto v = testing::gaussian(n, d, gen);
    const auto u = testing::gaussian(d, gen);
    const auto inst = instance(v, u);
    const double truth = oracle::exact_centroid_distance(v, u);
    CHECK(std::abs(dense_ab(*inst) - truth) <= 1e-10 * std::max(1.0, truth));
    CHECK(inst->m_frobenius_sq() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(dense_a_norm(*inst) - 2.0) <= 1e-10);
    CHECK(std::abs(dense_b_norm(*inst) - inst->z()) <= 1e-10 * inst->z());
    const auto w = inst->dense_w();
    CHECK(oracle::exact_dot(w, w) == doctest::Approx(inst->z()).epsilon(1e-12));
    // wM = u - mean(V)
    const auto m = inst->dense_m();
    for (std::size_t i = 0; i < d; ++i) {
      double wm = 0.0, mean = 0.0;
      for (std::size_t j = 0; j <= n; ++j) wm += w[j] * m(j, i);
      for (std::size_t r = 0; r < n; ++r) mean += v(r, i);
      CHECK(wm == doctest::Approx(u[i] - mean / static_cast<double>(n)).epsilon(1e-12));
    }
  }
}

TEST_CASE("zero rows of V") {
  DenseMatrix v(3, 2, {1, 2, 0, 0, -1, 1});
  const std::vector<double> u = {0.5, 0.5};
  const auto inst = instance(v, u);
  CHECK(inst->m_row_norm(3) == 0.0);
  CHECK(inst->w_entry(3) == 0.0);
  CHECK(inst->m_entry(3, 1) == 0.0);
  CHECK(inst->m_frobenius_sq() == doctest::Approx(1.0 + 2.0 / 3.0));
  CHECK(std::abs(dense_ab(*inst) - oracle::exact_centroid_distance(v, u)) <= 1e-12);
  Rng rng(8);
  const TensorA a(inst);
  for (int t = 0; t < 2000; ++t) {
    const auto s = a.sample_triple(rng);
    REQUIRE(s.j != 3);
    REQUIRE(s.k != 3);
  }
  const auto e = centroid_distance_estimate(inst, 0.2, 0.05, rng);
  CHECK(std::abs(e.value - oracle::exact_centroid_distance(v, u)) <= 0.2);
}

TEST_CASE("flat indexing") {
  Rng gen(9);
  const auto inst = instance(testing::gaussian(3, 4, gen), testing::gaussian(4, gen));
  const TensorA a(inst);
  CHECK(a.dim() == 4 * 4 * 4);
  for (std::size_t f = 1; f <= a.dim(); ++f) REQUIRE(a.flatten(a.unflatten(f)) == f);
  CHECK_THROWS_AS(a.unflatten(0), IndexOutOfRange);
  CHECK_THROWS_AS(a.unflatten(65), IndexOutOfRange);
  CHECK_THROWS_AS(a.flatten({5, 1, 1}), IndexOutOfRange);
  CHECK_THROWS_AS(inst->m_entry(5, 1), IndexOutOfRange);
}

TEST_CASE("errors") {
  auto v = std::make_shared<const SqMatrix>(SqMatrix::build(DenseMatrix(2, 3, 1.0)));
  auto u2 = std::make_shared<const SqVector>(SqVector::build_dense(std::vector<double>{1, 2}));
  CHECK_THROWS_AS(CentroidInstance(v, u2), DimensionMismatch);
  CHECK_THROWS_AS(CentroidInstance(nullptr, u2), InvalidParameter);
  const auto zero = instance(DenseMatrix(2, 2), {0, 0});
  Rng rng(10);
  CHECK_THROWS_AS(centroid_distance_estimate(zero, 0.1, 0.1, rng), EmptySupport);
  const auto ok = instance(DenseMatrix(1, 2, {1, 0}), {0, 1});
  CHECK_THROWS_AS(centroid_distance_estimate(ok, 0.0, 0.1, rng), InvalidEpsilon);
  CHECK_THROWS_AS(centroid_distance_estimate(ok, 0.1, 1.0, rng), InvalidParameter);
}
