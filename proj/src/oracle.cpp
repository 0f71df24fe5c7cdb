#include "sqla/oracle.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>

#include "sqla/errors.hpp"
#include "sqla/pca.hpp"
#include "sqla/random.hpp"

namespace sqla::oracle {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMat> view(const DenseMatrix& a) {
  return {a.data().data(), static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols())};
}

DenseMatrix to_dense(const Eigen::MatrixXd& m) {
  DenseMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

}  // namespace

double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 16) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

double exact_dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionMismatch(x.size(), y.size());
  std::vector<double> prod(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) prod[i] = x[i] * y[i];
  return pairwise_sum(prod);
}

DenseVector exact_matvec(const DenseMatrix& v, std::span<const double> w) {
  if (v.cols() != w.size()) throw DimensionMismatch(v.cols(), w.size());
  DenseVector out(v.rows());
  for (std::size_t s = 0; s < v.rows(); ++s) out[s] = exact_dot(v.row(s), w);
  return out;
}

double exact_frobenius(const DenseMatrix& a) {
  return std::sqrt(exact_dot(a.data(), a.data()));
}

SvdResult exact_svd(const DenseMatrix& a) {
  if (std::min(a.rows(), a.cols()) > 512)
    throw InvalidParameter("exact_svd is limited to min(rows, cols) <= 512");
  if (a.empty()) return {};
  Eigen::BDCSVD<Eigen::MatrixXd> svd(view(a), Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw ConvergenceFailure("exact_svd did not converge");
  SvdResult res;
  res.u = to_dense(svd.matrixU());
  res.v = to_dense(svd.matrixV());
  const auto& s = svd.singularValues();
  res.sigma.assign(s.data(), s.data() + s.size());
  return res;
}

std::vector<double> exact_singular_values(const DenseMatrix& a) {
  if (a.empty()) return {};
  Eigen::BDCSVD<Eigen::MatrixXd> svd(view(a));
  if (svd.info() != Eigen::Success) throw ConvergenceFailure("exact_svd did not converge");
  const auto& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

double exact_centroid_distance(const DenseMatrix& v, std::span<const double> u) {
  if (v.cols() != u.size()) throw DimensionMismatch(v.cols(), u.size());
  if (v.rows() == 0) throw InvalidParameter("no data points");
  std::vector<double> diff(u.size());
  std::vector<double> column(v.rows());
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t r = 0; r < v.rows(); ++r) column[r] = v(r, i);
    diff[i] = u[i] - pairwise_sum(column) / static_cast<double>(v.rows());
  }
  return exact_dot(diff, diff);
}

double exact_C(const DenseMatrix& v, std::span<const double> w) {
  const DenseVector image = exact_matvec(v, w);
  const double denom = exact_dot(image, image);
  std::vector<double> terms(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const DenseVector col = v.col(i);
    terms[i] = w[i] * w[i] * exact_dot(col, col);
  }
  const double numer = pairwise_sum(terms);
  if (denom == 0.0 || denom < numer * 1e-28) throw ZeroImage();
  return numer / denom;
}

double exact_low_rank_error(const DenseMatrix& a, std::size_t r) {
  const auto s = exact_singular_values(a);
  std::vector<double> tail;
  for (std::size_t i = r; i < s.size(); ++i) tail.push_back(s[i] * s[i]);
  return pairwise_sum(tail);
}

std::vector<double> l2_distribution(std::span<const double> x) {
  std::vector<double> p(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) p[i] = x[i] * x[i];
  const double total = pairwise_sum(p);
  if (total == 0.0) throw EmptySupport();
  for (double& v : p) v /= total;
  return p;
}

double tv_distance(std::span<const std::size_t> counts, std::span<const double> probs) {
  if (counts.size() != probs.size()) throw DimensionMismatch(counts.size(), probs.size());
  double n = 0.0;
  for (auto c : counts) n += static_cast<double>(c);
  if (n == 0.0) throw InvalidParameter("no samples");
  std::vector<double> dev(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    dev[i] = std::abs(static_cast<double>(counts[i]) / n - probs[i]);
  return 0.5 * pairwise_sum(dev);
}

EigvecDiagnostics eigvec_error_oracle(const DenseMatrix& a, const PcaResult& res) {
  const auto& desc = res.desc;
  const std::size_t k = res.sigma_hat_sq.size();
  const std::size_t n = a.cols();
  const SvdResult svd = exact_svd(a);

  // v_hat_i = sum_r S_{r,*} U_hat(r, i) / sigma_hat_i
  std::vector<DenseVector> vhat(k, DenseVector(n, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> terms(desc.q());
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t r = 0; r < desc.q(); ++r)
        terms[r] = a(desc.row_indices[r] - 1, j) * desc.row_scale[r] * desc.u_hat(r, i);
      vhat[i][j] = pairwise_sum(terms) / desc.sigma_hat[i];
    }
  }

  EigvecDiagnostics out;
  for (std::size_t i = 0; i < k; ++i) {
    const DenseVector v = svd.v.col(i);
    std::vector<double> plus(n), minus(n);
    for (std::size_t j = 0; j < n; ++j) {
      plus[j] = vhat[i][j] - v[j];
      minus[j] = vhat[i][j] + v[j];
    }
    out.error.push_back(std::sqrt(std::min(exact_dot(plus, plus), exact_dot(minus, minus))));
    const double c = exact_dot(v, vhat[i]);
    out.overlap.push_back(c * c);
    out.sigma_sq.push_back(i < svd.sigma.size() ? svd.sigma[i] * svd.sigma[i] : 0.0);
    for (std::size_t j = 0; j < k; ++j) {
      const double cij = exact_dot(vhat[i], svd.v.col(j));
      out.subspace += cij * cij;
    }
  }
  return out;
}

DenseMatrix random_orthonormal(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  if (cols > rows) throw InvalidParameter("need cols <= rows for orthonormal columns");
  Rng rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd g(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
  const Eigen::MatrixXd r = qr.matrixQR();
  // sign fix so the distribution does not depend on the Householder convention
  for (std::size_t j = 0; j < cols; ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;
  return to_dense(q);
}

DenseMatrix planted_matrix(std::size_t rows, std::size_t cols, std::span<const double> spectrum,
                           double noise, std::uint64_t seed) {
  const std::size_t r = spectrum.size();
  if (r > std::min(rows, cols)) throw InvalidParameter("spectrum longer than min(rows, cols)");
  const DenseMatrix u = random_orthonormal(rows, r, derive_seed(seed, 0));
  const DenseMatrix v = random_orthonormal(cols, r, derive_seed(seed, 1));
  DenseMatrix a(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < r; ++t) s += spectrum[t] * u(i, t) * v(j, t);
      a(i, j) = s;
    }
  if (noise != 0.0) {
    Rng rng(derive_seed(seed, 2));
    std::normal_distribution<double> gauss;
    for (double& x : a.data()) x += noise * gauss(rng);
  }
  return a;
}

}  // namespace sqla::oracle
