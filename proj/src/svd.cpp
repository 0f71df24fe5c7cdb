#include "sqla/svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sqla/errors.hpp"
#include "sqla/kernels.hpp"

namespace sqla {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void rotate(std::span<double> x, std::span<double> y, double c, double s) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

// Orthonormal columns for the zero singular directions: Gram-Schmidt (twice) of unit vectors
// against the columns already fixed. cols holds columns as rows.
void complete_basis(DenseMatrix& cols, const std::vector<bool>& fixed) {
  const std::size_t p = cols.rows();
  const std::size_t m = cols.cols();
  std::vector<std::size_t> done;
  for (std::size_t k = 0; k < p; ++k)
    if (fixed[k]) done.push_back(k);
  std::size_t candidate = 0;
  for (std::size_t k = 0; k < p; ++k) {
    if (fixed[k]) continue;
    auto target = cols.row(k);
    for (; candidate < m; ++candidate) {
      std::fill(target.begin(), target.end(), 0.0);
      target[candidate] = 1.0;
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t d : done) {
          const double proj = dot(cols.row(d), target);
          auto src = cols.row(d);
          for (std::size_t i = 0; i < m; ++i) target[i] -= proj * src[i];
        }
      const double nrm = std::sqrt(dot(target, target));
      if (nrm > 0.5) {
        for (double& t : target) t /= nrm;
        ++candidate;
        break;
      }
    }
    done.push_back(k);
  }
}

// One-sided Jacobi on a square matrix. Returns U (as rows), sigma and V (as rows), unsorted.
void jacobi_square(const DenseMatrix& a, DenseMatrix& ut, DenseVector& sigma, DenseMatrix& vt,
                   int max_sweeps) {
  const std::size_t n = a.cols();
  DenseMatrix x = a.transpose();  // row p is column p of a
  vt = DenseMatrix::identity(n);
  const double eps = std::numeric_limits<double>::epsilon();
  // Rounding in a dot product of length m is about sqrt(m) eps relative to the norms.
  const double tol = std::max(4.0, std::sqrt(static_cast<double>(x.cols()))) * eps;
  bool converged = n <= 1;
  std::vector<double> col_sq(n);
  double total = 0.0;
  for (std::size_t p = 0; p < n; ++p) total += col_sq[p] = dot(x.row(p), x.row(p));
  // Columns below this are rounding noise of a rank-deficient input; they are dropped rather
  // than rotated forever against each other.
  const double negligible = total * (static_cast<double>(n) * eps) * (static_cast<double>(n) * eps);
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = col_sq[p];
        const double beta = col_sq[q];
        if (alpha <= negligible || beta <= negligible) continue;
        const double gamma = dot(x.row(p), x.row(q));
        if (std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        rotate(x.row(p), x.row(q), c, s);
        rotate(vt.row(p), vt.row(q), c, s);
        col_sq[p] = dot(x.row(p), x.row(p));
        col_sq[q] = dot(x.row(q), x.row(q));
      }
    }
    converged = !rotated;
  }
  if (!converged)
    throw ConvergenceFailure("Jacobi SVD did not converge in " + std::to_string(max_sweeps) +
                             " sweeps");

  sigma.assign(n, 0.0);
  std::vector<bool> fixed(n, false);
  ut = DenseMatrix(n, x.cols());
  for (std::size_t p = 0; p < n; ++p) {
    const double sq = dot(x.row(p), x.row(p));
    sigma[p] = sq > negligible ? std::sqrt(sq) : 0.0;
    if (sigma[p] > 0.0) {
      auto src = x.row(p);
      auto dst = ut.row(p);
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] / sigma[p];
      fixed[p] = true;
    }
  }
  complete_basis(ut, fixed);
}

SvdResult svd_tall(const DenseMatrix& a, int max_sweeps) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  DenseMatrix ut;
  DenseVector sigma;
  DenseMatrix vt;
  DenseMatrix q;
  if (m > n) {
    QrResult qr = householder_qr(a);
    jacobi_square(qr.r, ut, sigma, vt, max_sweeps);
    q = std::move(qr.q);
  } else {
    jacobi_square(a, ut, sigma, vt, max_sweeps);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

  SvdResult out;
  out.sigma.resize(n);
  DenseMatrix ur(n, n);  // U of the square factor, columns in sorted order
  out.v = DenseMatrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t p = order[c];
    out.sigma[c] = sigma[p];
    for (std::size_t i = 0; i < n; ++i) {
      ur(i, c) = ut(p, i);
      out.v(i, c) = vt(p, i);
    }
  }
  out.u = m > n ? kernels::matmul(q, ur) : std::move(ur);
  return out;
}

}  // namespace

QrResult householder_qr(const DenseMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m < n) throw DimensionMismatch(m, n);
  DenseMatrix r = a.transpose();  // row j holds column j; reflectors act on columns
  std::vector<std::vector<double>> reflectors(n);
  for (std::size_t j = 0; j < n; ++j) {
    auto col = r.row(j);
    double norm_sq = 0.0;
    for (std::size_t i = j; i < m; ++i) norm_sq += col[i] * col[i];
    const double norm = std::sqrt(norm_sq);
    std::vector<double>& v = reflectors[j];
    v.assign(m - j, 0.0);
    if (norm == 0.0) continue;
    const double alpha = col[j] >= 0.0 ? -norm : norm;
    for (std::size_t i = j; i < m; ++i) v[i - j] = col[i];
    v[0] -= alpha;
    double v_sq = 0.0;
    for (double t : v) v_sq += t * t;
    if (v_sq == 0.0) {
      v.assign(m - j, 0.0);
      continue;
    }
    const double inv = 1.0 / std::sqrt(v_sq);
    for (double& t : v) t *= inv;
    for (std::size_t k = j; k < n; ++k) {
      auto ck = r.row(k);
      double d = 0.0;
      for (std::size_t i = j; i < m; ++i) d += v[i - j] * ck[i];
      for (std::size_t i = j; i < m; ++i) ck[i] -= 2.0 * d * v[i - j];
    }
  }

  QrResult out;
  out.r = DenseMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= j; ++i) out.r(i, j) = r(j, i);

  // Q = H_0 H_1 ... H_{n-1} applied to the first n unit vectors.
  DenseMatrix qt(n, m);
  for (std::size_t c = 0; c < n; ++c) {
    auto e = qt.row(c);
    e[c] = 1.0;
    for (std::size_t jj = n; jj-- > 0;) {
      const std::vector<double>& v = reflectors[jj];
      double d = 0.0;
      for (std::size_t i = jj; i < m; ++i) d += v[i - jj] * e[i];
      if (d == 0.0) continue;
      for (std::size_t i = jj; i < m; ++i) e[i] -= 2.0 * d * v[i - jj];
    }
  }
  out.q = qt.transpose();
  return out;
}

SvdResult dense_svd(const DenseMatrix& w, int max_sweeps) {
  for (double x : w.data())
    if (!std::isfinite(x)) throw InvalidParameter("dense_svd: non-finite entry");
  if (w.rows() >= w.cols()) return svd_tall(w, max_sweeps);
  SvdResult t = svd_tall(w.transpose(), max_sweeps);
  std::swap(t.u, t.v);
  return t;
}

}  // namespace sqla
