#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sst/matrix.hpp"
#include "sst/parallel.hpp"

// Dense kernels shared by the trackers and ESPRIT: products, thin QR with
// deterministic rank-deficiency completion, a small dense eigensolver and a
// least-squares solve. OpenMP paths partition output elements only, so they
// are bit-identical to the serial loops at any thread count.
namespace sst::linalg {

template <typename T>
bool all_finite(const Matrix<T>& m) {
  for (std::size_t i = 0; i < m.size(); ++i)
    if (!field::finite(m.data()[i])) return false;
  return true;
}

template <typename T>
bool all_finite(std::span<const T> v) {
  for (const T& x : v)
    if (!field::finite(x)) return false;
  return true;
}

template <typename T>
double frobenius_norm_sq(const Matrix<T>& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) s += field::abs_sq(m.data()[i]);
  return s;
}

template <typename T>
double frobenius_norm(const Matrix<T>& m) {
  return std::sqrt(frobenius_norm_sq(m));
}

template <typename T>
double vector_norm(std::span<const T> v) {
  double s = 0.0;
  for (const T& x : v) s += field::abs_sq(x);
  return std::sqrt(s);
}

// C = A * B. Row-partitioned; each C(i,j) accumulates over k in fixed order.
template <typename T>
Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul: inner dimensions disagree");
  Matrix<T> c(a.rows(), b.cols());
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(a.rows());
  const std::size_t n = b.cols(), kk = a.cols();
  const bool par = par::should_parallelize(a.rows() * n * kk);
#pragma omp parallel for schedule(static) if (par)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    T* ci = c.row(static_cast<std::size_t>(i));
    const T* ai = a.row(static_cast<std::size_t>(i));
    for (std::size_t k = 0; k < kk; ++k) {
      const T aik = ai[k];
      const T* bk = b.row(k);
      for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

// C = A^H * B (plain transpose in the real field).
template <typename T>
Matrix<T> conj_transpose_matmul(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() != b.rows())
    throw DimensionError("conj_transpose_matmul: row counts disagree");
  Matrix<T> c(a.cols(), b.cols());
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(a.cols());
  const std::size_t n = b.cols(), kk = a.rows();
  const bool par = par::should_parallelize(a.cols() * n * kk);
#pragma omp parallel for schedule(static) if (par)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    T* ci = c.row(static_cast<std::size_t>(i));
    for (std::size_t k = 0; k < kk; ++k) {
      const T aki = field::conj(a(k, static_cast<std::size_t>(i)));
      const T* bk = b.row(k);
      for (std::size_t j = 0; j < n; ++j) ci[j] += aki * bk[j];
    }
  }
  return c;
}

// w = A^H x, length cols(A).
template <typename T>
std::vector<T> conj_transpose_matvec(const Matrix<T>& a, std::span<const T> x) {
  if (a.rows() != x.size())
    throw DimensionError("conj_transpose_matvec: vector length disagrees");
  std::vector<T> w(a.cols(), T{});
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const T* ai = a.row(i);
    const T xi = x[i];
    for (std::size_t j = 0; j < a.cols(); ++j) w[j] += field::conj(ai[j]) * xi;
  }
  return w;
}

// y = A w, length rows(A).
template <typename T>
std::vector<T> matvec(const Matrix<T>& a, std::span<const T> w) {
  if (a.cols() != w.size()) throw DimensionError("matvec: vector length disagrees");
  std::vector<T> y(a.rows(), T{});
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(a.rows());
  const bool par = par::should_parallelize(a.rows() * a.cols());
#pragma omp parallel for schedule(static) if (par)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    const T* ai = a.row(static_cast<std::size_t>(i));
    T acc{};
    for (std::size_t j = 0; j < a.cols(); ++j) acc += ai[j] * w[j];
    y[static_cast<std::size_t>(i)] = acc;
  }
  return y;
}

// S += c * x * w^H (rank-one update with conjugated right factor).
template <typename T>
void add_scaled_outer(Matrix<T>& s, double c, std::span<const T> x, std::span<const T> w) {
  if (s.rows() != x.size() || s.cols() != w.size())
    throw DimensionError("add_scaled_outer: shape disagrees");
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(s.rows());
  const bool par = par::should_parallelize(s.rows() * s.cols());
#pragma omp parallel for schedule(static) if (par)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    T* si = s.row(static_cast<std::size_t>(i));
    const T cx = x[static_cast<std::size_t>(i)] * T{c};
    for (std::size_t j = 0; j < s.cols(); ++j) si[j] += cx * field::conj(w[j]);
  }
}

// C += x * x^H, the empirical covariance accumulator.
template <typename T>
void accumulate_self_outer(Matrix<T>& c, std::span<const T> x) {
  if (c.rows() != x.size() || c.cols() != x.size())
    throw DimensionError("accumulate_self_outer: shape disagrees");
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(c.rows());
  const bool par = par::should_parallelize(c.rows() * c.cols());
#pragma omp parallel for schedule(static) if (par)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    T* ci = c.row(static_cast<std::size_t>(i));
    const T xi = x[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < c.cols(); ++j) ci[j] += xi * field::conj(x[j]);
  }
}

template <typename T>
struct QrResult {
  Matrix<T> q;           // n x r, orthonormal columns
  Matrix<T> r;           // r x r upper triangular (diagonal 0 for completed columns)
  bool rank_deficient = false;
};

namespace detail {

// Two-pass MGS projection of column j of q against columns [0, j).
template <typename T>
void project_out(Matrix<T>& q, Matrix<T>* r, std::size_t j) {
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < j; ++i) {
      T h{};
      for (std::size_t row = 0; row < q.rows(); ++row)
        h += field::conj(q(row, i)) * q(row, j);
      for (std::size_t row = 0; row < q.rows(); ++row) q(row, j) -= h * q(row, i);
      if (r) (*r)(i, j) += h;
    }
  }
}

template <typename T>
double column_norm(const Matrix<T>& m, std::size_t j) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) s += field::abs_sq(m(i, j));
  return std::sqrt(s);
}

// Replaces a deflated column with the first canonical basis vector that is
// not already spanned, orthonormalized against the accepted columns. The
// scan order makes seeded runs reproducible.
template <typename T>
void complete_column(Matrix<T>& q, std::size_t j) {
  const std::size_t n = q.rows();
  std::size_t best = n;
  double best_norm = 0.0;
  for (std::size_t idx = 0; idx < n; ++idx) {
    for (std::size_t row = 0; row < n; ++row) q(row, j) = T{};
    q(idx, j) = T{1};
    project_out<T>(q, nullptr, j);
    double nrm = column_norm(q, j);
    if (nrm > 0.5) {
      for (std::size_t row = 0; row < n; ++row) q(row, j) = q(row, j) * T{1.0 / nrm};
      return;
    }
    if (nrm > best_norm) {
      best_norm = nrm;
      best = idx;
    }
  }
  if (best == n || best_norm < 1e-8)
    throw RankError("qr completion: no canonical direction available");
  for (std::size_t row = 0; row < n; ++row) q(row, j) = T{};
  q(best, j) = T{1};
  project_out<T>(q, nullptr, j);
  double nrm = column_norm(q, j);
  for (std::size_t row = 0; row < n; ++row) q(row, j) = q(row, j) * T{1.0 / nrm};
}

}  // namespace detail

// Thin QR by modified Gram-Schmidt with reorthogonalization. Q's columns are
// linear combinations of M's, which preserves zero rows of M (needed for the
// sparse row-support guarantee). Columns whose deflated norm falls below
// rel_tol times the largest original column norm are rank-deficient; with
// `complete` set they are replaced by canonical completion directions,
// otherwise left normalized as-is when possible.
template <typename T>
QrResult<T> qr_decompose(const Matrix<T>& m, bool complete, double rel_tol = 1e-12) {
  const std::size_t n = m.rows(), r = m.cols();
  if (r < 1 || n < r) throw DimensionError("qr: need rows >= cols >= 1");
  if (!all_finite(m)) throw NonFiniteError("qr: non-finite entry");

  double max_col = 0.0;
  for (std::size_t j = 0; j < r; ++j)
    max_col = std::max(max_col, detail::column_norm(m, j));
  const double tol = rel_tol * max_col;

  QrResult<T> out;
  out.q = m;
  out.r = Matrix<T>(r, r);
  for (std::size_t j = 0; j < r; ++j) {
    detail::project_out(out.q, &out.r, j);
    double nrm = detail::column_norm(out.q, j);
    if (nrm <= tol) {
      out.rank_deficient = true;
      if (complete) {
        detail::complete_column(out.q, j);
        out.r(j, j) = T{};
        continue;
      }
      if (nrm == 0.0) {
        out.r(j, j) = T{};
        continue;  // caller checks the diagonal
      }
    }
    out.r(j, j) = T{nrm};
    for (std::size_t row = 0; row < n; ++row)
      out.q(row, j) = out.q(row, j) * T{1.0 / nrm};
  }
  return out;
}

// Q-factor with deterministic completion of dependent columns.
template <typename T>
std::pair<Matrix<T>, bool> qr_orthonormalize(const Matrix<T>& m) {
  auto res = qr_decompose(m, /*complete=*/true);
  return {std::move(res.q), res.rank_deficient};
}

// Minimizes ||A X - B||_F via thin QR and back substitution. Throws
// RankError when A's effective column rank is below cols(A).
template <typename T>
Matrix<T> least_squares_solve(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() != b.rows()) throw DimensionError("least_squares_solve: row counts disagree");
  if (a.rows() < a.cols()) throw DimensionError("least_squares_solve: need rows >= cols");
  auto qr = qr_decompose(a, /*complete=*/false);
  double dmax = 0.0, dmin = 0.0;
  for (std::size_t i = 0; i < a.cols(); ++i) {
    double d = std::abs(field::real(qr.r(i, i)));
    dmax = std::max(dmax, d);
    dmin = i == 0 ? d : std::min(dmin, d);
  }
  if (dmin <= 1e-12 * dmax || dmax == 0.0)
    throw RankError("least_squares_solve: rank-deficient system");

  Matrix<T> x = conj_transpose_matmul(qr.q, b);  // r x s
  const std::size_t r = a.cols(), s = b.cols();
  for (std::size_t col = 0; col < s; ++col) {
    for (std::size_t i = r; i-- > 0;) {
      T acc = x(i, col);
      for (std::size_t k = i + 1; k < r; ++k) acc -= qr.r(i, k) * x(k, col);
      x(i, col) = acc / qr.r(i, i);
    }
  }
  return x;
}

// All eigenvalues (with multiplicity) of a small complex matrix, via
// Hessenberg reduction and shifted QR iteration. Intended for the r x r
// rotations ESPRIT produces; throws ConvergenceError past the iteration
// budget and DimensionError above 64 x 64.
std::vector<Complex> small_eigenvalues(const ComplexMatrix& p);

}  // namespace sst::linalg
