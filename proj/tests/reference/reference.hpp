#pragma once

// Independent reference implementations used only by tests. Everything here
// favors simplicity over speed: serial loops, classical textbook formulas,
// no shortcuts shared with the library code under test.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "sst/matrix.hpp"

namespace ref {

using sst::Complex;
using sst::Matrix;

template <typename T>
Matrix<T> naive_matmul(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("naive_matmul shape");
  Matrix<T> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      T acc{};
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      c(i, j) = acc;
    }
  return c;
}

template <typename T>
Matrix<T> naive_conj_transpose_matmul(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("naive_ctm shape");
  Matrix<T> c(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.cols(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      T acc{};
      for (std::size_t k = 0; k < a.rows(); ++k)
        acc += sst::field::conj(a(k, i)) * b(k, j);
      c(i, j) = acc;
    }
  return c;
}

// Classical Gram-Schmidt with one full reorthogonalization pass. Distinct
// from the library's modified Gram-Schmidt; spans must agree regardless.
template <typename T>
Matrix<T> cgs_orthonormalize(const Matrix<T>& m) {
  const std::size_t n = m.rows(), r = m.cols();
  Matrix<T> q = m;
  for (std::size_t j = 0; j < r; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < j; ++i) {
        T dot{};
        for (std::size_t row = 0; row < n; ++row)
          dot += sst::field::conj(q(row, i)) * q(row, j);
        for (std::size_t row = 0; row < n; ++row) q(row, j) -= dot * q(row, i);
      }
    }
    double nrm = 0.0;
    for (std::size_t row = 0; row < n; ++row) nrm += sst::field::abs_sq(q(row, j));
    nrm = std::sqrt(nrm);
    if (nrm < 1e-13) throw std::runtime_error("cgs: rank deficient input");
    for (std::size_t row = 0; row < n; ++row) q(row, j) = q(row, j) * T{1.0 / nrm};
  }
  return q;
}

// Cyclic Jacobi for Hermitian matrices. Returns real eigenvalues (diagonal
// after convergence) and the accumulated unitary V, columns = eigenvectors.
template <typename T>
struct JacobiEigen {
  std::vector<double> values;
  Matrix<T> vectors;
};

template <typename T>
JacobiEigen<T> jacobi_hermitian_eigen(Matrix<T> a, int max_sweeps = 60) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("jacobi: square input required");
  Matrix<T> v = Matrix<T>::identity(n);

  auto off_norm = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += sst::field::abs_sq(a(i, j));
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < max_sweeps && off_norm() > 1e-14; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = std::sqrt(sst::field::abs_sq(a(p, q)));
        if (apq < 1e-300) continue;
        // phase: unit scalar with a(p,q) = |a(p,q)| * phase
        const T phase = a(p, q) * T{1.0 / apq};
        const double app = sst::field::real(a(p, p));
        const double aqq = sst::field::real(a(q, q));
        const double tau = (aqq - app) / (2.0 * apq);
        const double tt = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + tt * tt);
        const double s = tt * c;
        const T jp = T{c};
        const T jq = phase * T{s};  // J(p,q) entry; J(q,p) = -conj(jq)

        for (std::size_t row = 0; row < n; ++row) {
          const T ap = a(row, p), aq = a(row, q);
          a(row, p) = ap * jp - aq * sst::field::conj(jq);
          a(row, q) = ap * jq + aq * jp;
        }
        for (std::size_t col = 0; col < n; ++col) {
          const T ap = a(p, col), aq = a(q, col);
          a(p, col) = jp * ap - jq * aq;
          a(q, col) = sst::field::conj(jq) * ap + jp * aq;
        }
        for (std::size_t row = 0; row < n; ++row) {
          const T vp = v(row, p), vq = v(row, q);
          v(row, p) = vp * jp - vq * sst::field::conj(jq);
          v(row, q) = vp * jq + vq * jp;
        }
      }
  }

  JacobiEigen<T> out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = sst::field::real(a(i, i));
  out.vectors = std::move(v);
  return out;
}

// Characteristic polynomial coefficients via Faddeev-LeVerrier, roots via
// Durand-Kerner. Suitable oracle for the small dense eigensolver.
inline std::vector<Complex> durand_kerner_roots(const Matrix<Complex>& m) {
  const std::size_t n = m.rows();
  if (m.cols() != n) throw std::invalid_argument("durand_kerner: square input required");

  // coeffs[k] multiplies x^k; coeffs[n] = 1
  std::vector<Complex> coeffs(n + 1);
  coeffs[n] = Complex{1.0, 0.0};
  Matrix<Complex> mk = m;
  for (std::size_t k = 1; k <= n; ++k) {
    if (k > 1) {
      Matrix<Complex> shifted = mk;
      for (std::size_t i = 0; i < n; ++i) shifted(i, i) += coeffs[n - k + 1];
      mk = naive_matmul(m, shifted);
    }
    Complex tr{};
    for (std::size_t i = 0; i < n; ++i) tr += mk(i, i);
    coeffs[n - k] = -tr / static_cast<double>(k);
  }

  auto eval = [&](Complex x) {
    Complex acc = coeffs[n];
    for (std::size_t k = n; k-- > 0;) acc = acc * x + coeffs[k];
    return acc;
  };

  std::vector<Complex> roots(n);
  const Complex base{0.4, 0.9};
  Complex powv{1.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    powv *= base;
    roots[i] = powv;
  }
  for (int iter = 0; iter < 1000; ++iter) {
    double max_move = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Complex denom{1.0, 0.0};
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) denom *= roots[i] - roots[j];
      const Complex delta = eval(roots[i]) / denom;
      roots[i] -= delta;
      max_move = std::max(max_move, std::abs(delta));
    }
    if (max_move < 1e-14) break;
  }
  return roots;
}

// Principal angles between the column spans. Cosines come from the singular
// values of U^H V; small angles lose half the precision through acos, so
// those are recomputed from the sine route ||V - U(U^H V)|| instead
// (Knyazev-Argentati style split at pi/4).
template <typename T>
std::vector<double> principal_angles(const Matrix<T>& u, const Matrix<T>& v) {
  const Matrix<T> m = naive_conj_transpose_matmul(u, v);
  const Matrix<T> g = naive_conj_transpose_matmul(m, m);
  auto cos_eig = jacobi_hermitian_eigen(g);
  std::vector<double> from_cos(cos_eig.values.size());
  for (std::size_t i = 0; i < from_cos.size(); ++i) {
    const double sigma = std::sqrt(std::max(0.0, cos_eig.values[i]));
    from_cos[i] = std::acos(std::clamp(sigma, 0.0, 1.0));
  }
  std::sort(from_cos.begin(), from_cos.end());

  Matrix<T> resid = v;
  const Matrix<T> um = naive_matmul(u, m);
  for (std::size_t i = 0; i < resid.size(); ++i) resid.data()[i] -= um.data()[i];
  auto sin_eig = jacobi_hermitian_eigen(naive_conj_transpose_matmul(resid, resid));
  std::vector<double> from_sin(sin_eig.values.size());
  for (std::size_t i = 0; i < from_sin.size(); ++i) {
    const double s = std::sqrt(std::max(0.0, sin_eig.values[i]));
    from_sin[i] = std::asin(std::clamp(s, 0.0, 1.0));
  }
  std::sort(from_sin.begin(), from_sin.end());

  std::vector<double> angles(from_cos.size());
  for (std::size_t i = 0; i < angles.size(); ++i)
    angles[i] = from_sin[i] < 0.25 * std::numbers::pi ? from_sin[i] : from_cos[i];
  return angles;
}

// Minimal over permutations of the largest pairwise distance; exhaustive,
// for comparing small unordered eigenvalue sets.
inline double complex_set_distance(std::vector<Complex> a, std::vector<Complex> b) {
  if (a.size() != b.size()) throw std::invalid_argument("set distance size");
  std::vector<std::size_t> perm(a.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

inline double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

}  // namespace ref
