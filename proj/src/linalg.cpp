#include "sst/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sst::linalg {

namespace {

using C = Complex;

// Householder similarity reduction to upper Hessenberg form, in place.
void hessenberg_reduce(ComplexMatrix& h) {
  const std::size_t n = h.rows();
  if (n < 3) return;
  std::vector<C> v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double xnorm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) xnorm += field::abs_sq(h(i, k));
    xnorm = std::sqrt(xnorm);
    if (xnorm == 0.0) continue;

    C x0 = h(k + 1, k);
    double x0abs = std::abs(x0);
    C phase = x0abs == 0.0 ? C{1.0, 0.0} : x0 / x0abs;
    C alpha = -phase * xnorm;

    double vnorm_sq = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      v[i] = h(i, k);
      if (i == k + 1) v[i] -= alpha;
      vnorm_sq += field::abs_sq(v[i]);
    }
    if (vnorm_sq == 0.0) continue;
    double inv = 1.0 / std::sqrt(vnorm_sq);
    for (std::size_t i = k + 1; i < n; ++i) v[i] *= inv;

    // H <- (I - 2 v v^H) H
    for (std::size_t j = k; j < n; ++j) {
      C dot{};
      for (std::size_t i = k + 1; i < n; ++i) dot += std::conj(v[i]) * h(i, j);
      dot *= 2.0;
      for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= v[i] * dot;
    }
    // H <- H (I - 2 v v^H)
    for (std::size_t i = 0; i < n; ++i) {
      C dot{};
      for (std::size_t j = k + 1; j < n; ++j) dot += h(i, j) * v[j];
      dot *= 2.0;
      for (std::size_t j = k + 1; j < n; ++j) h(i, j) -= dot * std::conj(v[j]);
    }
  }
  // Clean the fill-in below the first subdiagonal.
  for (std::size_t i = 2; i < n; ++i)
    for (std::size_t j = 0; j + 1 < i; ++j) h(i, j) = C{};
}

// Eigenvalues of [[a, b], [c, d]], larger-magnitude root first.
std::pair<C, C> eig2(C a, C b, C c, C d) {
  C tr = a + d;
  C det = a * d - b * c;
  C disc = std::sqrt(tr * tr - 4.0 * det);
  C l1 = 0.5 * (tr + disc);
  C l2 = 0.5 * (tr - disc);
  if (std::abs(l1) < std::abs(l2)) std::swap(l1, l2);
  if (std::abs(l1) > 0.0) l2 = det / l1;  // stable second root
  return {l1, l2};
}

struct Givens {
  double c;
  C s;
};

// Rotation with [c, s; -conj(s), c] * [a; b] = [r; 0], c real.
Givens make_givens(C a, C b) {
  double norm = std::sqrt(field::abs_sq(a) + field::abs_sq(b));
  if (norm == 0.0 || std::abs(b) == 0.0) return {1.0, C{}};
  if (std::abs(a) == 0.0) return {0.0, C{1.0, 0.0}};
  double aabs = std::abs(a);
  return {aabs / norm, (a / aabs) * std::conj(b) / norm};
}

}  // namespace

std::vector<Complex> small_eigenvalues(const ComplexMatrix& p) {
  const std::size_t n = p.rows();
  if (n == 0 || p.cols() != n) throw DimensionError("small_eigenvalues: square matrix required");
  if (n > 64) throw DimensionError("small_eigenvalues: intended for matrices up to 64 x 64");
  if (!all_finite(p)) throw NonFiniteError("small_eigenvalues: non-finite entry");

  if (n == 1) return {p(0, 0)};

  ComplexMatrix h = p;
  hessenberg_reduce(h);

  const double eps = std::numeric_limits<double>::epsilon();
  const double hnorm = std::max(frobenius_norm(h), 1e-300);

  std::vector<C> eigs;
  eigs.reserve(n);

  std::size_t hi = n - 1;
  std::size_t total_iters = 0;
  const std::size_t budget = 80 * n;
  std::size_t stall = 0;

  auto negligible = [&](std::size_t i) {
    double bound = eps * (std::abs(h(i - 1, i - 1)) + std::abs(h(i, i)));
    if (bound == 0.0) bound = eps * hnorm;
    return std::abs(h(i, i - 1)) <= bound;
  };

  while (true) {
    // Deflate converged trailing eigenvalues.
    while (hi > 0 && negligible(hi)) {
      h(hi, hi - 1) = C{};
      eigs.push_back(h(hi, hi));
      --hi;
      stall = 0;
    }
    if (hi == 0) {
      eigs.push_back(h(0, 0));
      break;
    }

    // Active window [lo, hi].
    std::size_t lo = hi;
    while (lo > 0 && !negligible(lo)) --lo;
    if (lo > 0) h(lo, lo - 1) = C{};

    if (hi - lo == 1) {
      auto [l1, l2] = eig2(h(lo, lo), h(lo, hi), h(hi, lo), h(hi, hi));
      eigs.push_back(l1);
      eigs.push_back(l2);
      if (lo == 0) break;
      hi = lo - 1;
      stall = 0;
      continue;
    }

    if (++total_iters > budget)
      throw ConvergenceError("small_eigenvalues: QR iteration exceeded its budget");

    // Wilkinson shift from the trailing 2x2, with an exceptional shift on
    // stalls.
    C shift;
    if (stall > 0 && stall % 12 == 0) {
      shift = h(hi, hi) + 0.75 * std::abs(h(hi, hi - 1));
    } else {
      auto [l1, l2] = eig2(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
      shift = std::abs(l1 - h(hi, hi)) < std::abs(l2 - h(hi, hi)) ? l1 : l2;
    }
    ++stall;

    // Explicit shifted QR step on the window: H - sI = QR, H <- RQ + sI.
    const std::size_t w = hi - lo + 1;
    for (std::size_t i = 0; i < w; ++i) h(lo + i, lo + i) -= shift;

    std::vector<Givens> rots(w - 1);
    for (std::size_t i = 0; i + 1 < w; ++i) {
      std::size_t row = lo + i;
      Givens g = make_givens(h(row, row), h(row + 1, row));
      rots[i] = g;
      for (std::size_t j = row; j <= hi; ++j) {
        C top = h(row, j), bot = h(row + 1, j);
        h(row, j) = g.c * top + g.s * bot;
        h(row + 1, j) = -std::conj(g.s) * top + g.c * bot;
      }
    }
    // Right-multiply by Q^H = G_0^H ... G_{w-2}^H.
    for (std::size_t i = 0; i + 1 < w; ++i) {
      std::size_t col = lo + i;
      const Givens& g = rots[i];
      std::size_t row_end = std::min(hi, col + 1);
      for (std::size_t row2 = lo; row2 <= row_end + 0; ++row2) {
        C left = h(row2, col), right = h(row2, col + 1);
        h(row2, col) = left * g.c + right * std::conj(g.s);
        h(row2, col + 1) = -left * g.s + right * g.c;
      }
    }
    for (std::size_t i = 0; i < w; ++i) h(lo + i, lo + i) += shift;
  }

  return eigs;
}

}  // namespace sst::linalg
