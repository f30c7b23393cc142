#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <type_traits>
#include <vector>

#include "sst/errors.hpp"

namespace sst {

using Complex = std::complex<double>;

// Scalar-field helpers. Real doubles are the conjugation-free case, so the
// same kernel templates serve both the real trackers and the complex DOA
// pipeline.
namespace field {

template <typename T>
struct is_complex : std::false_type {};
template <>
struct is_complex<Complex> : std::true_type {};

inline double conj(double x) { return x; }
inline Complex conj(const Complex& x) { return std::conj(x); }

inline double abs_sq(double x) { return x * x; }
inline double abs_sq(const Complex& x) { return std::norm(x); }

inline double real(double x) { return x; }
inline double real(const Complex& x) { return x.real(); }

inline bool finite(double x) { return std::isfinite(x); }
inline bool finite(const Complex& x) {
  return std::isfinite(x.real()) && std::isfinite(x.imag());
}

}  // namespace field

// Dense row-major matrix over double or complex<double>.
template <typename T>
class Matrix {
  static_assert(std::is_same_v<T, double> || std::is_same_v<T, Complex>,
                "Matrix supports double and complex<double> scalars");

 public:
  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols, T value = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  T* row(std::size_t i) { return data_.data() + i * cols_; }
  const T* row(std::size_t i) const { return data_.data() + i * cols_; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using RealMatrix = Matrix<double>;
using ComplexMatrix = Matrix<Complex>;

}  // namespace sst
