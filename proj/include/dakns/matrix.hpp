#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dakns/error.hpp"
#include "dakns/scalar.hpp"

namespace dakns {

inline constexpr int kMaxDim = 8;

/// Dense m x m matrix over a scalar ring, indexed (i, j) from zero.
template <Scalar T>
class Matrix {
 public:
  using scalar_type = T;

  Matrix() = default;

  explicit Matrix(int m) : m_(m), data_(static_cast<std::size_t>(m) * m, T(0)) {
    if (m < 1 || m > kMaxDim)
      throw dimension_error("matrix dimension " + std::to_string(m) + " outside [1, 8]");
  }

  static Matrix identity(int m) {
    Matrix r(m);
    for (int i = 0; i < m; ++i) r(i, i) = T(1);
    return r;
  }

  /// Elementary matrix with a single 1 at (i, j).
  static Matrix unit(int m, int i, int j) {
    Matrix r(m);
    r(i, j) = T(1);
    return r;
  }

  static Matrix diagonal(std::span<const T> d) {
    Matrix r(static_cast<int>(d.size()));
    for (int i = 0; i < r.m_; ++i) r(i, i) = d[static_cast<std::size_t>(i)];
    return r;
  }

  int dim() const { return m_; }

  T& operator()(int i, int j) { return data_[static_cast<std::size_t>(i * m_ + j)]; }
  const T& operator()(int i, int j) const { return data_[static_cast<std::size_t>(i * m_ + j)]; }

  Matrix& operator+=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(const T& s) {
    for (auto& x : data_) x *= s;
    return *this;
  }
  Matrix& operator/=(const T& s) {
    for (auto& x : data_) x /= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
  friend Matrix operator*(const T& s, Matrix a) { return a *= s; }
  friend Matrix operator/(Matrix a, const T& s) { return a /= s; }
  friend Matrix operator-(Matrix a) {
    for (auto& x : a.data_) x = -x;
    return a;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    a.check_same(b);
    const int m = a.m_;
    Matrix r(m);
    for (int i = 0; i < m; ++i)
      for (int l = 0; l < m; ++l) {
        const T& ail = a(i, l);
        if (scalar_traits<T>::is_zero(ail)) continue;
        for (int j = 0; j < m; ++j) r(i, j) += ail * b(l, j);
      }
    return r;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.m_ == b.m_ && a.data_ == b.data_;
  }

  Matrix transpose() const {
    Matrix r(m_);
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  T trace() const {
    T t(0);
    for (int i = 0; i < m_; ++i) t += (*this)(i, i);
    return t;
  }

  bool is_zero() const {
    for (const auto& x : data_)
      if (!scalar_traits<T>::is_zero(x)) return false;
    return true;
  }

  bool is_diagonal() const {
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j)
        if (i != j && !scalar_traits<T>::is_zero((*this)(i, j))) return false;
    return true;
  }

  /// Largest absolute entry.
  T max_abs() const {
    T best(0);
    for (const auto& x : data_) {
      T a = abs_scalar(x);
      if (a > best) best = a;
    }
    return best;
  }

  T max_abs_diagonal() const {
    T best(0);
    for (int i = 0; i < m_; ++i) {
      T a = abs_scalar((*this)(i, i));
      if (a > best) best = a;
    }
    return best;
  }

  std::span<const T> data() const { return data_; }

 private:
  void check_same(const Matrix& o) const {
    if (m_ != o.m_)
      throw dimension_error("matrix dimension mismatch: " + std::to_string(m_) + " vs " +
                            std::to_string(o.m_));
  }

  int m_ = 0;
  std::vector<T> data_;
};

/// Gauss-Jordan inverse; throws consistency_error when singular.
template <Scalar T>
Matrix<T> inverse(const Matrix<T>& a) {
  const int m = a.dim();
  Matrix<T> work = a;
  Matrix<T> inv = Matrix<T>::identity(m);
  for (int col = 0; col < m; ++col) {
    int pivot = -1;
    T best(0);
    for (int r = col; r < m; ++r) {
      T v = abs_scalar(work(r, col));
      if (scalar_traits<T>::is_zero(v)) continue;
      // Exact mode: first nonzero pivot suffices. Float mode: partial pivoting.
      if (pivot < 0 || (!scalar_traits<T>::exact && v > best)) {
        pivot = r;
        best = v;
        if constexpr (scalar_traits<T>::exact) break;
      }
    }
    if (pivot < 0) throw consistency_error("singular matrix");
    if (pivot != col)
      for (int j = 0; j < m; ++j) {
        std::swap(work(pivot, j), work(col, j));
        std::swap(inv(pivot, j), inv(col, j));
      }
    T p = work(col, col);
    for (int j = 0; j < m; ++j) {
      work(col, j) /= p;
      inv(col, j) /= p;
    }
    for (int r = 0; r < m; ++r) {
      if (r == col) continue;
      T f = work(r, col);
      if (scalar_traits<T>::is_zero(f)) continue;
      for (int j = 0; j < m; ++j) {
        work(r, j) -= f * work(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

}  // namespace dakns
