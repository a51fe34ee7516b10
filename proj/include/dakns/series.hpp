#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "dakns/error.hpp"
#include "dakns/matrix.hpp"

namespace dakns {

/// Truncated Laurent series in the spectral parameter z with m x m matrix
/// coefficients.
///
/// The top degree `hi` is always exact: nothing is ever dropped above it.
/// Truncation happens only from below and is tracked by `valid_lo`, the lowest
/// degree whose coefficient is guaranteed correct. Coefficients below
/// `valid_lo` are not stored and may not be read. A series whose lower tail is
/// known to vanish identically (a Laurent polynomial) is *exact*; reading any
/// degree of it is allowed.
///
/// Storage covers [lo, hi]. For a non-exact series lo == valid_lo; for an
/// exact series lo is the lowest stored degree and everything below is zero.
template <Scalar T>
class Series {
 public:
  using scalar_type = T;

  Series() = default;

  /// Zero series on [valid_lo, hi]. Pass `exact_below = true` for a polynomial
  /// (lo = valid_lo is then just the storage floor).
  Series(int m, int valid_lo, int hi, bool exact_below = false)
      : m_(m), lo_(valid_lo), hi_(hi), exact_(exact_below) {
    if (valid_lo > hi + 1) throw validity_error("series band with valid_lo > hi + 1");
    coeffs_.assign(static_cast<std::size_t>(hi - valid_lo + 1), Matrix<T>(m));
  }

  static Series constant(const Matrix<T>& c) { return monomial(c, 0); }

  static Series monomial(const Matrix<T>& c, int degree) {
    Series s(c.dim(), degree, degree, true);
    s.coeffs_[0] = c;
    return s;
  }

  static Series identity(int m) { return constant(Matrix<T>::identity(m)); }

  int dim() const { return m_; }
  int lo() const { return lo_; }
  int hi() const { return hi_; }
  bool exact() const { return exact_; }

  /// Lowest degree that may be read; `lo()` for exact series.
  int valid_lo() const { return lo_; }

  bool valid_at(int d) const { return exact_ || d >= lo_; }

  /// Coefficient of z^d. Zero above hi (and below lo for exact series).
  Matrix<T> at(int d) const {
    if (d > hi_) return Matrix<T>(m_);
    if (d < lo_) {
      if (exact_) return Matrix<T>(m_);
      throw validity_error("read of degree " + std::to_string(d) + " below valid_lo " +
                           std::to_string(lo_));
    }
    return coeffs_[static_cast<std::size_t>(d - lo_)];
  }

  /// Mutable access to a stored coefficient.
  Matrix<T>& operator[](int d) {
    if (d < lo_ || d > hi_)
      throw validity_error("degree " + std::to_string(d) + " outside stored band");
    return coeffs_[static_cast<std::size_t>(d - lo_)];
  }

  /// Raises valid_lo to at least d, discarding coefficients below it.
  Series truncated_below(int d) const {
    if (d <= lo_ && !exact_) return *this;
    int new_lo = std::max(d, exact_ ? std::numeric_limits<int>::min() : lo_);
    if (exact_ && d <= lo_) {
      // Lowering the floor of an exact series: pad with zeros, still not exact.
      Series r(m_, d, hi_);
      for (int k = lo_; k <= hi_; ++k) r[k] = at(k);
      return r;
    }
    Series r(m_, new_lo, hi_);
    for (int k = new_lo; k <= hi_; ++k) r[k] = at(k);
    return r;
  }

  /// Multiplication by z^k.
  Series times_z(int k) const {
    Series r = *this;
    r.lo_ += k;
    r.hi_ += k;
    return r;
  }

  Series transpose() const {
    Series r = *this;
    for (auto& c : r.coeffs_) c = c.transpose();
    return r;
  }

  /// Max absolute entry over valid degrees in [from, to].
  T max_abs(int from, int to) const {
    T best(0);
    for (int d = std::max(from, lo_); d <= std::min(to, hi_); ++d) {
      T a = coeffs_[static_cast<std::size_t>(d - lo_)].max_abs();
      if (a > best) best = a;
    }
    return best;
  }

  T max_abs() const { return max_abs(lo_, hi_); }

  Series& operator*=(const T& s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
  }
  Series& operator/=(const T& s) {
    for (auto& c : coeffs_) c /= s;
    return *this;
  }
  friend Series operator*(Series a, const T& s) { return a *= s; }
  friend Series operator*(const T& s, Series a) { return a *= s; }
  friend Series operator/(Series a, const T& s) { return a /= s; }
  friend Series operator-(Series a) {
    for (auto& c : a.coeffs_) c = -c;
    return a;
  }

  friend Series operator+(const Series& a, const Series& b) { return combine(a, b, false); }
  friend Series operator-(const Series& a, const Series& b) { return combine(a, b, true); }

  /// Cauchy product. valid_lo = max(valid_lo_a + hi_b, valid_lo_b + hi_a).
  friend Series operator*(const Series& a, const Series& b) {
    check_pair(a, b);
    const int hi = a.hi_ + b.hi_;
    int lo = 0;
    bool exact = a.exact_ && b.exact_;
    if (exact) {
      lo = a.lo_ + b.lo_;
    } else if (a.exact_) {
      lo = b.lo_ + a.hi_;
    } else if (b.exact_) {
      lo = a.lo_ + b.hi_;
    } else {
      lo = std::max(a.lo_ + b.hi_, b.lo_ + a.hi_);
    }
    lo = std::min(lo, hi + 1);
    Series r(a.m_, lo, hi, exact);
    for (int d = lo; d <= hi; ++d) {
      Matrix<T> acc(a.m_);
      const int i_lo = std::max(a.lo_, d - b.hi_);
      const int i_hi = std::min(a.hi_, d - b.lo_);
      for (int i = i_lo; i <= i_hi; ++i) {
        const auto& ai = a.coeffs_[static_cast<std::size_t>(i - a.lo_)];
        const auto& bj = b.coeffs_[static_cast<std::size_t>(d - i - b.lo_)];
        acc += ai * bj;
      }
      r[d] = std::move(acc);
    }
    return r;
  }

  friend Series operator*(const Matrix<T>& c, const Series& b) { return constant(c) * b; }
  friend Series operator*(const Series& a, const Matrix<T>& c) { return a * constant(c); }

  /// Representation equality (band, exactness and every stored coefficient).
  friend bool operator==(const Series& a, const Series& b) {
    return a.m_ == b.m_ && a.lo_ == b.lo_ && a.hi_ == b.hi_ && a.exact_ == b.exact_ &&
           a.coeffs_ == b.coeffs_;
  }

  /// Equality of the mathematical objects on their common valid band.
  bool agrees_with(const Series& o, int down_to) const {
    check_pair(*this, o);
    for (int d = down_to; d <= std::max(hi_, o.hi_); ++d)
      if (!(at(d) == o.at(d))) return false;
    return true;
  }

 private:
  static void check_pair(const Series& a, const Series& b) {
    if (a.m_ != b.m_)
      throw dimension_error("series dimension mismatch: " + std::to_string(a.m_) + " vs " +
                            std::to_string(b.m_));
  }

  static Series combine(const Series& a, const Series& b, bool subtract) {
    check_pair(a, b);
    const int hi = std::max(a.hi_, b.hi_);
    const bool exact = a.exact_ && b.exact_;
    int lo = 0;
    if (exact)
      lo = std::min(a.lo_, b.lo_);
    else if (a.exact_)
      lo = b.lo_;
    else if (b.exact_)
      lo = a.lo_;
    else
      lo = std::max(a.lo_, b.lo_);
    lo = std::min(lo, hi + 1);
    Series r(a.m_, lo, hi, exact);
    for (int d = lo; d <= hi; ++d) {
      Matrix<T> c = a.at(d);
      if (subtract)
        c -= b.at(d);
      else
        c += b.at(d);
      r[d] = std::move(c);
    }
    return r;
  }

  int m_ = 1;
  int lo_ = 0;
  int hi_ = -1;
  bool exact_ = true;
  std::vector<Matrix<T>> coeffs_;
};

/// Scalar series in z (m = 1) acting on a matrix series as s(z) * I.
template <Scalar T>
Series<T> scale(const Series<T>& s, const Series<T>& a) {
  if (s.dim() != 1) throw dimension_error("scale factor must be a scalar series (m = 1)");
  Series<T> promoted(a.dim(), s.valid_lo(), s.hi(), s.exact());
  for (int d = s.valid_lo(); d <= s.hi(); ++d)
    promoted[d] = Matrix<T>::identity(a.dim()) * s.at(d)(0, 0);
  return promoted * a;
}

/// Formal inverse a^{-1} with `depth` coefficients below its top degree -hi(a).
/// Requires the top coefficient to be invertible.
template <Scalar T>
Series<T> series_inverse(const Series<T>& a, int depth) {
  if (depth < 0) throw validity_error("negative inverse depth");
  const int h = a.hi();
  if (!a.exact() && depth > h - a.valid_lo())
    throw validity_error("inverse depth " + std::to_string(depth) + " exceeds input validity " +
                         std::to_string(h - a.valid_lo()));
  Matrix<T> top_inv = inverse(a.at(h));
  Series<T> b(a.dim(), -h - depth, -h);
  b[-h] = top_inv;
  for (int j = 1; j <= depth; ++j) {
    Matrix<T> acc(a.dim());
    for (int i = 1; i <= j; ++i) {
      if (!a.valid_at(h - i)) break;
      Matrix<T> ai = a.at(h - i);
      if (ai.is_zero()) continue;
      acc += ai * b[-h - j + i];
    }
    b[-h - j] = -(top_inv * acc);
  }
  return b;
}

/// Non-negative-degree part. Requires degree -1 to be valid.
template <Scalar T>
Series<T> series_plus(const Series<T>& a) {
  if (!a.valid_at(-1))
    throw validity_error("projection requires valid_lo <= -1, got " + std::to_string(a.valid_lo()));
  const int hi = std::max(a.hi(), 0);
  const int lo = std::max(a.valid_lo(), 0);
  Series<T> r(a.dim(), std::min(lo, hi), hi, true);
  for (int d = std::min(lo, hi); d <= hi; ++d) r[d] = a.at(d);
  return r;
}

/// Strictly negative-degree part, a - plus(a).
template <Scalar T>
Series<T> series_minus(const Series<T>& a) {
  if (!a.valid_at(-1))
    throw validity_error("projection requires valid_lo <= -1, got " + std::to_string(a.valid_lo()));
  const int hi = std::min(a.hi(), -1);
  Series<T> r(a.dim(), std::min(a.valid_lo(), hi + 1), hi, a.exact());
  for (int d = r.valid_lo(); d <= hi; ++d) r[d] = a.at(d);
  return r;
}

/// Coefficient of z^{-1}.
template <Scalar T>
Matrix<T> series_residue(const Series<T>& a) {
  if (!a.valid_at(-1)) throw validity_error("residue requested but degree -1 is not valid");
  return a.at(-1);
}

}  // namespace dakns
