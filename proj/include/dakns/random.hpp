#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "dakns/hierarchy.hpp"

namespace dakns {

/// The one seeded generator every random instance is drawn from.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

  /// Random rational p/q with |p| <= num_max, 1 <= q <= den_max.
  template <Scalar T>
  T rational(int num_max, int den_max) {
    const int p = uniform_int(-num_max, num_max);
    const int q = uniform_int(1, den_max);
    return scalar_traits<T>::ratio(p, q);
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

/// Random zero-diagonal potential supported on [lo, hi].
template <Scalar T>
MatFn<T> random_potential(Rng& rng, int m, const Window& w, int lo, int hi, const T& step = T(1),
                          int num_max = 2, int den_max = 3) {
  MatFn<T> U(w, Matrix<T>(m), Matrix<T>(m), Matrix<T>(m), step);
  for (int n = lo; n <= hi; ++n)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (i != j) U[n](i, j) = rng.rational<T>(num_max, den_max);
  return U;
}

/// Random full matrix function supported on [lo, hi], zero tails.
template <Scalar T>
MatFn<T> random_compact(Rng& rng, int m, const Window& w, int lo, int hi, const T& step = T(1)) {
  MatFn<T> f(w, Matrix<T>(m), Matrix<T>(m), Matrix<T>(m), step);
  for (int n = lo; n <= hi; ++n)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) f[n](i, j) = rng.rational<T>(3, 4);
  return f;
}

/// U = δ_{n,site} c E_{ij}.
template <Scalar T>
MatFn<T> impulse_potential(int m, const Window& w, int site, int i, int j, const T& c = T(1)) {
  MatFn<T> U(w, Matrix<T>(m), Matrix<T>(m), Matrix<T>(m));
  U[site](i, j) = c;
  return U;
}

/// Samples off-diagonal entries amp_ij * exp(-x^2 / (2 width^2)) at x = x0 + n ε.
/// Entries are zeroed outside |x| <= cutoff to keep compact support.
inline MatFn<double> gaussian_potential(int m, const Window& w, double eps, double x0,
                                        const Matrix<double>& amp, double width, double cutoff) {
  MatFn<double> U(w, Matrix<double>(m), Matrix<double>(m), Matrix<double>(m), eps);
  for (int n = w.store_lo(); n <= w.store_hi(); ++n) {
    const double x = x0 + n * eps;
    if (std::fabs(x) > cutoff) continue;
    const double g = std::exp(-x * x / (2 * width * width));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (i != j) U[n](i, j) = amp(i, j) * g;
  }
  return U;
}

}  // namespace dakns
