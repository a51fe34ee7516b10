#pragma once

#include <string>
#include <vector>

#include "dakns/error.hpp"
#include "dakns/lattice.hpp"
#include "dakns/matrix.hpp"
#include "dakns/series.hpp"

namespace dakns {

template <Scalar T>
using MatFn = LatticeFn<Matrix<T>>;

template <Scalar T>
using SeriesFn = LatticeFn<Series<T>>;

/// A = diag(a_1, ..., a_m) with distinct nonzero entries.
template <Scalar T>
struct AknsData {
  std::vector<T> a;

  int m() const { return static_cast<int>(a.size()); }

  Matrix<T> A() const { return Matrix<T>::diagonal(std::span<const T>(a)); }

  void validate() const {
    if (a.size() < 2 || a.size() > static_cast<std::size_t>(kMaxDim))
      throw input_error("A must have between 2 and 8 entries, got " + std::to_string(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (scalar_traits<T>::is_zero(a[i]))
        throw input_error("a_" + std::to_string(i + 1) + " is zero");
      for (std::size_t j = 0; j < i; ++j)
        if (a[i] == a[j])
          throw input_error("a_" + std::to_string(j + 1) + " and a_" + std::to_string(i + 1) +
                            " are not distinct");
    }
  }

  friend bool operator==(const AknsData&, const AknsData&) = default;
};

/// Checks zero tails, dimension and (optionally) zero diagonal of a potential.
template <Scalar T>
void validate_potential(const MatFn<T>& U, const AknsData<T>& data, bool zero_diagonal = true) {
  const int m = data.m();
  if (U.left_tail().dim() != m) throw dimension_error("potential dimension differs from A");
  if (!U.left_tail().is_zero() || !U.right_tail().is_zero())
    throw input_error("potential must have zero tails");
  if (!zero_diagonal) return;
  const Window& w = U.window();
  for (int n = w.store_lo(); n <= w.store_hi(); ++n)
    for (int i = 0; i < m; ++i)
      if (!scalar_traits<T>::is_zero(U.at(n)(i, i)))
        throw input_error("u_" + std::to_string(i + 1) + std::to_string(i + 1) + " nonzero at n=" +
                          std::to_string(n));
}

/// Which off-diagonal direction an entry recursion runs in.
enum class Direction { diagonal, forward, backward };

/// contracting: forward iff |a_i| <= |a_j| (ties forward); forward: all forward.
enum class BoundaryPolicy { contracting, forward };

inline std::string policy_name(BoundaryPolicy p) {
  return p == BoundaryPolicy::contracting ? "contracting" : "forward";
}

inline BoundaryPolicy parse_policy(const std::string& s) {
  if (s == "contracting") return BoundaryPolicy::contracting;
  if (s == "forward") return BoundaryPolicy::forward;
  throw input_error("unknown boundary policy '" + s + "'");
}

inline std::string direction_name(Direction d) {
  switch (d) {
    case Direction::diagonal: return "diagonal";
    case Direction::forward: return "forward";
    case Direction::backward: return "backward";
  }
  return "?";
}

inline Direction parse_direction(const std::string& s) {
  if (s == "diagonal") return Direction::diagonal;
  if (s == "forward") return Direction::forward;
  if (s == "backward") return Direction::backward;
  throw input_error("unknown direction '" + s + "'");
}

/// Per-entry recursion directions, fixed once per (A, policy).
struct Conventions {
  BoundaryPolicy policy = BoundaryPolicy::contracting;
  int m = 0;
  std::vector<Direction> dir;    // row-major m x m
  std::vector<bool> modulus_tie;  // |a_i| == |a_j|, i != j

  Direction at(int i, int j) const { return dir[static_cast<std::size_t>(i * m + j)]; }
  bool tie(int i, int j) const { return modulus_tie[static_cast<std::size_t>(i * m + j)]; }

  friend bool operator==(const Conventions&, const Conventions&) = default;
};

template <Scalar T>
Conventions make_conventions(const AknsData<T>& data, BoundaryPolicy policy) {
  Conventions c;
  c.policy = policy;
  c.m = data.m();
  const auto mm = static_cast<std::size_t>(c.m * c.m);
  c.dir.assign(mm, Direction::diagonal);
  c.modulus_tie.assign(mm, false);
  for (int i = 0; i < c.m; ++i)
    for (int j = 0; j < c.m; ++j) {
      if (i == j) continue;
      const T ai = abs_scalar(data.a[static_cast<std::size_t>(i)]);
      const T aj = abs_scalar(data.a[static_cast<std::size_t>(j)]);
      const auto k = static_cast<std::size_t>(i * c.m + j);
      c.modulus_tie[k] = ai == aj;
      c.dir[k] = (policy == BoundaryPolicy::forward || ai <= aj) ? Direction::forward
                                                                 : Direction::backward;
    }
  return c;
}

/// Solves a_i x(n) - a_j x(n+1) = rhs(n) entrywise for every (i, j).
///
/// `rhs` holds one matrix per site n in [s_lo - 1, s_hi]. Diagonal entries
/// integrate from a zero left tail and carry a constant right tail; forward
/// entries start from a zero left tail, backward entries from a zero right
/// tail, both with zero opposite tail.
template <Scalar T>
MatFn<T> solve_order(const AknsData<T>& data, const Conventions& conv,
                     const std::vector<Matrix<T>>& rhs, const Window& w, const T& step) {
  const int m = data.m();
  const int s_lo = w.store_lo(), s_hi = w.store_hi();
  if (static_cast<int>(rhs.size()) != s_hi - s_lo + 2)
    throw dimension_error("recursion right-hand side has wrong length");
  auto r = [&](int n, int i, int j) -> const T& {
    return rhs[static_cast<std::size_t>(n - s_lo + 1)](i, j);
  };
  MatFn<T> out(w, Matrix<T>(m), Matrix<T>(m), Matrix<T>(m), step);
  Matrix<T> right_tail(m);
  for (int i = 0; i < m; ++i) {
    const T& ai = data.a[static_cast<std::size_t>(i)];
    for (int j = 0; j < m; ++j) {
      const T& aj = data.a[static_cast<std::size_t>(j)];
      switch (conv.at(i, j)) {
        case Direction::diagonal: {
          T x(0);
          for (int n = s_lo - 1; n < s_hi; ++n) {
            x = x - r(n, i, i) / ai;
            out[n + 1](i, i) = x;
          }
          right_tail(i, i) = x - r(s_hi, i, i) / ai;
          break;
        }
        case Direction::forward: {
          T x(0);
          for (int n = s_lo - 1; n < s_hi; ++n) {
            x = (ai * x - r(n, i, j)) / aj;
            out[n + 1](i, j) = x;
          }
          break;
        }
        case Direction::backward: {
          T x(0);
          for (int n = s_hi; n >= s_lo; --n) {
            x = (r(n, i, j) + aj * x) / ai;
            out[n](i, j) = x;
          }
          break;
        }
      }
    }
  }
  out.set_right_tail(right_tail);
  return out;
}

/// Solved dressing ŵ = I + Σ_{k=1..N} w_k z^{-k}; w[0] is the identity.
template <Scalar T>
struct Dressing {
  int N = 0;
  std::vector<MatFn<T>> w;
  Conventions conv;

  friend bool operator==(const Dressing&, const Dressing&) = default;
};

template <Scalar T>
struct HierarchyState {
  AknsData<T> data;
  MatFn<T> U;
  int N = 0;
  Dressing<T> dressing;

  int m() const { return data.m(); }
  const Window& window() const { return U.window(); }
  const T& step() const { return U.step(); }

  /// Sites where every identity built from ŵ(n), ŵ(n+1) is asserted.
  int claim_lo() const { return window().store_lo(); }
  int claim_hi() const { return window().store_hi() - 1; }

  friend bool operator==(const HierarchyState&, const HierarchyState&) = default;
};

namespace detail {

template <Scalar T>
void check_depth(const MatFn<T>& U, int N) {
  if (N < 1) throw input_error("depth N must be >= 1");
  if (N > U.window().halo)
    throw input_error("depth N=" + std::to_string(N) + " exceeds halo " +
                      std::to_string(U.window().halo));
}

}  // namespace detail

/// Order-by-order solve of Δ_ε w_k + U w_k = A w_{k+1} - (Λ w_{k+1}) A.
/// Set `zero_diagonal` to false to accept potentials with a diagonal part.
template <Scalar T>
Dressing<T> solve_dressing(const AknsData<T>& data, const MatFn<T>& U, int N,
                           BoundaryPolicy policy = BoundaryPolicy::contracting,
                           bool zero_diagonal = true) {
  data.validate();
  validate_potential(U, data, zero_diagonal);
  detail::check_depth(U, N);
  const Window& w = U.window();
  const int m = data.m();
  const T& eps = U.step();
  Dressing<T> d;
  d.N = N;
  d.conv = make_conventions(data, policy);
  d.w.push_back(MatFn<T>::constant(w, Matrix<T>::identity(m), eps));
  std::vector<Matrix<T>> rhs(static_cast<std::size_t>(w.size() + 1), Matrix<T>(m));
  for (int k = 0; k < N; ++k) {
    const MatFn<T>& wk = d.w.back();
    for (int n = w.store_lo() - 1; n <= w.store_hi(); ++n) {
      const Matrix<T>& x = wk.at(n);
      rhs[static_cast<std::size_t>(n - w.store_lo() + 1)] =
          (wk.at(n + 1) - x) / eps + U.at(n) * x;
    }
    d.w.push_back(solve_order(data, d.conv, rhs, w, eps));
  }
  return d;
}

template <Scalar T>
HierarchyState<T> make_state(const AknsData<T>& data, const MatFn<T>& U, int N,
                             BoundaryPolicy policy = BoundaryPolicy::contracting,
                             bool zero_diagonal = true) {
  HierarchyState<T> s{data, U, N, solve_dressing(data, U, N, policy, zero_diagonal)};
  return s;
}

/// ŵ(n) as a series with hi = 0 and valid_lo = -N.
template <Scalar T>
Series<T> dressing_at(const Dressing<T>& d, int n) {
  const int m = d.w[0].left_tail().dim();
  Series<T> s(m, -d.N, 0);
  for (int k = 0; k <= d.N; ++k) s[-k] = d.w[static_cast<std::size_t>(k)].at(n);
  return s;
}

/// ŵ as a series-valued lattice function (tails included).
template <Scalar T>
SeriesFn<T> dressing_series(const Dressing<T>& d) {
  const Window& w = d.w[0].window();
  SeriesFn<T> r(w, dressing_at(d, w.store_lo()), dressing_at(d, w.store_lo() - 1),
                dressing_at(d, w.store_hi() + 1), d.w[0].step());
  for (int n = w.store_lo(); n <= w.store_hi(); ++n) r[n] = dressing_at(d, n);
  return r;
}

/// Sitewise difference Δ_ε ŵ + U ŵ - zAŵ + z(Λŵ)A of the two sides of the
/// dressing equation; valid through degree -N+1.
template <Scalar T>
Series<T> dressing_defect_at(const HierarchyState<T>& s, int n) {
  const Series<T> w0 = dressing_at(s.dressing, n);
  const Series<T> w1 = dressing_at(s.dressing, n + 1);
  const Matrix<T> A = s.data.A();
  Series<T> r = (w1 - w0) / s.step() + s.U.at(n) * w0;
  r = r - (A * w0).times_z(1) + (w1 * A).times_z(1);
  return r;
}

/// Max-norm of the dressing defect at one site.
template <Scalar T>
T dressing_residual_at(const HierarchyState<T>& s, int n) {
  return dressing_defect_at(s, n).max_abs();
}

/// Max-norm of the dressing defect over the claimable region.
template <Scalar T>
T dressing_residual(const HierarchyState<T>& s) {
  T best(0);
  for (int n = s.claim_lo(); n <= s.claim_hi(); ++n) {
    T r = dressing_residual_at(s, n);
    if (r > best) best = r;
  }
  return best;
}

}  // namespace dakns
