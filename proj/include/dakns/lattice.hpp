#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "dakns/error.hpp"
#include "dakns/matrix.hpp"
#include "dakns/series.hpp"

namespace dakns {

/// Lattice window: sites [n_min, n_max] plus `halo` padding stored on each side.
struct Window {
  int n_min = 0;
  int n_max = 0;
  int halo = 0;

  int store_lo() const { return n_min - halo; }
  int store_hi() const { return n_max + halo; }
  int size() const { return store_hi() - store_lo() + 1; }
  bool stored(int n) const { return n >= store_lo() && n <= store_hi(); }

  void validate() const {
    if (n_min > n_max) throw input_error("window n_min > n_max");
    if (halo < 0) throw input_error("window halo must be non-negative");
  }

  friend bool operator==(const Window&, const Window&) = default;
};

enum class DeltaKind { forward, dual };

/// Function of n on a finite window, constant outside storage.
///
/// V is Matrix<T> or Series<T>. The claimable region [claim_lo, claim_hi] is
/// where values are trusted; it starts as the stored range and shrinks as
/// shifts reference sites beyond storage.
template <class V>
class LatticeFn {
 public:
  using value_type = V;
  using T = typename V::scalar_type;

  LatticeFn() = default;

  LatticeFn(Window w, const V& fill, V left_tail, V right_tail, T step = T(1))
      : win_(w),
        values_(static_cast<std::size_t>(w.size()), fill),
        left_(std::move(left_tail)),
        right_(std::move(right_tail)),
        step_(std::move(step)),
        claim_lo_(w.store_lo()),
        claim_hi_(w.store_hi()) {
    w.validate();
    if (!(step_ > T(0))) throw input_error("lattice step must be positive");
  }

  /// Constant function with equal tails.
  static LatticeFn constant(Window w, const V& c, T step = T(1)) {
    return LatticeFn(w, c, c, c, std::move(step));
  }

  const Window& window() const { return win_; }
  const T& step() const { return step_; }
  const V& left_tail() const { return left_; }
  const V& right_tail() const { return right_; }
  void set_left_tail(V v) { left_ = std::move(v); }
  void set_right_tail(V v) { right_ = std::move(v); }

  int claim_lo() const { return claim_lo_; }
  int claim_hi() const { return claim_hi_; }
  void set_claim(int lo, int hi) {
    claim_lo_ = lo;
    claim_hi_ = hi;
  }

  /// Total evaluation: stored value inside, tail outside.
  const V& at(int n) const {
    if (n < win_.store_lo()) return left_;
    if (n > win_.store_hi()) return right_;
    return values_[static_cast<std::size_t>(n - win_.store_lo())];
  }

  V& operator[](int n) {
    if (!win_.stored(n)) throw dimension_error("site " + std::to_string(n) + " not stored");
    return values_[static_cast<std::size_t>(n - win_.store_lo())];
  }

  const std::vector<V>& values() const { return values_; }

  /// Applies `fn` to every stored value and both tails.
  template <class F>
  auto map(F fn) const {
    using W = decltype(fn(left_));
    LatticeFn<W> r(win_, fn(at(win_.store_lo())), fn(left_), fn(right_), step_);
    for (int n = win_.store_lo(); n <= win_.store_hi(); ++n) r[n] = fn(at(n));
    r.set_claim(claim_lo_, claim_hi_);
    return r;
  }

  /// Same as map but passes the site as well.
  template <class F>
  auto map_sites(F fn) const {
    using W = decltype(fn(0, left_));
    LatticeFn<W> r(win_, fn(win_.store_lo(), at(win_.store_lo())), fn(win_.store_lo() - 1, left_),
                   fn(win_.store_hi() + 1, right_), step_);
    for (int n = win_.store_lo(); n <= win_.store_hi(); ++n) r[n] = fn(n, at(n));
    r.set_claim(claim_lo_, claim_hi_);
    return r;
  }

  friend bool operator==(const LatticeFn& a, const LatticeFn& b) {
    return a.win_ == b.win_ && a.step_ == b.step_ && a.left_ == b.left_ && a.right_ == b.right_ &&
           a.values_ == b.values_;
  }

 private:
  Window win_;
  std::vector<V> values_;
  V left_;
  V right_;
  T step_ = T(1);
  int claim_lo_ = 0;
  int claim_hi_ = -1;
};

template <class V>
void check_compatible(const LatticeFn<V>& f, const LatticeFn<V>& g) {
  if (!(f.window() == g.window())) throw dimension_error("lattice functions on different windows");
  if (!(f.step() == g.step())) throw dimension_error("lattice functions with different steps");
}

/// (Λ^j f)(n) = f(n + j).
template <class V>
LatticeFn<V> shift_apply(const LatticeFn<V>& f, int j) {
  const Window& w = f.window();
  LatticeFn<V> r(w, f.left_tail(), f.left_tail(), f.right_tail(), f.step());
  for (int n = w.store_lo(); n <= w.store_hi(); ++n) r[n] = f.at(n + j);
  int lo = f.claim_lo(), hi = f.claim_hi();
  if (j > 0) hi -= j;
  if (j < 0) lo -= j;
  r.set_claim(lo, hi);
  return r;
}

/// Forward difference (f(n+1) - f(n))/ε or dual difference (f(n-1) - f(n))/ε.
/// With use_step = false the division by ε is skipped.
template <class V>
LatticeFn<V> delta_apply(const LatticeFn<V>& f, DeltaKind kind, bool use_step = true) {
  const Window& w = f.window();
  V zero = f.left_tail() - f.left_tail();
  LatticeFn<V> r(w, zero, zero, f.right_tail() - f.right_tail(), f.step());
  const int off = kind == DeltaKind::forward ? 1 : -1;
  for (int n = w.store_lo(); n <= w.store_hi(); ++n) {
    V d = f.at(n + off) - f.at(n);
    if (use_step) d = d / f.step();
    r[n] = std::move(d);
  }
  int lo = f.claim_lo(), hi = f.claim_hi();
  if (kind == DeltaKind::forward)
    --hi;
  else
    ++lo;
  r.set_claim(lo, hi);
  return r;
}

template <class V>
LatticeFn<V> combine_sites(const LatticeFn<V>& f, const LatticeFn<V>& g, auto op) {
  check_compatible(f, g);
  const Window& w = f.window();
  LatticeFn<V> r(w, op(f.left_tail(), g.left_tail()), op(f.left_tail(), g.left_tail()),
                 op(f.right_tail(), g.right_tail()), f.step());
  for (int n = w.store_lo(); n <= w.store_hi(); ++n) r[n] = op(f.at(n), g.at(n));
  r.set_claim(std::max(f.claim_lo(), g.claim_lo()), std::min(f.claim_hi(), g.claim_hi()));
  return r;
}

template <class V>
LatticeFn<V> operator+(const LatticeFn<V>& f, const LatticeFn<V>& g) {
  return combine_sites(f, g, [](const V& a, const V& b) { return a + b; });
}

template <class V>
LatticeFn<V> operator-(const LatticeFn<V>& f, const LatticeFn<V>& g) {
  return combine_sites(f, g, [](const V& a, const V& b) { return a - b; });
}

/// Sitewise product f(n) g(n).
template <class V>
LatticeFn<V> operator*(const LatticeFn<V>& f, const LatticeFn<V>& g) {
  return combine_sites(f, g, [](const V& a, const V& b) { return a * b; });
}

/// Σ_n tr(f(n) g(n)). Both tail products must vanish.
template <Scalar T>
T inner_product(const LatticeFn<Matrix<T>>& f, const LatticeFn<Matrix<T>>& g) {
  check_compatible(f, g);
  if (!(f.left_tail() * g.left_tail()).is_zero() || !(f.right_tail() * g.right_tail()).is_zero())
    throw input_error("inner product of functions without compact joint support");
  T s(0);
  const Window& w = f.window();
  for (int n = w.store_lo(); n <= w.store_hi(); ++n) s += (f.at(n) * g.at(n)).trace();
  return s;
}

}  // namespace dakns
