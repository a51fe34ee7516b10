#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "dakns/dynamics.hpp"
#include "dakns/resolvent.hpp"

namespace dakns {

/// Finite sequence of flow labels; ∂_{w[0]} ∂_{w[1]} applied right to left.
using DerivativeWord = std::vector<FlowIndex>;

inline std::string word_label(const DerivativeWord& w) {
  if (w.empty()) return "()";
  std::string s;
  for (const auto& f : w) s += flow_label(f);
  return s;
}

enum class DerivativePath { analytic, numeric };

struct BilinearOptions {
  int l_max = 0;
  int m_delta = 0;  // 0 or 1
  DerivativeWord word;
  DerivativePath path = DerivativePath::analytic;
  double fd_step = 1e-3;  // central-difference step in t (numeric path)
  EvolveOptions evolve;
};

template <Scalar T>
struct BilinearResult {
  T residual;      // residue part + negative-degree part
  T residue_max;   // max over l <= l_max of |res_z(z^l P)|
  T negative_max;  // max |P_d| over valid d <= -1
  int valid_lo = 0;
};

namespace detail {

/// X(n) for a length-one analytic word: -B̄ ŵ + ŵ z^k E_α.
template <Scalar T>
SeriesFn<T> analytic_X(const HierarchyState<T>& s, const FlowIndex& f) {
  check_alpha<T>(s.m(), f.alpha);
  const SeriesFn<T> w = dressing_series(s.dressing);
  const Projection<T> P = projector_B(resolvent_dressed(s, f.alpha).R, f.k);
  const Matrix<T> E = Matrix<T>::unit(s.m(), f.alpha, f.alpha);
  SeriesFn<T> r = w;
  const Window& win = w.window();
  for (int n = win.store_lo(); n <= win.store_hi(); ++n)
    r[n] = -(P.Bbar.at(n) * w.at(n)) + (w.at(n) * E).times_z(f.k);
  return r;
}

template <Scalar T>
SeriesFn<T> add_right_factor(SeriesFn<T> X, const SeriesFn<T>& Y, const FlowIndex& f, int m) {
  const Matrix<T> E = Matrix<T>::unit(m, f.alpha, f.alpha);
  const Window& win = X.window();
  for (int n = win.store_lo(); n <= win.store_hi(); ++n) X[n] = X.at(n) + (Y.at(n) * E).times_z(f.k);
  return X;
}

inline SeriesFn<double> central_difference(const SeriesFn<double>& plus, const SeriesFn<double>& minus,
                                           double delta) {
  SeriesFn<double> r = plus;
  const Window& win = plus.window();
  for (int n = win.store_lo(); n <= win.store_hi(); ++n) r[n] = (plus.at(n) - minus.at(n)) / (2 * delta);
  return r;
}

/// U evolved by one RK4 step of ±δ along f, re-dressed.
inline HierarchyState<double> nudged(const HierarchyState<double>& s, const FlowIndex& f, double delta,
                                     const EvolveOptions& opt) {
  MatFn<double> U = rk4_step(s.data, s.U, s.N, f, delta, opt);
  return make_state(s.data, U, s.N, opt.policy, false);
}

template <Scalar T>
SeriesFn<T> word_X(const HierarchyState<T>& s, const BilinearOptions& o) {
  const auto& word = o.word;
  if (word.size() > 2) throw input_error("derivative words longer than 2 are not supported");
  if (word.empty()) return dressing_series(s.dressing);
  if (word.size() == 1 && o.path == DerivativePath::analytic) return analytic_X(s, word[0]);
  if constexpr (!std::same_as<T, double>) {
    throw input_error("numeric derivative path requires float mode");
  } else {
    const FlowIndex& outer = word[0];
    const double d = o.fd_step;
    if (word.size() == 1) {
      const SeriesFn<double> plus = dressing_series(nudged(s, outer, d, o.evolve).dressing);
      const SeriesFn<double> minus = dressing_series(nudged(s, outer, -d, o.evolve).dressing);
      return add_right_factor(central_difference(plus, minus, d), dressing_series(s.dressing), outer, s.m());
    }
    const FlowIndex& inner = word[1];
    const SeriesFn<double> plus = analytic_X(nudged(s, outer, d, o.evolve), inner);
    const SeriesFn<double> minus = analytic_X(nudged(s, outer, -d, o.evolve), inner);
    return add_right_factor(central_difference(plus, minus, d), analytic_X(s, inner), outer, s.m());
  }
}

}  // namespace detail

/// P(n) = (Δ^{mΔ} ∂^{word} w) w^{-1} with the exponential factor cancelled.
template <Scalar T>
Series<T> bilinear_expression_at(const HierarchyState<T>& s, const SeriesFn<T>& X, int n, int m_delta) {
  const Series<T> w = dressing_at(s.dressing, n);
  const Series<T> winv = series_inverse(w, s.N);
  if (m_delta == 0) return X.at(n) * winv;
  const T& eps = s.step();
  const Series<T> shift = Series<T>::identity(s.m()) + Series<T>::monomial(s.data.A() * eps, 1);
  return ((X.at(n + 1) * shift - X.at(n)) / eps) * winv;
}

/// Max over claimable sites of the bilinear residual for one (l_max, mΔ, word).
template <Scalar T>
BilinearResult<T> bilinear_residual(const HierarchyState<T>& s, const BilinearOptions& o) {
  if (o.m_delta != 0 && o.m_delta != 1) throw input_error("m_delta must be 0 or 1");
  if (o.l_max < 0) throw input_error("l_max must be non-negative");
  int k_total = 0;
  for (const auto& f : o.word) {
    check_alpha<T>(s.m(), f.alpha);
    if (f.k < 0) throw input_error("flow order must be non-negative");
    k_total += f.k;
  }
  const int budget = s.N - k_total - o.m_delta - 1;
  if (o.l_max > budget)
    throw validity_error("depth budget exceeded: l_max=" + std::to_string(o.l_max) + " > " +
                         std::to_string(budget) + " for N=" + std::to_string(s.N) + ", word " +
                         word_label(o.word) + ", m=" + std::to_string(o.m_delta));
  const SeriesFn<T> X = detail::word_X(s, o);
  BilinearResult<T> r{T(0), T(0), T(0), 0};
  for (int n = s.claim_lo(); n <= s.claim_hi(); ++n) {
    const Series<T> P = bilinear_expression_at(s, X, n, o.m_delta);
    r.valid_lo = P.valid_lo();
    for (int l = 0; l <= o.l_max; ++l) {
      T v = P.at(-1 - l).max_abs();
      if (v > r.residue_max) r.residue_max = v;
    }
    T v = P.max_abs(P.valid_lo(), -1);
    if (v > r.negative_max) r.negative_max = v;
  }
  r.residual = r.residue_max + r.negative_max;
  return r;
}

/// L_D f = Δ_ε f - zAf + Uf as a degree-1 polynomial in z (index 0, 1).
template <Scalar T>
std::pair<MatFn<T>, MatFn<T>> apply_L(const MatFn<T>& f, const AknsData<T>& data, const MatFn<T>& U) {
  MatFn<T> c0 = delta_apply(f, DeltaKind::forward) + U * f;
  MatFn<T> c1 = f.map([A = data.A()](const Matrix<T>& x) { return -(A * x); });
  return {c0, c1};
}

/// L*_D g = Δ*_ε g - z gA + gU, the adjoint under Σ tr(f g).
template <Scalar T>
std::pair<MatFn<T>, MatFn<T>> apply_L_dual(const MatFn<T>& g, const AknsData<T>& data, const MatFn<T>& U) {
  MatFn<T> c0 = delta_apply(g, DeltaKind::dual) + g * U;
  MatFn<T> c1 = g.map([A = data.A()](const Matrix<T>& x) { return -(x * A); });
  return {c0, c1};
}

template <Scalar T>
struct AdjointResult {
  T adjointness;  // max over z-degree of |<L f, g> - <f, L* g>|
  T dual_baker;   // max |ŵ^{-1}(n) - (I+εzA)^{-1} ŵ^{-1}(n+1) M(n)|, M = I + εzA - εU
  T top_defect;   // |top coefficient of (ŵ^{-1})^T - I|
};

/// Adjointness of L_D and L*_D on compact f, g, and the reduced dual Baker
/// residual L*_D(w^{-1}(n+1)) = 0 with the exponential factor cancelled.
template <Scalar T>
AdjointResult<T> adjoint_check(const HierarchyState<T>& s, const MatFn<T>& f, const MatFn<T>& g) {
  const Window& w = s.window();
  for (const MatFn<T>* h : {&f, &g}) {
    if (!h->left_tail().is_zero() || !h->right_tail().is_zero() || !h->at(w.store_lo()).is_zero() ||
        !h->at(w.store_hi()).is_zero())
      throw input_error("adjoint check needs functions vanishing on the stored boundary");
  }
  const auto [lf0, lf1] = apply_L(f, s.data, s.U);
  const auto [lg0, lg1] = apply_L_dual(g, s.data, s.U);
  T d0 = abs_scalar(T(inner_product(lf0, g) - inner_product(f, lg0)));
  T d1 = abs_scalar(T(inner_product(lf1, g) - inner_product(f, lg1)));
  AdjointResult<T> r{std::max(d0, d1), T(0), T(0)};

  const T& eps = s.step();
  const Matrix<T> A = s.data.A();
  const Series<T> shift = Series<T>::identity(s.m()) + Series<T>::monomial(A * eps, 1);
  const Series<T> shift_inv = series_inverse(shift, s.N);
  for (int n = s.claim_lo(); n <= s.claim_hi(); ++n) {
    const Series<T> wi0 = series_inverse(dressing_at(s.dressing, n), s.N);
    const Series<T> wi1 = series_inverse(dressing_at(s.dressing, n + 1), s.N);
    const Series<T> M = shift - Series<T>::constant(s.U.at(n) * eps);
    const Series<T> defect = wi0 - shift_inv * wi1 * M;
    T v = defect.max_abs();
    if (v > r.dual_baker) r.dual_baker = v;
    T t = (wi0.transpose().at(0) - Matrix<T>::identity(s.m())).max_abs();
    if (t > r.top_defect) r.top_defect = t;
  }
  return r;
}

}  // namespace dakns
