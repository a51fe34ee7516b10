#pragma once

#include <string>
#include <vector>

#include "dakns/hierarchy.hpp"

namespace dakns {

/// Resolvent R_α: series-valued lattice function with R_(0) = E_α.
template <Scalar T>
struct Resolvent {
  int alpha = 0;  // zero-based
  SeriesFn<T> R;
};

template <Scalar T>
void check_alpha(int m, int alpha) {
  if (alpha < 0 || alpha >= m)
    throw input_error("flow index alpha=" + std::to_string(alpha + 1) + " outside 1.." +
                      std::to_string(m));
}

/// R_α = ŵ E_α ŵ^{-1}, sitewise; validity depth N.
template <Scalar T>
Resolvent<T> resolvent_dressed(const HierarchyState<T>& s, int alpha) {
  check_alpha<T>(s.m(), alpha);
  const Matrix<T> E = Matrix<T>::unit(s.m(), alpha, alpha);
  const SeriesFn<T> w = dressing_series(s.dressing);
  auto conj = [&](const Series<T>& x) { return x * E * series_inverse(x, s.N); };
  return {alpha, w.map(conj)};
}

/// Builds R from per-order coefficient functions R_(0..N).
template <Scalar T>
SeriesFn<T> assemble_series(const std::vector<MatFn<T>>& coeffs) {
  const int N = static_cast<int>(coeffs.size()) - 1;
  const MatFn<T>& c0 = coeffs[0];
  const int m = c0.left_tail().dim();
  auto at = [&](int n) {
    Series<T> s(m, -N, 0);
    for (int i = 0; i <= N; ++i) s[-i] = coeffs[static_cast<std::size_t>(i)].at(n);
    return s;
  };
  const Window& w = c0.window();
  SeriesFn<T> r(w, at(w.store_lo()), at(w.store_lo() - 1), at(w.store_hi() + 1), c0.step());
  for (int n = w.store_lo(); n <= w.store_hi(); ++n) r[n] = at(n);
  return r;
}

/// Solves Δ_ε R_(i) - [R_(i), U]_D + [R_(i+1), A]_D = 0 from a constant
/// diagonal seed, sharing the dressing recursion kernel.
template <Scalar T>
SeriesFn<T> resolvent_direct_seed(const AknsData<T>& data, const MatFn<T>& U, const Matrix<T>& seed,
                                  int N, BoundaryPolicy policy = BoundaryPolicy::contracting,
                                  bool zero_diagonal = true) {
  data.validate();
  validate_potential(U, data, zero_diagonal);
  detail::check_depth(U, N);
  if (seed.dim() != data.m()) throw dimension_error("seed dimension differs from A");
  if (!seed.is_diagonal()) throw input_error("resolvent seed R_(0) must be diagonal and constant");
  const Window& w = U.window();
  const T& eps = U.step();
  const Conventions conv = make_conventions(data, policy);
  std::vector<MatFn<T>> coeffs{MatFn<T>::constant(w, seed, eps)};
  std::vector<Matrix<T>> rhs(static_cast<std::size_t>(w.size() + 1), Matrix<T>(data.m()));
  for (int i = 0; i < N; ++i) {
    const MatFn<T>& Ri = coeffs.back();
    for (int n = w.store_lo() - 1; n <= w.store_hi(); ++n) {
      const Matrix<T>& x = Ri.at(n);
      const Matrix<T>& x1 = Ri.at(n + 1);
      rhs[static_cast<std::size_t>(n - w.store_lo() + 1)] =
          (x1 - x) / eps - x1 * U.at(n) + U.at(n) * x;
    }
    coeffs.push_back(solve_order(data, conv, rhs, w, eps));
  }
  return assemble_series(coeffs);
}

template <Scalar T>
Resolvent<T> resolvent_direct(const AknsData<T>& data, const MatFn<T>& U, int alpha, int N,
                              BoundaryPolicy policy = BoundaryPolicy::contracting,
                              bool zero_diagonal = true) {
  check_alpha<T>(data.m(), alpha);
  return {alpha, resolvent_direct_seed(data, U, Matrix<T>::unit(data.m(), alpha, alpha), N, policy,
                                       zero_diagonal)};
}

/// [P, Q]_D = (ΛP) Q - Q P for series-valued lattice functions.
template <Scalar T>
SeriesFn<T> commutator_D(const SeriesFn<T>& P, const SeriesFn<T>& Q) {
  return shift_apply(P, 1) * Q - Q * P;
}

/// Multiplication-operator form of [P, L_D]_D at one site:
/// -Δ_ε P - z[(ΛP)A - AP] + (ΛP)U - UP.
template <Scalar T>
Series<T> commutator_with_L_at(const Series<T>& p0, const Series<T>& p1, const Matrix<T>& A,
                               const Matrix<T>& u, const T& eps) {
  Series<T> r = -((p1 - p0) / eps);
  r = r - (p1 * A - A * p0).times_z(1);
  r = r + p1 * u - u * p0;
  return r;
}

template <Scalar T>
SeriesFn<T> commutator_with_L(const SeriesFn<T>& P, const AknsData<T>& data, const MatFn<T>& U) {
  if (!(P.window() == U.window()) || !(P.step() == U.step()))
    throw dimension_error("commutator operand and potential live on different lattices");
  const Matrix<T> A = data.A();
  const T& eps = U.step();
  const Window& w = P.window();
  auto site = [&](int n) { return commutator_with_L_at(P.at(n), P.at(n + 1), A, U.at(n), eps); };
  SeriesFn<T> r(w, site(w.store_lo()), site(w.store_lo() - 2), site(w.store_hi() + 1), eps);
  for (int n = w.store_lo(); n <= w.store_hi(); ++n) r[n] = site(n);
  r.set_claim(P.claim_lo(), P.claim_hi() - 1);
  return r;
}

/// B = (z^k R)_+ and B̄ = z^k R - B.
template <Scalar T>
struct Projection {
  SeriesFn<T> B;
  SeriesFn<T> Bbar;
};

template <Scalar T>
Projection<T> projector_B(const SeriesFn<T>& R, int k) {
  if (k < 0) throw input_error("flow order k must be non-negative");
  const Series<T>& probe = R.at(R.window().store_lo());
  if (!probe.exact() && k > -probe.valid_lo() - 1)
    throw validity_error("k=" + std::to_string(k) + " too large for resolvent depth " +
                         std::to_string(-probe.valid_lo()));
  auto plus = [k](const Series<T>& s) { return series_plus(s.times_z(k)); };
  auto minus = [k](const Series<T>& s) { return series_minus(s.times_z(k)); };
  return {R.map(plus), R.map(minus)};
}

/// Result of the flow evaluation ∂_{kα}U = [B_{kα}, L_D]_D at degree 0.
template <Scalar T>
struct FlowField {
  MatFn<T> field;
  T positive_residual;  // max |coefficient| at degrees >= 1
  T diagonal_residual;  // max |diagonal| of the degree-0 coefficient
};

/// Evaluates the flow field. Throws consistency_error if a positive-degree
/// coefficient exceeds `tol` (exact zero in rational mode). The degree-0
/// diagonal is reported, not enforced. The field is zero at the last stored
/// site, whose shifted neighbour lies in the tail.
template <Scalar T>
FlowField<T> flow_field(const HierarchyState<T>& s, int k, int alpha, double tol = 1e-9) {
  check_alpha<T>(s.m(), alpha);
  if (k < 0 || k > s.N - 2)
    throw validity_error("flow order k=" + std::to_string(k) + " requires k <= N-2 (N=" +
                         std::to_string(s.N) + ")");
  const Resolvent<T> R = resolvent_dressed(s, alpha);
  const Projection<T> P = projector_B(R.R, k);
  const SeriesFn<T> C = commutator_with_L(P.B, s.data, s.U);
  const Window& w = s.window();
  const int m = s.m();
  MatFn<T> field(w, Matrix<T>(m), Matrix<T>(m), Matrix<T>(m), s.step());
  T pos(0), diag(0), scale(0);
  for (int n = s.claim_lo(); n <= s.claim_hi(); ++n) {
    const Series<T>& c = C.at(n);
    for (int d = 1; d <= c.hi(); ++d) {
      T v = c.at(d).max_abs();
      if (v > pos) pos = v;
    }
    const Matrix<T> f0 = c.at(0);
    T dv = f0.max_abs_diagonal();
    if (dv > diag) diag = dv;
    T sv = P.B.at(n).max_abs();
    if (sv > scale) scale = sv;
    field[n] = f0;
  }
  field.set_claim(s.claim_lo(), s.claim_hi());
  T bound(0);
  if constexpr (!scalar_traits<T>::exact) bound = tol * std::max(1.0, to_double(scale));
  if (!within_tolerance(pos, to_double(bound)))
    throw consistency_error("flow (" + std::to_string(k) + "," + std::to_string(alpha + 1) +
                            ") has positive-degree residual " + format_scalar(pos));
  return {std::move(field), pos, diag};
}

}  // namespace dakns
