#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "dakns/random.hpp"
#include "dakns/resolvent.hpp"

namespace dakns {

/// Flow label (k, α); α is zero-based.
struct FlowIndex {
  int k = 0;
  int alpha = 0;
  friend bool operator==(const FlowIndex&, const FlowIndex&) = default;
};

inline std::string flow_label(const FlowIndex& f) {
  return "(" + std::to_string(f.k) + "," + std::to_string(f.alpha + 1) + ")";
}

struct EvolveOptions {
  BoundaryPolicy policy = BoundaryPolicy::contracting;
  double tol = 1e-9;        // positive-degree consistency tolerance in flow_field
  double leak_warn = 1e-2;  // halo-to-interior ratio that triggers a warning
  double leak_hard = std::numeric_limits<double>::infinity();
  bool keep_snapshots = true;
  std::function<void(const std::string&)> on_warning;
};

struct Snapshot {
  int step = 0;
  double time = 0;
  MatFn<double> U;
};

struct Trajectory {
  FlowIndex flow;
  double h = 0;
  std::string integrator = "rk4";
  std::vector<Snapshot> snapshots;
  std::vector<std::string> warnings;
  double max_leakage = 0;
  double max_diagonal = 0;  // largest |u_ii| seen
};

/// max |U| on halo sites over max |U| on [n_min, n_max]; 0 for vacuum.
inline double leakage(const MatFn<double>& U) {
  const Window& w = U.window();
  double halo = 0, inner = 0;
  for (int n = w.store_lo(); n <= w.store_hi(); ++n) {
    const double v = U.at(n).max_abs();
    if (n < w.n_min || n > w.n_max)
      halo = std::max(halo, v);
    else
      inner = std::max(inner, v);
  }
  if (halo == 0) return 0;
  return inner == 0 ? std::numeric_limits<double>::infinity() : halo / inner;
}

inline double max_norm(const MatFn<double>& U) {
  double v = 0;
  const Window& w = U.window();
  for (int n = w.store_lo(); n <= w.store_hi(); ++n) v = std::max(v, U.at(n).max_abs());
  return v;
}

inline double max_diagonal(const MatFn<double>& U) {
  double v = 0;
  const Window& w = U.window();
  for (int n = w.store_lo(); n <= w.store_hi(); ++n) v = std::max(v, U.at(n).max_abs_diagonal());
  return v;
}

/// U + c F on stored sites (tails of U kept).
inline MatFn<double> axpy(const MatFn<double>& U, double c, const MatFn<double>& F) {
  MatFn<double> r = U;
  const Window& w = U.window();
  for (int n = w.store_lo(); n <= w.store_hi(); ++n) r[n] += F.at(n) * c;
  return r;
}

/// dU/dt for flow f: re-solves the dressing at U and returns the degree-0 field.
inline MatFn<double> flow_rhs(const AknsData<double>& data, const MatFn<double>& U, int N,
                              const FlowIndex& f, const EvolveOptions& opt) {
  const HierarchyState<double> s = make_state(data, U, N, opt.policy, false);
  return flow_field(s, f.k, f.alpha, opt.tol).field;
}

/// One classical four-stage step.
inline MatFn<double> rk4_step(const AknsData<double>& data, const MatFn<double>& U, int N,
                              const FlowIndex& f, double h, const EvolveOptions& opt) {
  const MatFn<double> k1 = flow_rhs(data, U, N, f, opt);
  const MatFn<double> k2 = flow_rhs(data, axpy(U, h / 2, k1), N, f, opt);
  const MatFn<double> k3 = flow_rhs(data, axpy(U, h / 2, k2), N, f, opt);
  const MatFn<double> k4 = flow_rhs(data, axpy(U, h, k3), N, f, opt);
  MatFn<double> r = U;
  const Window& w = U.window();
  for (int n = w.store_lo(); n <= w.store_hi(); ++n)
    r[n] += (k1.at(n) + k2.at(n) * 2.0 + k3.at(n) * 2.0 + k4.at(n)) * (h / 6);
  return r;
}

/// Integrates dU/dt = ∂_{kα}U for `steps` steps of size h (h may be negative).
inline Trajectory rk4_evolve(const AknsData<double>& data, const MatFn<double>& U0, int N,
                             const FlowIndex& f, double h, int steps,
                             const EvolveOptions& opt = {}) {
  if (steps < 0) throw input_error("steps must be non-negative");
  if (h == 0) throw input_error("time step h must be nonzero");
  data.validate();
  validate_potential(U0, data, false);
  Trajectory tr;
  tr.flow = f;
  tr.h = h;
  MatFn<double> U = U0;
  auto note = [&](int step) {
    const double leak = leakage(U);
    tr.max_leakage = std::max(tr.max_leakage, leak);
    tr.max_diagonal = std::max(tr.max_diagonal, max_diagonal(U));
    if (leak > opt.leak_hard)
      throw consistency_error("boundary leakage " + std::to_string(leak) + " above hard limit at step " +
                              std::to_string(step));
    if (leak > opt.leak_warn) {
      std::string msg = "step " + std::to_string(step) + ": boundary leakage " + std::to_string(leak);
      if (tr.warnings.empty() && opt.on_warning) opt.on_warning(msg);
      tr.warnings.push_back(std::move(msg));
    }
    if (opt.keep_snapshots || step == steps) tr.snapshots.push_back({step, step * h, U});
  };
  note(0);
  for (int i = 1; i <= steps; ++i) {
    U = rk4_step(data, U, N, f, h, opt);
    note(i);
  }
  return tr;
}

/// Initial-state overload.
inline Trajectory rk4_evolve(const HierarchyState<double>& s, const FlowIndex& f, double h, int steps,
                             const EvolveOptions& opt = {}) {
  return rk4_evolve(s.data, s.U, s.N, f, h, steps, opt);
}

struct CommutativityResult {
  double defect_h = 0;
  double defect_h2 = 0;
  double order_estimate = 0;
  bool roundoff = false;  // both defects at rounding level: the integrator commutes exactly
};

inline double diff_norm(const MatFn<double>& a, const MatFn<double>& b) {
  double v = 0;
  const Window& w = a.window();
  for (int n = w.store_lo(); n <= w.store_hi(); ++n) v = std::max(v, (a.at(n) - b.at(n)).max_abs());
  return v;
}

/// Order-swap defect: (f1 then f2) vs (f2 then f1), each over total time h*steps,
/// at h and at h/2 with the total time fixed.
inline CommutativityResult commutativity_defect(const HierarchyState<double>& s, const FlowIndex& f1,
                                                const FlowIndex& f2, double h, int steps,
                                                const EvolveOptions& opt = {}) {
  EvolveOptions o = opt;
  o.keep_snapshots = false;
  auto run = [&](double hh, int st) {
    auto last = [](const Trajectory& t) { return t.snapshots.back().U; };
    MatFn<double> a = last(rk4_evolve(s.data, last(rk4_evolve(s.data, s.U, s.N, f1, hh, st, o)), s.N, f2, hh, st, o));
    MatFn<double> b = last(rk4_evolve(s.data, last(rk4_evolve(s.data, s.U, s.N, f2, hh, st, o)), s.N, f1, hh, st, o));
    return diff_norm(a, b);
  };
  CommutativityResult r;
  r.defect_h = run(h, steps);
  r.defect_h2 = run(h / 2, 2 * steps);
  const double floor = 64 * std::numeric_limits<double>::epsilon() * std::max(1.0, max_norm(s.U));
  if (r.defect_h <= floor && r.defect_h2 <= floor) {
    r.roundoff = true;
    r.order_estimate = std::numeric_limits<double>::infinity();
  } else
    r.order_estimate = std::log2(r.defect_h / r.defect_h2);
  return r;
}

/// Smooth off-diagonal profile amp_ij exp(-x^2/(2 width^2)) on [x_lo, x_hi].
struct Profile {
  Matrix<double> amp;
  double width = 1;
  double x_lo = -4;
  double x_hi = 4;
};

struct ContinuumPoint {
  double eps = 0;
  double cauchy = std::numeric_limits<double>::quiet_NaN();   // vs the next (finer) eps
  double dx_residual = 0;  // max |Σ a_α F_{1α} - Δ_ε U| on the coarse grid
  double flow_norm = 0;
};

struct ContinuumReport {
  FlowIndex flow;
  std::vector<ContinuumPoint> points;
  std::vector<double> cauchy_orders;
  std::vector<double> residual_orders;
  double min_cauchy_order = 0;
  double min_residual_order = 0;
};

namespace detail {

// Site index of x on the grid of step eps; x must be a grid point.
inline int grid_index(double x, double eps) {
  const double r = x / eps;
  const long n = std::lround(r);
  if (std::fabs(r - static_cast<double>(n)) > 1e-9 * std::max(1.0, std::fabs(r)))
    throw input_error("x=" + std::to_string(x) + " is not a grid point at eps=" + std::to_string(eps));
  return static_cast<int>(n);
}

}  // namespace detail

/// ε-deformed flow fields of (k, α) for a sampled profile; Cauchy differences
/// on the coarsest grid and the residual of Σ_α a_α F_{1α} - Δ_ε U.
inline ContinuumReport continuum_scan(const AknsData<double>& data, const Profile& prof,
                                      const std::vector<double>& eps_list, const FlowIndex& f, int N,
                                      const EvolveOptions& opt = {}) {
  if (eps_list.size() < 2) throw input_error("continuum scan needs at least two eps values");
  for (std::size_t i = 0; i + 1 < eps_list.size(); ++i)
    if (!(eps_list[i + 1] < eps_list[i])) throw input_error("eps list must be strictly decreasing");
  data.validate();
  const int m = data.m();
  const double coarse = eps_list.front();
  if (!(prof.x_lo < prof.x_hi)) throw input_error("profile interval is empty");
  const int coarse_lo = detail::grid_index(prof.x_lo, coarse);
  const int coarse_hi = detail::grid_index(prof.x_hi, coarse);

  ContinuumReport rep;
  rep.flow = f;
  std::vector<std::vector<Matrix<double>>> samples;  // F at coarse grid points
  for (double eps : eps_list) {
    const int n_lo = detail::grid_index(prof.x_lo, eps);
    const int n_hi = detail::grid_index(prof.x_hi, eps);
    detail::grid_index(coarse, eps);
    const Window w{n_lo, n_hi, N};
    const MatFn<double> U = gaussian_potential(m, w, eps, 0.0, prof.amp, prof.width,
                                               std::max(-prof.x_lo, prof.x_hi) + 1e-12);
    const HierarchyState<double> s = make_state(data, U, N, opt.policy, false);
    const MatFn<double> F = flow_field(s, f.k, f.alpha, opt.tol).field;
    std::vector<MatFn<double>> F1;
    for (int al = 0; al < m; ++al) F1.push_back(flow_field(s, 1, al, opt.tol).field);
    const int ratio = static_cast<int>(std::lround(coarse / eps));
    ContinuumPoint pt;
    pt.eps = eps;
    std::vector<Matrix<double>> row;
    for (int c = coarse_lo; c <= coarse_hi; ++c) {
      const int n = c * ratio;
      row.push_back(F.at(n));
      pt.flow_norm = std::max(pt.flow_norm, F.at(n).max_abs());
      Matrix<double> sum = (U.at(n + 1) - U.at(n)) * (-1.0 / eps);
      for (int al = 0; al < m; ++al) sum += F1[static_cast<std::size_t>(al)].at(n) * data.a[static_cast<std::size_t>(al)];
      pt.dx_residual = std::max(pt.dx_residual, sum.max_abs());
    }
    samples.push_back(std::move(row));
    rep.points.push_back(pt);
  }
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    double d = 0;
    for (std::size_t j = 0; j < samples[i].size(); ++j)
      d = std::max(d, (samples[i][j] - samples[i + 1][j]).max_abs());
    rep.points[i].cauchy = d;
  }
  auto order = [](double a, double b, double ra, double rb) {
    if (a == 0 && b == 0) return std::numeric_limits<double>::infinity();
    return std::log(a / b) / std::log(ra / rb);
  };
  rep.min_cauchy_order = std::numeric_limits<double>::infinity();
  rep.min_residual_order = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 2 < rep.points.size(); ++i) {
    double o = order(rep.points[i].cauchy, rep.points[i + 1].cauchy, rep.points[i].eps, rep.points[i + 1].eps);
    rep.cauchy_orders.push_back(o);
    rep.min_cauchy_order = std::min(rep.min_cauchy_order, o);
  }
  for (std::size_t i = 0; i + 1 < rep.points.size(); ++i) {
    double o = order(rep.points[i].dx_residual, rep.points[i + 1].dx_residual, rep.points[i].eps,
                     rep.points[i + 1].eps);
    rep.residual_orders.push_back(o);
    rep.min_residual_order = std::min(rep.min_residual_order, o);
  }
  return rep;
}

}  // namespace dakns
