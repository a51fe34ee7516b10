#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "dakns/bilinear.hpp"
#include "dakns/config.hpp"
#include "dakns/report.hpp"

namespace dakns {

enum class SuiteName { algebra, resolvent, bilinear, dynamics, limit, all };

inline SuiteName parse_suite(const std::string& s) {
  if (s == "algebra") return SuiteName::algebra;
  if (s == "resolvent") return SuiteName::resolvent;
  if (s == "bilinear") return SuiteName::bilinear;
  if (s == "dynamics") return SuiteName::dynamics;
  if (s == "limit") return SuiteName::limit;
  if (s == "all") return SuiteName::all;
  throw input_error("unknown suite '" + s + "' (algebra|resolvent|bilinear|dynamics|limit|all)");
}

inline std::string suite_name(SuiteName s) {
  switch (s) {
    case SuiteName::algebra: return "algebra";
    case SuiteName::resolvent: return "resolvent";
    case SuiteName::bilinear: return "bilinear";
    case SuiteName::dynamics: return "dynamics";
    case SuiteName::limit: return "limit";
    case SuiteName::all: return "all";
  }
  return "?";
}

template <Scalar T>
MatFn<double> to_double_fn(const MatFn<T>& f) {
  const Window& w = f.window();
  auto conv = [](const Matrix<T>& a) {
    Matrix<double> r(a.dim());
    for (int i = 0; i < a.dim(); ++i)
      for (int j = 0; j < a.dim(); ++j) r(i, j) = to_double(a(i, j));
    return r;
  };
  MatFn<double> r(w, conv(f.at(w.store_lo())), conv(f.left_tail()), conv(f.right_tail()), to_double(f.step()));
  for (int n = w.store_lo(); n <= w.store_hi(); ++n) r[n] = conv(f.at(n));
  return r;
}

template <Scalar T>
AknsData<double> to_double_data(const AknsData<T>& d) {
  AknsData<double> r;
  for (const auto& a : d.a) r.a.push_back(to_double(a));
  return r;
}

/// Distance between two exponential polynomials: exact coefficient gap in
/// rational mode, relative value gap in float mode.
template <Scalar T>
T expoly_distance(const ExpPoly<T>& a, const ExpPoly<T>& b) {
  if constexpr (scalar_traits<T>::exact) {
    T best(0);
    for (const auto& [th, c] : (a + b.scaled(T(-1))).terms()) best = std::max(best, abs_scalar(c));
    return best;
  } else {
    const double va = a.value(), vb = b.value();
    return std::fabs(va - vb) / std::max(1.0, std::fabs(va));
  }
}

namespace detail {

template <Scalar T>
class SuiteRunner {
 public:
  SuiteRunner(const ExperimentConfig& cfg, VerificationReport& rep) : cfg_(cfg), rep_(rep) {}

  /// Exact zero in rational mode, ≤ tol in float mode.
  void scalar(const std::string& check, json params, const T& residual) {
    const bool exact = scalar_traits<T>::exact;
    rep_.checks.push_back({check, std::move(params), format_scalar(residual),
                           exact ? "0" : format_scalar(cfg_.tol), mode_name(scalar_traits<T>::mode),
                           within_tolerance(residual, cfg_.tol)});
  }

  void upper(const std::string& check, json params, double residual, double bound) {
    rep_.checks.push_back({check, std::move(params), format_scalar(residual), "<= " + format_scalar(bound), "float",
                           residual <= bound});
  }

  void lower(const std::string& check, json params, double value, double bound) {
    rep_.checks.push_back({check, std::move(params), format_scalar(value), ">= " + format_scalar(bound), "float",
                           value >= bound});
  }

  /// Runs fn; a consistency failure becomes a failed entry instead of aborting the suite.
  template <class F>
  void guarded(const std::string& check, const json& params, F fn) {
    try {
      fn();
    } catch (const consistency_error& e) {
      rep_.checks.push_back({check, params, std::string("error: ") + e.what(), "-",
                             mode_name(scalar_traits<T>::mode), false});
    }
  }

  const ExperimentConfig& cfg() const { return cfg_; }

 private:
  const ExperimentConfig& cfg_;
  VerificationReport& rep_;
};

template <Scalar T>
T max_sites(int lo, int hi, auto fn) {
  T best(0);
  for (int n = lo; n <= hi; ++n) {
    T v = fn(n);
    if (v > best) best = v;
  }
  return best;
}

template <Scalar T>
void algebra_suite(const HierarchyState<T>& s, Rng& rng, SuiteRunner<T>& run) {
  const auto& cfg = run.cfg();
  run.guarded("dressing_residual", {{"instance", "config"}},
              [&] { run.scalar("dressing_residual", {{"instance", "config"}}, dressing_residual(s)); });
  const int lo = std::max(-2, s.window().n_min), hi = std::min(2, s.window().n_max);
  for (int r = 0; r < 3; ++r) {
    const json p{{"instance", "random"}, {"index", r}};
    MatFn<T> U = random_potential<T>(rng, s.m(), s.window(), lo, hi, s.step());
    run.guarded("dressing_residual", p, [&] {
      run.scalar("dressing_residual", p, dressing_residual(make_state(s.data, U, s.N, cfg.policy)));
    });
  }
  std::vector<SeriesFn<T>> R;
  for (int al = 0; al < s.m(); ++al) R.push_back(resolvent_dressed(s, al).R);
  for (int al = 0; al < s.m(); ++al) {
    const json p{{"alpha", al + 1}};
    run.guarded("resolvent_commutator", p, [&] {
      const SeriesFn<T> C = commutator_with_L(R[static_cast<std::size_t>(al)], s.data, s.U);
      run.scalar("resolvent_commutator", p, max_sites<T>(C.claim_lo(), C.claim_hi(), [&](int n) {
                   return C.at(n).max_abs(C.at(n).valid_lo(), 1);
                 }));
    });
  }
  run.guarded("resolvent_projectors", json::object(), [&] {
    T worst = max_sites<T>(s.claim_lo(), s.claim_hi(), [&](int n) {
      T v(0);
      Series<T> sum(s.m(), -s.N, 0);
      for (int al = 0; al < s.m(); ++al) {
        const Series<T>& ra = R[static_cast<std::size_t>(al)].at(n);
        sum = sum + ra;
        for (int be = 0; be < s.m(); ++be) {
          const Series<T>& rb = R[static_cast<std::size_t>(be)].at(n);
          Series<T> d = ra * rb;
          if (al == be) d = d - rb;
          v = std::max(v, d.max_abs(d.valid_lo(), 0));
        }
      }
      Series<T> d = sum - Series<T>::identity(s.m());
      return std::max(v, d.max_abs(d.valid_lo(), 0));
    });
    run.scalar("resolvent_projectors", json::object(), worst);
  });
}

template <Scalar T>
void resolvent_suite(const HierarchyState<T>& s, SuiteRunner<T>& run) {
  for (int al = 0; al < s.m(); ++al) {
    const json p{{"alpha", al + 1}};
    run.guarded("cross_solver", p, [&] {
      const auto dressed = resolvent_dressed(s, al).R;
      const auto direct = resolvent_direct(s.data, s.U, al, s.N, s.dressing.conv.policy, false).R;
      const Window& w = s.window();
      run.scalar("cross_solver", p, max_sites<T>(w.store_lo(), w.store_hi(), [&](int n) {
                   return (dressed.at(n) - direct.at(n)).max_abs(-s.N, 0);
                 }));
    });
  }
  for (int k = 0; k <= std::min(2, s.N - 2); ++k)
    for (int al = 0; al < s.m(); ++al) {
      const json p{{"k", k}, {"alpha", al + 1}};
      run.guarded("flow_positive_degrees", p, [&] {
        const FlowField<T> f = flow_field(s, k, al, run.cfg().tol);
        run.scalar("flow_positive_degrees", p, f.positive_residual);
        run.scalar("flow_degree0_diagonal", p, f.diagonal_residual);
        if (k == 0) {
          const Matrix<T> E = Matrix<T>::unit(s.m(), al, al);
          run.scalar("flow_closed_form", p, max_sites<T>(s.claim_lo(), s.claim_hi(), [&](int n) {
                       return (f.field.at(n) - (E * s.U.at(n) - s.U.at(n) * E)).max_abs();
                     }));
        }
      });
    }
}

template <Scalar T>
void bilinear_suite(const HierarchyState<T>& s, Rng& rng, SuiteRunner<T>& run) {
  const auto& cfg = run.cfg();
  std::vector<DerivativeWord> words{{}};
  for (int k = 0; k <= 2; ++k)
    for (int al = 0; al < s.m(); ++al) words.push_back({{k, al}});
  for (int md : {0, 1})
    for (const auto& w : words) {
      const int k = w.empty() ? 0 : w[0].k;
      const int l = std::min(cfg.l_max, s.N - k - md - 1);
      if (l < 0) continue;
      const json p{{"word", word_label(w)}, {"m_delta", md}, {"l_max", l}, {"path", "analytic"}};
      run.guarded("bilinear", p, [&] {
        BilinearOptions o;
        o.l_max = l;
        o.m_delta = md;
        o.word = w;
        run.scalar("bilinear", p, bilinear_residual(s, o).residual);
      });
    }
  if constexpr (std::same_as<T, double>) {
    EvolveOptions ev;
    ev.policy = s.dressing.conv.policy;
    ev.tol = cfg.tol;
    for (int al = 0; al < s.m(); ++al) {
      const int l = std::min(cfg.l_max, s.N - 2);
      if (l < 0) continue;
      const json p{{"word", word_label({{1, al}})}, {"m_delta", 0}, {"l_max", l}, {"fd_step", cfg.fd_step}};
      run.guarded("bilinear_numeric", p, [&] {
        double res[2];
        for (int r = 0; r < 2; ++r) {
          BilinearOptions o;
          o.l_max = l;
          o.word = {{1, al}};
          o.path = DerivativePath::numeric;
          o.fd_step = cfg.fd_step / (1 << r);
          o.evolve = ev;
          res[r] = bilinear_residual(s, o).residual;
        }
        run.upper("bilinear_numeric", p, res[0], cfg.fd_tol);
        // Both at rounding level: the difference quotient is exact, no decay to observe.
        const double floor = 64 * std::numeric_limits<double>::epsilon();
        const double order =
            res[0] <= floor && res[1] <= floor ? std::numeric_limits<double>::infinity() : std::log2(res[0] / res[1]);
        run.lower("bilinear_numeric_order", p, order, 1.9);
      });
    }
    if (s.m() >= 2 && s.N >= 4) {
      const DerivativeWord w{{1, 0}, {1, 1}};
      const int l = std::min(cfg.l_max, s.N - 3);
      const json p{{"word", word_label(w)}, {"m_delta", 0}, {"l_max", l}, {"fd_step", cfg.fd_step}};
      run.guarded("bilinear_mixed", p, [&] {
        BilinearOptions o;
        o.l_max = l;
        o.word = w;
        o.path = DerivativePath::numeric;
        o.fd_step = cfg.fd_step;
        o.evolve = ev;
        run.upper("bilinear_mixed", p, bilinear_residual(s, o).residual, cfg.mixed_tol);
      });
    }
  }
  run.guarded("adjoint", json::object(), [&] {
    const Window& w = s.window();
    const MatFn<T> f = random_compact<T>(rng, s.m(), w, w.n_min, w.n_max, s.step());
    const MatFn<T> g = random_compact<T>(rng, s.m(), w, w.n_min, w.n_max, s.step());
    const AdjointResult<T> r = adjoint_check(s, f, g);
    run.scalar("adjointness", json::object(), r.adjointness);
    run.scalar("dual_baker", json::object(), r.dual_baker);
    run.scalar("dual_baker_top", json::object(), r.top_defect);
  });

  const TimePoint<T> t = make_times<T>(cfg);
  for (int n = -3; n <= 3; ++n) {
    const json p{{"n", n}, {"K", cfg.K}};
    run.scalar("g_shift_identity", p, g_shift_identity_defect(n, t, s.data, cfg.K));
    run.scalar("g_difference", p, g_difference_defect(n, t, s.data, cfg.K));
  }
  {
    TimePoint<T> step = t;
    for (int i = 0; i < 3; ++i) step = shifted_times(1, step, s.data, cfg.K);
    const TimePoint<T> direct = shifted_times(3, t, s.data, cfg.K);
    T gap(0);
    for (const auto& [key, v] : direct) gap = std::max(gap, abs_scalar(T(v - time_at(step, key.first, key.second))));
    for (const auto& [key, v] : step) gap = std::max(gap, abs_scalar(T(v - time_at(direct, key.first, key.second))));
    run.scalar("shifted_times_additivity", {{"n", 3}}, gap);
  }
  auto [tau, comp] = make_tau<T>(cfg);
  if (!cfg.tau) {
    // Seeded exponential sum with three terms.
    tau.terms.clear();
    for (int r = 0; r < 3; ++r) {
      typename TauExpSum<T>::Term tm{rng.template rational<T>(3, 4) + T(4), {}};
      for (int k = 1; k <= 3; ++k)
        for (int al = 0; al < s.m(); ++al) tm.p[{k, al}] = rng.template rational<T>(2, 3);
      tm.p = normalized(tm.p);
      tau.terms.push_back(std::move(tm));
    }
  }
  for (int n = -2; n <= 2; ++n) {
    const json p{{"n", n}, {"tau", cfg.tau ? "config" : "random"}};
    const auto [lhs, rhs] = lambda_consistency(tau, n, t, s.data);
    run.scalar("tau_lambda_consistency", p, expoly_distance(lhs, rhs));
  }
  if (cfg.tau) {
    const json p{{"tau", "config"}};
    run.guarded("tau_dressing_residual", p, [&] {
      const auto [tc, cc] = make_tau<T>(cfg);
      const Window w = s.window();
      run.scalar("tau_dressing_residual", p, dressing_residual(dressing_from_tau(tc, cc, t, s.data, w, s.N)));
    });
  } else {
    const json p{{"tau", "vacuum"}};
    run.guarded("tau_vacuum_baker", p, [&] {
      T worst(0);
      for (int n = -3; n <= 3; ++n) {
        const Series<T> w = baker_from_tau(TauExpSum<T>::one(), {}, n, t, s.data, s.N);
        worst = std::max(worst, (w - Series<T>::identity(s.m())).max_abs(-s.N, 0));
      }
      run.scalar("tau_vacuum_baker", p, worst);
    });
  }
}

template <Scalar T>
void dynamics_suite(const HierarchyState<T>& s, SuiteRunner<T>& run) {
  const auto& cfg = run.cfg();
  const AknsData<double> d = to_double_data(s.data);
  const MatFn<double> U = to_double_fn(s.U);
  const HierarchyState<double> sf = make_state(d, U, s.N, s.dressing.conv.policy, false);
  const double h = to_double(parse_scalar<Rational>(cfg.h));
  EvolveOptions ev;
  ev.policy = s.dressing.conv.policy;
  ev.tol = cfg.tol;
  for (std::size_t i = 0; i + 1 < cfg.flows.size(); i += 2) {
    const FlowIndex f1 = cfg.flows[i], f2 = cfg.flows[i + 1];
    const json p{{"flows", flow_label(f1) + flow_label(f2)}, {"h", cfg.h}, {"steps", cfg.steps}};
    try {
      const CommutativityResult r = commutativity_defect(sf, f1, f2, h, std::max(1, cfg.steps), ev);
      run.upper("flow_commutativity", p, r.defect_h, cfg.commute_tol);
      run.lower("flow_commutativity_order", p, r.order_estimate, 2.0);
    } catch (const std::exception& e) {
      if (dynamic_cast<const input_error*>(&e)) throw;
      run.upper("flow_commutativity", p, std::numeric_limits<double>::infinity(), cfg.commute_tol);
    }
  }
}

template <Scalar T>
void limit_suite(const HierarchyState<T>& s, SuiteRunner<T>& run) {
  const auto& cfg = run.cfg();
  const AknsData<double> d = to_double_data(s.data);
  std::vector<double> eps;
  for (const auto& e : cfg.eps) eps.push_back(to_double(parse_scalar<Rational>(e)));
  EvolveOptions ev;
  ev.policy = s.dressing.conv.policy;
  ev.tol = cfg.tol;
  for (int al = 0; al < s.m(); ++al) {
    const json p{{"flow", flow_label({1, al})}, {"width", cfg.profile.width}};
    try {
      const ContinuumReport r = continuum_scan(d, cfg.profile, eps, {1, al}, cfg.N, ev);
      run.lower("continuum_cauchy_order", p, r.min_cauchy_order, 1.0);
      run.lower("continuum_residual_order", p, r.min_residual_order, 1.0);
    } catch (const consistency_error&) {
      run.lower("continuum_cauchy_order", p, -std::numeric_limits<double>::infinity(), 1.0);
    }
  }
}

}  // namespace detail

/// Runs the selected suite on the config's initial state.
template <Scalar T>
VerificationReport run_verify_suite(const ExperimentConfig& cfg, SuiteName suite) {
  VerificationReport rep;
  rep.suite = suite_name(suite);
  rep.config_hash = config_hash(cfg);
  rep.seed = cfg.seed;
  Rng rng(cfg.seed);
  const HierarchyState<T> s = make_initial_state<T>(cfg, rng);
  detail::SuiteRunner<T> run(cfg, rep);
  const bool all = suite == SuiteName::all;
  if (all || suite == SuiteName::algebra) detail::algebra_suite(s, rng, run);
  if (all || suite == SuiteName::resolvent) detail::resolvent_suite(s, run);
  if (all || suite == SuiteName::bilinear) detail::bilinear_suite(s, rng, run);
  if (all || suite == SuiteName::dynamics) detail::dynamics_suite(s, run);
  if (all || suite == SuiteName::limit) detail::limit_suite(s, run);
  return rep;
}

}  // namespace dakns
