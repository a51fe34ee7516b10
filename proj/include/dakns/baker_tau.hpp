#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dakns/hierarchy.hpp"

namespace dakns {

/// Scalar power series c_0 + c_1 x + ... + c_K x^K, truncated above degree K.
template <Scalar T>
class PowerSeries {
 public:
  PowerSeries() = default;
  explicit PowerSeries(int K) : c_(static_cast<std::size_t>(K + 1), T(0)) {
    if (K < 0) throw validity_error("power series band must be >= 0");
  }

  static PowerSeries one(int K) {
    PowerSeries s(K);
    s.c_[0] = T(1);
    return s;
  }

  int K() const { return static_cast<int>(c_.size()) - 1; }
  const T& operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
  T& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }
  T at(int k) const { return k >= 0 && k <= K() ? c_[static_cast<std::size_t>(k)] : T(0); }

  friend PowerSeries operator+(PowerSeries a, const PowerSeries& b) {
    check(a, b);
    for (int k = 0; k <= a.K(); ++k) a[k] += b[k];
    return a;
  }
  friend PowerSeries operator-(PowerSeries a, const PowerSeries& b) {
    check(a, b);
    for (int k = 0; k <= a.K(); ++k) a[k] -= b[k];
    return a;
  }
  friend PowerSeries operator*(const PowerSeries& a, const PowerSeries& b) {
    check(a, b);
    PowerSeries r(a.K());
    for (int i = 0; i <= a.K(); ++i) {
      if (scalar_traits<T>::is_zero(a[i])) continue;
      for (int j = 0; i + j <= a.K(); ++j) r[i + j] += a[i] * b[j];
    }
    return r;
  }
  friend PowerSeries operator*(PowerSeries a, const T& s) {
    for (auto& x : a.c_) x *= s;
    return a;
  }
  friend bool operator==(const PowerSeries&, const PowerSeries&) = default;

  T max_abs() const {
    T best(0);
    for (const auto& x : c_) {
      T v = abs_scalar(x);
      if (v > best) best = v;
    }
    return best;
  }

 private:
  static void check(const PowerSeries& a, const PowerSeries& b) {
    if (a.K() != b.K()) throw dimension_error("power series bands differ");
  }
  std::vector<T> c_;
};

template <Scalar T>
PowerSeries<T> power_inverse(const PowerSeries<T>& a) {
  if (scalar_traits<T>::is_zero(a[0])) throw consistency_error("power series with zero constant term");
  PowerSeries<T> b(a.K());
  b[0] = T(1) / a[0];
  for (int k = 1; k <= a.K(); ++k) {
    T acc(0);
    for (int i = 1; i <= k; ++i) acc += a[i] * b[k - i];
    b[k] = -acc * b[0];
  }
  return b;
}

/// exp(f) for f with zero constant term, via k e_k = Σ_j j f_j e_{k-j}.
template <Scalar T>
PowerSeries<T> power_exp(const PowerSeries<T>& f) {
  if (!scalar_traits<T>::is_zero(f[0]))
    throw representation_error("power_exp needs a zero constant term");
  PowerSeries<T> e = PowerSeries<T>::one(f.K());
  for (int k = 1; k <= f.K(); ++k) {
    T acc(0);
    for (int j = 1; j <= k; ++j) acc += T(j) * f[j] * e[k - j];
    e[k] = acc / T(k);
  }
  return e;
}

/// (1 + a x)^n, with negative n through series inversion.
template <Scalar T>
PowerSeries<T> binomial_power(const T& a, int n, int K) {
  PowerSeries<T> base(K);
  base[0] = T(1);
  if (K >= 1) base[1] = a;
  PowerSeries<T> r = PowerSeries<T>::one(K);
  for (int i = 0; i < std::abs(n); ++i) r = r * base;
  return n >= 0 ? r : power_inverse(r);
}

/// Times t_{kα}; key (k, α) with zero-based α. Absent keys are zero.
template <Scalar T>
using TimePoint = std::map<std::pair<int, int>, T>;

template <Scalar T>
TimePoint<T> normalized(const TimePoint<T>& t) {
  TimePoint<T> r;
  for (const auto& [key, v] : t)
    if (!scalar_traits<T>::is_zero(v)) r.emplace(key, v);
  return r;
}

template <Scalar T>
T time_at(const TimePoint<T>& t, int k, int alpha) {
  auto it = t.find({k, alpha});
  return it == t.end() ? T(0) : it->second;
}

/// t'_{kα} = t_{kα} + n (-1)^{k-1} a_α^k / k for 1 <= k <= K; k = 0 untouched.
template <Scalar T>
TimePoint<T> shifted_times(int n, const TimePoint<T>& t, const AknsData<T>& data, int K) {
  TimePoint<T> r = t;
  for (int al = 0; al < data.m(); ++al) {
    T ak(1);
    for (int k = 1; k <= K; ++k) {
      ak *= data.a[static_cast<std::size_t>(al)];
      T d = T(n) * ak / T(k);
      if (k % 2 == 0) d = -d;
      r[{k, al}] += d;
    }
  }
  return normalized(r);
}

/// g(n;t,z) = (1+zA)^n exp(Σ z^k E_α t_{kα}), diagonal, one power series per α.
/// The factor exp(t_{0α}) is held apart as `phase`.
template <Scalar T>
struct GFactor {
  int n = 0;
  int K = 0;
  std::vector<T> phase;                  // t_{0α}
  std::vector<PowerSeries<T>> diag;      // without the phase

  /// Coefficient of z^k as a diagonal matrix (phase applied).
  Matrix<T> coeff(int k) const {
    Matrix<T> r(static_cast<int>(diag.size()));
    for (std::size_t al = 0; al < diag.size(); ++al) {
      const int i = static_cast<int>(al);
      r(i, i) = diag[al].at(k) * scalar_traits<T>::exp(phase[al]);
    }
    return r;
  }
};

template <Scalar T>
GFactor<T> g_series(int n, const TimePoint<T>& t, const AknsData<T>& data, int K) {
  if (K < 1) throw validity_error("g band K must be >= 1");
  GFactor<T> g{n, K, {}, {}};
  for (int al = 0; al < data.m(); ++al) {
    const T& a = data.a[static_cast<std::size_t>(al)];
    if (scalar_traits<T>::is_zero(a)) throw input_error("a_alpha must be nonzero");
    PowerSeries<T> f(K);
    for (int k = 1; k <= K; ++k) f[k] = time_at(t, k, al);
    g.phase.push_back(time_at(t, 0, al));
    g.diag.push_back(binomial_power(a, n, K) * power_exp(f));
  }
  return g;
}

/// Max coefficient gap between g(n;t,z) and exp(Σ t'_{kα} E_α z^k).
template <Scalar T>
T g_shift_identity_defect(int n, const TimePoint<T>& t, const AknsData<T>& data, int K) {
  const GFactor<T> g = g_series(n, t, data, K);
  const TimePoint<T> tp = shifted_times(n, t, data, K);
  T best(0);
  for (int al = 0; al < data.m(); ++al) {
    PowerSeries<T> f(K);
    for (int k = 1; k <= K; ++k) f[k] = time_at(tp, k, al);
    T v = (power_exp(f) - g.diag[static_cast<std::size_t>(al)]).max_abs();
    if (v > best) best = v;
    T ph = abs_scalar(T(time_at(tp, 0, al) - g.phase[static_cast<std::size_t>(al)]));
    if (ph > best) best = ph;
  }
  return best;
}

/// Max coefficient of g(n+1) - g(n) - zA g(n) through degree K-1.
template <Scalar T>
T g_difference_defect(int n, const TimePoint<T>& t, const AknsData<T>& data, int K) {
  const GFactor<T> g0 = g_series(n, t, data, K);
  const GFactor<T> g1 = g_series(n + 1, t, data, K);
  T best(0);
  for (int al = 0; al < data.m(); ++al) {
    const auto& p0 = g0.diag[static_cast<std::size_t>(al)];
    const auto& p1 = g1.diag[static_cast<std::size_t>(al)];
    for (int k = 0; k <= K - 1; ++k) {
      T v = p1.at(k) - p0.at(k) - data.a[static_cast<std::size_t>(al)] * p0.at(k - 1);
      v = abs_scalar(v);
      if (v > best) best = v;
    }
  }
  return best;
}

/// Canonical Σ c_θ exp(θ): sorted unique exponents, zero coefficients dropped.
template <Scalar T>
class ExpPoly {
 public:
  void add(const T& theta, const T& c) {
    if (scalar_traits<T>::is_zero(c)) return;
    auto [it, fresh] = terms_.emplace(theta, c);
    if (!fresh) {
      it->second += c;
      if (scalar_traits<T>::is_zero(it->second)) terms_.erase(it);
    }
  }

  const std::map<T, T>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  ExpPoly scaled(const T& s) const {
    ExpPoly r;
    for (const auto& [th, c] : terms_) r.add(th, c * s);
    return r;
  }

  /// Numeric value; rational mode requires every exponent to vanish.
  T value() const {
    T v(0);
    for (const auto& [th, c] : terms_) v += c * scalar_traits<T>::exp(th);
    return v;
  }

  friend ExpPoly operator+(ExpPoly a, const ExpPoly& b) {
    for (const auto& [th, c] : b.terms_) a.add(th, c);
    return a;
  }
  friend bool operator==(const ExpPoly&, const ExpPoly&) = default;

 private:
  std::map<T, T> terms_;
};

/// Finite sum Σ_r c_r exp(Σ p_{kα} t_{kα}).
template <Scalar T>
struct TauExpSum {
  struct Term {
    T c;
    TimePoint<T> p;
    friend bool operator==(const Term&, const Term&) = default;
  };
  std::vector<Term> terms;

  static TauExpSum one() { return TauExpSum{{Term{T(1), {}}}}; }

  int max_k() const {
    int k = 0;
    for (const auto& tm : terms)
      for (const auto& [key, v] : tm.p) k = std::max(k, key.first);
    return k;
  }

  ExpPoly<T> evaluate(const TimePoint<T>& t) const {
    ExpPoly<T> r;
    for (const auto& tm : terms) r.add(exponent(tm, t), tm.c);
    return r;
  }

  static T exponent(const Term& tm, const TimePoint<T>& t) {
    T th(0);
    for (const auto& [key, p] : tm.p) th += p * time_at(t, key.first, key.second);
    return th;
  }

  friend bool operator==(const TauExpSum&, const TauExpSum&) = default;
};

/// τ_D(n; t) = τ(t'(n, t)).
template <Scalar T>
ExpPoly<T> tau_D(const TauExpSum<T>& tau, int n, const TimePoint<T>& t, const AknsData<T>& data) {
  return tau.evaluate(shifted_times(n, t, data, std::max(1, tau.max_k())));
}

/// τ_D(n+1; t) and τ_D(n; t'(1, t)), computed independently.
template <Scalar T>
std::pair<ExpPoly<T>, ExpPoly<T>> lambda_consistency(const TauExpSum<T>& tau, int n,
                                                     const TimePoint<T>& t,
                                                     const AknsData<T>& data) {
  const int K = std::max(1, tau.max_k());
  return {tau_D(tau, n + 1, t, data), tau_D(tau, n, shifted_times(1, t, data, K), data)};
}

/// τ(..., t_{kγ} - z^{-k}/k, ...) at the time point t: coefficient j of the
/// result multiplies z^{-j}, j = 0..depth.
template <Scalar T>
std::vector<ExpPoly<T>> miwa_shift(const TauExpSum<T>& tau, int gamma, int depth,
                                   const TimePoint<T>& t) {
  std::vector<ExpPoly<T>> out(static_cast<std::size_t>(depth + 1));
  for (const auto& tm : tau.terms) {
    PowerSeries<T> f(depth);
    for (int k = 1; k <= depth; ++k) {
      auto it = tm.p.find({k, gamma});
      if (it != tm.p.end()) f[k] = -it->second / T(k);
    }
    const PowerSeries<T> e = power_exp(f);
    const T th = TauExpSum<T>::exponent(tm, t);
    for (int j = 0; j <= depth; ++j) out[static_cast<std::size_t>(j)].add(th, tm.c * e[j]);
  }
  return out;
}

/// Matrix companion τ_{αβ}; diagonal and empty entries are ignored.
template <Scalar T>
using TauMatrix = std::vector<std::vector<std::optional<TauExpSum<T>>>>;

/// ŵ(n) assembled from τ_D with the Miwa shift applied in the column index.
/// Diagonal: τ_D(t - [z^{-1}]_α)/τ_D(t); off-diagonal: z^{-1} τ_{αβ}(t - [z^{-1}]_β)/τ_D(t).
template <Scalar T>
Series<T> baker_from_tau(const TauExpSum<T>& tau, const TauMatrix<T>& companions, int n,
                         const TimePoint<T>& t, const AknsData<T>& data, int depth) {
  const int m = data.m();
  int K = std::max(1, tau.max_k());
  for (const auto& row : companions)
    for (const auto& e : row)
      if (e) K = std::max(K, e->max_k());
  const TimePoint<T> tp = shifted_times(n, t, data, K);
  const T denom = tau.evaluate(tp).value();
  if (scalar_traits<T>::is_zero(denom))
    throw consistency_error("tau_D vanishes at n=" + std::to_string(n));
  Series<T> w(m, -depth, 0);
  for (int al = 0; al < m; ++al) {
    auto diag = miwa_shift(tau, al, depth, tp);
    for (int j = 0; j <= depth; ++j) w[-j](al, al) = diag[static_cast<std::size_t>(j)].value() / denom;
    if (companions.empty()) continue;
    for (int be = 0; be < m; ++be) {
      if (be == al) continue;
      const auto& e = companions[static_cast<std::size_t>(al)][static_cast<std::size_t>(be)];
      if (!e) continue;
      auto off = miwa_shift(*e, be, depth - 1, tp);
      for (int j = 0; j < depth; ++j)
        w[-j - 1](al, be) = off[static_cast<std::size_t>(j)].value() / denom;
    }
  }
  return w;
}

/// Hierarchy state whose dressing comes from τ at every stored site (plus the
/// tail sites). U is read off the degree-0 dressing equation,
/// U(n) = A w_1(n) - w_1(n+1) A.
template <Scalar T>
HierarchyState<T> dressing_from_tau(const TauExpSum<T>& tau, const TauMatrix<T>& companions,
                                    const TimePoint<T>& t, const AknsData<T>& data,
                                    const Window& win, int N) {
  data.validate();
  const int m = data.m();
  std::vector<Series<T>> ws;
  for (int n = win.store_lo() - 1; n <= win.store_hi() + 1; ++n)
    ws.push_back(baker_from_tau(tau, companions, n, t, data, N));
  auto wat = [&](int n) -> const Series<T>& { return ws[static_cast<std::size_t>(n - win.store_lo() + 1)]; };
  Dressing<T> d;
  d.N = N;
  d.conv = make_conventions(data, BoundaryPolicy::contracting);
  for (int k = 0; k <= N; ++k) {
    MatFn<T> f(win, Matrix<T>(m), wat(win.store_lo() - 1).at(-k), wat(win.store_hi() + 1).at(-k));
    for (int n = win.store_lo(); n <= win.store_hi(); ++n) f[n] = wat(n).at(-k);
    d.w.push_back(std::move(f));
  }
  const Matrix<T> A = data.A();
  MatFn<T> U(win, Matrix<T>(m), Matrix<T>(m), Matrix<T>(m));
  for (int n = win.store_lo(); n <= win.store_hi(); ++n)
    U[n] = A * d.w[1].at(n) - d.w[1].at(n + 1) * A;
  return HierarchyState<T>{data, std::move(U), N, std::move(d)};
}

}  // namespace dakns
