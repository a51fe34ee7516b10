#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dakns/dynamics.hpp"
#include "dakns/json_io.hpp"
#include "dakns/random.hpp"

namespace dakns {

/// Initial potential. Kinds: vacuum, entries, random, gaussian, state_file.
struct PotentialSpec {
  struct Entry {
    int n = 0, i = 0, j = 0;  // i, j zero-based here
    std::string value;
  };
  std::string kind = "vacuum";
  std::vector<Entry> entries;
  int lo = -2, hi = 2, num_max = 2, den_max = 3;  // random
  std::string scale = "1";                        // random: multiplies every entry
  std::vector<std::vector<std::string>> amp;      // gaussian
  double width = 0.7, x0 = 0;
  std::string path;                               // state_file
};

struct ExperimentConfig {
  int m = 0;
  std::vector<std::string> A;
  Window window{-8, 8, 10};
  std::string step = "1";
  int N = 8;
  Mode mode = Mode::rational;
  int K = 6;
  BoundaryPolicy policy = BoundaryPolicy::contracting;
  PotentialSpec potential;
  std::vector<FlowIndex> flows{{1, 0}, {2, 1}};
  std::string h = "1/100";
  int steps = 10;
  std::vector<std::string> eps{"1/2", "1/4", "1/8", "1/16"};
  double tol = 1e-9;
  double fd_tol = 1e-8;
  double mixed_tol = 1e-6;
  double commute_tol = 1e-6;
  double fd_step = 1e-3;
  std::uint64_t seed = 1;
  int l_max = 6;
  Profile profile{Matrix<double>(1), 0.7};
  std::optional<json> tau;   // {"tau": TauExpSum, "companions": [{"alpha","beta","tau"}]}
  json times = json::object();
  std::string out;

  /// Canonical form after overrides, hashed into reports.
  json canonical() const;
};

namespace detail {

struct ErrorList {
  std::vector<std::string> items;
  void add(std::string s) { items.push_back(std::move(s)); }
  void check(bool ok, const std::string& s) {
    if (!ok) add(s);
  }
  void raise() const {
    if (items.empty()) return;
    std::string msg = "invalid config:";
    for (const auto& s : items) msg += "\n  - " + s;
    throw input_error(msg);
  }
};

inline void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where,
                           ErrorList& err) {
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) err.add("unknown key '" + k + "'" + (where.empty() ? "" : " in " + where));
}

inline std::string scalar_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long>());
  throw input_error("expected a rational string");
}

template <class F>
void guarded(ErrorList& err, const std::string& what, F fn) {
  try {
    fn();
  } catch (const json::exception& e) {
    err.add(what + ": wrong type (" + std::string(e.what()) + ")");
  } catch (const std::exception& e) {
    err.add(what + ": " + e.what());
  }
}

}  // namespace detail

inline json ExperimentConfig::canonical() const {
  json pot{{"kind", potential.kind}};
  if (potential.kind == "entries") {
    json e = json::array();
    for (const auto& x : potential.entries) e.push_back({{"n", x.n}, {"i", x.i + 1}, {"j", x.j + 1}, {"value", x.value}});
    pot["entries"] = e;
  } else if (potential.kind == "random") {
    pot.update({{"lo", potential.lo}, {"hi", potential.hi}, {"num_max", potential.num_max},
                {"den_max", potential.den_max}, {"scale", potential.scale}});
  } else if (potential.kind == "gaussian") {
    pot.update({{"amp", potential.amp}, {"width", potential.width}, {"x0", potential.x0}});
  } else if (potential.kind == "state_file") {
    pot["path"] = potential.path;
  }
  json fl = json::array();
  for (const auto& f : flows) fl.push_back({f.k, f.alpha + 1});
  json j{{"m", m},
         {"A", A},
         {"window", {{"n_min", window.n_min}, {"n_max", window.n_max}, {"halo", window.halo}}},
         {"step", step},
         {"N", N},
         {"mode", mode_name(mode)},
         {"K", K},
         {"policy", policy_name(policy)},
         {"potential", pot},
         {"flows", fl},
         {"h", h},
         {"steps", steps},
         {"eps", eps},
         {"tol", tol},
         {"fd_tol", fd_tol},
         {"mixed_tol", mixed_tol},
         {"commute_tol", commute_tol},
         {"fd_step", fd_step},
         {"seed", seed},
         {"l_max", l_max},
         {"times", times}};
  json amp = json::array();
  for (int i = 0; i < profile.amp.dim(); ++i) {
    json row = json::array();
    for (int k = 0; k < profile.amp.dim(); ++k) row.push_back(profile.amp(i, k));
    amp.push_back(row);
  }
  j["profile"] = {{"amp", amp}, {"width", profile.width}, {"x_lo", profile.x_lo}, {"x_hi", profile.x_hi}};
  if (tau) j["tau"] = *tau;
  return j;
}

/// Parses and validates a config; every violation is listed in one input_error.
inline ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw input_error(std::string("config syntax error: ") + e.what());
  }
  if (!j.is_object()) throw input_error("config must be a JSON object");
  detail::ErrorList err;
  detail::reject_unknown(j,
                         {"m", "A", "window", "step", "N", "mode", "K", "policy", "potential", "flows", "h", "steps",
                          "eps", "tol", "fd_tol", "mixed_tol", "commute_tol", "fd_step", "seed", "l_max", "profile",
                          "tau", "times", "out"},
                         "", err);
  ExperimentConfig c;

  if (!j.contains("A")) err.add("missing key 'A'");
  detail::guarded(err, "A", [&] {
    if (!j.contains("A")) return;
    for (const auto& a : j.at("A")) c.A.push_back(detail::scalar_string(a));
    AknsData<Rational> d;
    for (const auto& s : c.A) d.a.push_back(parse_scalar<Rational>(s));
    d.validate();
  });
  c.m = static_cast<int>(c.A.size());
  detail::guarded(err, "m", [&] {
    if (j.contains("m") && j.at("m").get<int>() != c.m) throw input_error("m does not match the length of A");
  });
  detail::guarded(err, "window", [&] {
    if (!j.contains("window")) return;
    const json& w = j.at("window");
    detail::reject_unknown(w, {"n_min", "n_max", "halo"}, "window", err);
    c.window = Window{w.at("n_min").get<int>(), w.at("n_max").get<int>(), w.at("halo").get<int>()};
    c.window.validate();
  });
  detail::guarded(err, "step", [&] {
    if (j.contains("step")) c.step = detail::scalar_string(j.at("step"));
    if (!(parse_scalar<Rational>(c.step) > 0)) throw input_error("must be positive");
  });
  detail::guarded(err, "N", [&] {
    if (j.contains("N")) c.N = j.at("N").get<int>();
    if (c.N < 1) throw input_error("depth must be >= 1");
    if (c.N > c.window.halo) throw input_error("depth exceeds halo");
  });
  detail::guarded(err, "mode", [&] {
    if (j.contains("mode")) c.mode = parse_mode(j.at("mode").get<std::string>());
  });
  detail::guarded(err, "K", [&] {
    if (j.contains("K")) c.K = j.at("K").get<int>();
    if (c.K < 1) throw input_error("band must be >= 1");
  });
  detail::guarded(err, "policy", [&] {
    if (j.contains("policy")) c.policy = parse_policy(j.at("policy").get<std::string>());
  });
  detail::guarded(err, "flows", [&] {
    if (!j.contains("flows")) return;
    c.flows.clear();
    for (const auto& f : j.at("flows")) {
      if (!f.is_array() || f.size() != 2) throw input_error("each flow is [k, alpha]");
      FlowIndex fi{f[0].get<int>(), f[1].get<int>() - 1};
      if (fi.k < 0) throw input_error("flow order must be >= 0");
      if (fi.alpha < 0 || fi.alpha >= std::max(c.m, 1)) throw input_error("flow alpha out of range 1..m");
      c.flows.push_back(fi);
    }
  });
  detail::guarded(err, "h", [&] {
    if (j.contains("h")) c.h = detail::scalar_string(j.at("h"));
    if (parse_scalar<Rational>(c.h) == 0) throw input_error("time step must be nonzero");
  });
  detail::guarded(err, "steps", [&] {
    if (j.contains("steps")) c.steps = j.at("steps").get<int>();
    if (c.steps < 0) throw input_error("must be >= 0");
  });
  detail::guarded(err, "eps", [&] {
    if (j.contains("eps")) {
      c.eps.clear();
      for (const auto& e : j.at("eps")) c.eps.push_back(detail::scalar_string(e));
    }
    if (c.eps.size() < 2) throw input_error("need at least two values");
    for (std::size_t i = 0; i < c.eps.size(); ++i) {
      Rational e = parse_scalar<Rational>(c.eps[i]);
      if (!(e > 0)) throw input_error("values must be positive");
      if (i > 0 && !(e < parse_scalar<Rational>(c.eps[i - 1]))) throw input_error("must be strictly decreasing");
    }
  });
  auto positive = [&](const char* key, double& v) {
    detail::guarded(err, key, [&] {
      if (j.contains(key)) v = j.at(key).get<double>();
      if (!(v > 0)) throw input_error("must be positive");
    });
  };
  positive("tol", c.tol);
  positive("fd_tol", c.fd_tol);
  positive("mixed_tol", c.mixed_tol);
  positive("commute_tol", c.commute_tol);
  positive("fd_step", c.fd_step);
  detail::guarded(err, "seed", [&] {
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  });
  detail::guarded(err, "l_max", [&] {
    if (j.contains("l_max")) c.l_max = j.at("l_max").get<int>();
    if (c.l_max < 0) throw input_error("must be >= 0");
  });
  detail::guarded(err, "out", [&] {
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
  });
  detail::guarded(err, "times", [&] {
    if (!j.contains("times")) return;
    c.times = j.at("times");
    if (c.m > 0) times_from_json<Rational>(c.times, c.m);
  });
  detail::guarded(err, "tau", [&] {
    if (!j.contains("tau")) return;
    const json& t = j.at("tau");
    detail::reject_unknown(t, {"tau", "companions"}, "tau", err);
    if (c.m > 0) {
      tau_from_json<Rational>(t.at("tau"), c.m);
      if (t.contains("companions"))
        for (const auto& e : t.at("companions")) {
          detail::reject_unknown(e, {"alpha", "beta", "tau"}, "tau.companions", err);
          const int a = e.at("alpha").get<int>(), b = e.at("beta").get<int>();
          if (a < 1 || a > c.m || b < 1 || b > c.m || a == b) throw input_error("companion indices must be distinct in 1..m");
          tau_from_json<Rational>(e.at("tau"), c.m);
        }
    }
    c.tau = t;
  });

  c.profile.amp = Matrix<double>(std::max(c.m, 1));
  detail::guarded(err, "profile", [&] {
    if (!j.contains("profile")) return;
    const json& p = j.at("profile");
    detail::reject_unknown(p, {"amp", "width", "x_lo", "x_hi"}, "profile", err);
    if (p.contains("amp")) {
      const json& a = p.at("amp");
      if (!a.is_array() || static_cast<int>(a.size()) != c.m) throw input_error("amp must be m x m");
      for (int i = 0; i < c.m; ++i)
        for (int k = 0; k < c.m; ++k) {
          c.profile.amp(i, k) = a.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k)).get<double>();
          if (i == k && c.profile.amp(i, k) != 0) throw input_error("amp diagonal must be zero");
        }
    }
    if (p.contains("width")) c.profile.width = p.at("width").get<double>();
    if (p.contains("x_lo")) c.profile.x_lo = p.at("x_lo").get<double>();
    if (p.contains("x_hi")) c.profile.x_hi = p.at("x_hi").get<double>();
    if (!(c.profile.width > 0)) throw input_error("width must be positive");
    if (!(c.profile.x_lo < c.profile.x_hi)) throw input_error("x_lo must be below x_hi");
  });

  detail::guarded(err, "potential", [&] {
    if (!j.contains("potential")) return;
    const json& p = j.at("potential");
    PotentialSpec& ps = c.potential;
    ps.kind = p.at("kind").get<std::string>();
    if (ps.kind == "vacuum") {
      detail::reject_unknown(p, {"kind"}, "potential", err);
    } else if (ps.kind == "entries") {
      detail::reject_unknown(p, {"kind", "entries"}, "potential", err);
      for (const auto& e : p.at("entries")) {
        detail::reject_unknown(e, {"n", "i", "j", "value"}, "potential.entries", err);
        PotentialSpec::Entry x{e.at("n").get<int>(), e.at("i").get<int>() - 1, e.at("j").get<int>() - 1,
                               detail::scalar_string(e.at("value"))};
        parse_scalar<Rational>(x.value);
        if (x.i < 0 || x.i >= c.m || x.j < 0 || x.j >= c.m) throw input_error("entry index out of range 1..m");
        if (x.i == x.j && parse_scalar<Rational>(x.value) != 0) throw input_error("u_ii must be zero");
        if (!c.window.stored(x.n)) throw input_error("site " + std::to_string(x.n) + " outside the stored window");
        ps.entries.push_back(std::move(x));
      }
    } else if (ps.kind == "random") {
      detail::reject_unknown(p, {"kind", "lo", "hi", "num_max", "den_max", "scale"}, "potential", err);
      if (p.contains("lo")) ps.lo = p.at("lo").get<int>();
      if (p.contains("hi")) ps.hi = p.at("hi").get<int>();
      if (p.contains("num_max")) ps.num_max = p.at("num_max").get<int>();
      if (p.contains("den_max")) ps.den_max = p.at("den_max").get<int>();
      if (p.contains("scale")) ps.scale = detail::scalar_string(p.at("scale"));
      parse_scalar<Rational>(ps.scale);
      if (ps.lo > ps.hi || !c.window.stored(ps.lo) || !c.window.stored(ps.hi))
        throw input_error("random support must be a stored range");
      if (ps.num_max < 0 || ps.den_max < 1) throw input_error("num_max >= 0 and den_max >= 1 required");
    } else if (ps.kind == "gaussian") {
      detail::reject_unknown(p, {"kind", "amp", "width", "x0"}, "potential", err);
      ps.amp = p.at("amp").get<std::vector<std::vector<std::string>>>();
      if (static_cast<int>(ps.amp.size()) != c.m) throw input_error("amp must be m x m");
      for (int i = 0; i < c.m; ++i) {
        if (static_cast<int>(ps.amp[static_cast<std::size_t>(i)].size()) != c.m) throw input_error("amp must be m x m");
        if (parse_scalar<double>(ps.amp[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)]) != 0)
          throw input_error("amp diagonal must be zero");
      }
      if (p.contains("width")) ps.width = p.at("width").get<double>();
      if (p.contains("x0")) ps.x0 = p.at("x0").get<double>();
      if (!(ps.width > 0)) throw input_error("width must be positive");
    } else if (ps.kind == "state_file") {
      detail::reject_unknown(p, {"kind", "path"}, "potential", err);
      ps.path = p.at("path").get<std::string>();
    } else {
      throw input_error("unknown kind '" + ps.kind + "' (vacuum|entries|random|gaussian|state_file)");
    }
  });
  err.raise();
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// 64-bit FNV-1a, hex.
inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 0xf];
  return out;
}

inline std::string config_hash(const ExperimentConfig& c) { return fnv1a_hex(c.canonical().dump()); }

template <Scalar T>
AknsData<T> make_data(const ExperimentConfig& c) {
  AknsData<T> d;
  for (const auto& s : c.A) d.a.push_back(parse_scalar<T>(s));
  d.validate();
  return d;
}

/// Initial potential of the config; the generator is consumed only by the random kind.
template <Scalar T>
MatFn<T> make_potential(const ExperimentConfig& c, Rng& rng) {
  const int m = c.m;
  const T step = parse_scalar<T>(c.step);
  const PotentialSpec& p = c.potential;
  MatFn<T> U(c.window, Matrix<T>(m), Matrix<T>(m), Matrix<T>(m), step);
  if (p.kind == "entries") {
    for (const auto& e : p.entries) U[e.n](e.i, e.j) = parse_scalar<T>(e.value);
  } else if (p.kind == "random") {
    U = random_potential<T>(rng, m, c.window, p.lo, p.hi, step, p.num_max, p.den_max);
    const T s = parse_scalar<T>(p.scale);
    U = U.map([&](const Matrix<T>& x) { return x * s; });
  } else if (p.kind == "gaussian") {
    if constexpr (!std::same_as<T, double>) {
      throw input_error("gaussian potential requires float mode");
    } else {
      Matrix<double> amp(m);
      for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k)
          amp(i, k) = parse_scalar<double>(p.amp[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]);
      U = gaussian_potential(m, c.window, step, p.x0, amp, p.width, std::numeric_limits<double>::infinity());
    }
  } else if (p.kind == "state_file") {
    U = load_state<T>(p.path).U;
  }
  return U;
}

/// Solved initial state. A state file is loaded as stored (dressing included).
template <Scalar T>
HierarchyState<T> make_initial_state(const ExperimentConfig& c, Rng& rng) {
  if (c.potential.kind == "state_file") {
    HierarchyState<T> s = load_state<T>(c.potential.path);
    AknsData<T> d = make_data<T>(c);
    if (!(s.data.a == d.a)) throw input_error("state file A differs from config A");
    return s;
  }
  const AknsData<T> d = make_data<T>(c);
  return make_state(d, make_potential<T>(c, rng), c.N, c.policy);
}

template <Scalar T>
TimePoint<T> make_times(const ExperimentConfig& c) {
  return times_from_json<T>(c.times, c.m);
}

/// Scalar τ and the companion matrix from the config (vacuum when absent).
template <Scalar T>
std::pair<TauExpSum<T>, TauMatrix<T>> make_tau(const ExperimentConfig& c) {
  if (!c.tau) return {TauExpSum<T>::one(), {}};
  TauExpSum<T> tau = tau_from_json<T>(c.tau->at("tau"), c.m);
  TauMatrix<T> comp;
  if (c.tau->contains("companions")) {
    comp.assign(static_cast<std::size_t>(c.m), std::vector<std::optional<TauExpSum<T>>>(static_cast<std::size_t>(c.m)));
    for (const auto& e : c.tau->at("companions"))
      comp[static_cast<std::size_t>(e.at("alpha").get<int>() - 1)][static_cast<std::size_t>(e.at("beta").get<int>() - 1)] =
          tau_from_json<T>(e.at("tau"), c.m);
  }
  return {std::move(tau), std::move(comp)};
}

}  // namespace dakns
