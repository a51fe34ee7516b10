#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "dakns/baker_tau.hpp"
#include "dakns/hierarchy.hpp"

namespace dakns {

using json = nlohmann::json;

inline constexpr int kStateVersion = 1;

namespace detail {

[[noreturn]] inline void schema(const std::string& what) { throw input_error("schema: " + what); }

inline const json& field(const json& j, const char* key) {
  if (!j.is_object()) schema(std::string("expected an object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) schema(std::string("missing field '") + key + "'");
  return *it;
}

inline int int_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer()) schema(std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

template <Scalar T>
T scalar_from(const json& v) {
  if (v.is_string()) return parse_scalar<T>(v.get<std::string>());
  if (v.is_number_integer()) return scalar_traits<T>::from_int(v.get<long>());
  schema("scalars are encoded as strings");
}

}  // namespace detail

template <Scalar T>
json to_json(const Matrix<T>& a) {
  json rows = json::array();
  for (int i = 0; i < a.dim(); ++i) {
    json row = json::array();
    for (int j = 0; j < a.dim(); ++j) row.push_back(format_scalar(a(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <Scalar T>
Matrix<T> matrix_from_json(const json& j, int m) {
  if (!j.is_array() || static_cast<int>(j.size()) != m) detail::schema("matrix must have " + std::to_string(m) + " rows");
  Matrix<T> a(m);
  for (int i = 0; i < m; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != m)
      detail::schema("matrix row must have " + std::to_string(m) + " entries");
    for (int k = 0; k < m; ++k) a(i, k) = detail::scalar_from<T>(row[static_cast<std::size_t>(k)]);
  }
  return a;
}

/// {"m","lo","hi","valid_lo","coeffs"}; valid_lo is null for an exact series.
template <Scalar T>
json to_json(const Series<T>& s) {
  json c = json::array();
  for (int d = s.lo(); d <= s.hi(); ++d) c.push_back(to_json(s.at(d)));
  return json{{"m", s.dim()},
              {"lo", s.lo()},
              {"hi", s.hi()},
              {"valid_lo", s.exact() ? json(nullptr) : json(s.valid_lo())},
              {"coeffs", std::move(c)}};
}

template <Scalar T>
Series<T> series_from_json(const json& j) {
  const int m = detail::int_field(j, "m");
  if (m < 1 || m > kMaxDim) detail::schema("series dimension out of range");
  const int lo = detail::int_field(j, "lo");
  const int hi = detail::int_field(j, "hi");
  const json& v = detail::field(j, "valid_lo");
  const bool exact = v.is_null();
  if (!exact && (!v.is_number_integer() || v.get<int>() != lo)) detail::schema("valid_lo must equal lo or be null");
  const json& c = detail::field(j, "coeffs");
  if (!c.is_array() || static_cast<int>(c.size()) != hi - lo + 1) detail::schema("coeffs length does not match band");
  Series<T> s(m, lo, hi, exact);
  for (int d = lo; d <= hi; ++d) s[d] = matrix_from_json<T>(c[static_cast<std::size_t>(d - lo)], m);
  return s;
}

template <class V>
json lattice_to_json(const LatticeFn<V>& f) {
  const Window& w = f.window();
  json vals = json::array();
  for (const auto& v : f.values()) vals.push_back(to_json(v));
  return json{{"n_min", w.n_min},
              {"n_max", w.n_max},
              {"halo", w.halo},
              {"step", format_scalar(f.step())},
              {"left_tail", to_json(f.left_tail())},
              {"right_tail", to_json(f.right_tail())},
              {"values", std::move(vals)}};
}

template <Scalar T>
MatFn<T> matfn_from_json(const json& j, int m) {
  const Window w{detail::int_field(j, "n_min"), detail::int_field(j, "n_max"), detail::int_field(j, "halo")};
  w.validate();
  const T step = detail::scalar_from<T>(detail::field(j, "step"));
  MatFn<T> f(w, Matrix<T>(m), matrix_from_json<T>(detail::field(j, "left_tail"), m),
             matrix_from_json<T>(detail::field(j, "right_tail"), m), step);
  const json& vals = detail::field(j, "values");
  if (!vals.is_array() || static_cast<int>(vals.size()) != w.size()) detail::schema("values length does not match window");
  for (int n = w.store_lo(); n <= w.store_hi(); ++n)
    f[n] = matrix_from_json<T>(vals[static_cast<std::size_t>(n - w.store_lo())], m);
  return f;
}

inline json to_json(const Conventions& c) {
  json dirs = json::array();
  for (int i = 0; i < c.m; ++i) {
    json row = json::array();
    for (int j = 0; j < c.m; ++j) row.push_back(direction_name(c.at(i, j)));
    dirs.push_back(std::move(row));
  }
  return json{{"policy", policy_name(c.policy)}, {"directions", std::move(dirs)}};
}

template <Scalar T>
json state_to_json(const HierarchyState<T>& s) {
  json A = json::array();
  for (const auto& a : s.data.a) A.push_back(format_scalar(a));
  json d = json::array();
  for (const auto& w : s.dressing.w) d.push_back(lattice_to_json(w));
  return json{{"version", kStateVersion},
              {"mode", mode_name(scalar_traits<T>::mode)},
              {"A", std::move(A)},
              {"U", lattice_to_json(s.U)},
              {"N", s.N},
              {"dressing", std::move(d)},
              {"conventions", to_json(s.dressing.conv)}};
}

/// Loads the stored dressing as is (no re-solve), so corrupted files stay corrupted.
template <Scalar T>
HierarchyState<T> state_from_json(const json& j) {
  const int version = detail::int_field(j, "version");
  if (version != kStateVersion)
    throw input_error("unsupported state version " + std::to_string(version));
  AknsData<T> data;
  const json& A = detail::field(j, "A");
  if (!A.is_array()) detail::schema("A must be an array");
  for (const auto& a : A) data.a.push_back(detail::scalar_from<T>(a));
  data.validate();
  const int m = data.m();
  const int N = detail::int_field(j, "N");
  MatFn<T> U = matfn_from_json<T>(detail::field(j, "U"), m);
  detail::check_depth(U, N);
  const json& conv = detail::field(j, "conventions");
  const json& pol = detail::field(conv, "policy");
  if (!pol.is_string()) detail::schema("conventions.policy must be a string");
  Conventions c = make_conventions(data, parse_policy(pol.get<std::string>()));
  if (to_json(c) != conv) detail::schema("conventions do not match A and policy");
  validate_potential(U, data, false);
  const json& d = detail::field(j, "dressing");
  if (!d.is_array() || static_cast<int>(d.size()) != N + 1) detail::schema("dressing must hold N+1 coefficients");
  Dressing<T> dr;
  dr.N = N;
  dr.conv = c;
  for (const auto& wj : d) {
    MatFn<T> w = matfn_from_json<T>(wj, m);
    if (!(w.window() == U.window()) || w.step() != U.step()) detail::schema("dressing window differs from U");
    dr.w.push_back(std::move(w));
  }
  return HierarchyState<T>{std::move(data), std::move(U), N, std::move(dr)};
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw input_error(path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write " + path);
  out << text;
  if (!out) throw input_error("write failed for " + path);
}

template <Scalar T>
void save_state(const HierarchyState<T>& s, const std::string& path) {
  write_text_file(path, state_to_json(s).dump(1) + "\n");
}

template <Scalar T>
HierarchyState<T> load_state(const std::string& path) {
  return state_from_json<T>(read_json_file(path));
}

// τ as {"terms":[{"c":"p/q","p":{"k,α":"p/q"}}]}, α one-based.

template <Scalar T>
json to_json(const TauExpSum<T>& tau) {
  json terms = json::array();
  for (const auto& tm : tau.terms) {
    json p = json::object();
    for (const auto& [key, v] : tm.p)
      p[std::to_string(key.first) + "," + std::to_string(key.second + 1)] = format_scalar(v);
    terms.push_back(json{{"c", format_scalar(tm.c)}, {"p", std::move(p)}});
  }
  return json{{"terms", std::move(terms)}};
}

inline std::pair<int, int> parse_time_key(const std::string& key, int m) {
  const auto comma = key.find(',');
  if (comma == std::string::npos) detail::schema("time key '" + key + "' is not 'k,alpha'");
  try {
    std::size_t p1 = 0, p2 = 0;
    const int k = std::stoi(key.substr(0, comma), &p1);
    const int al = std::stoi(key.substr(comma + 1), &p2);
    if (p1 != comma || p2 != key.size() - comma - 1) throw std::invalid_argument(key);
    if (k < 0 || al < 1 || al > m) detail::schema("time key '" + key + "' out of range");
    return {k, al - 1};
  } catch (const std::logic_error&) {
    detail::schema("time key '" + key + "' is not 'k,alpha'");
  }
}

template <Scalar T>
TimePoint<T> times_from_json(const json& j, int m) {
  if (!j.is_object()) detail::schema("times must be an object");
  TimePoint<T> t;
  for (const auto& [key, v] : j.items()) t[parse_time_key(key, m)] = detail::scalar_from<T>(v);
  return normalized(t);
}

template <Scalar T>
TauExpSum<T> tau_from_json(const json& j, int m) {
  const json& terms = detail::field(j, "terms");
  if (!terms.is_array()) detail::schema("terms must be an array");
  TauExpSum<T> tau;
  for (const auto& tj : terms) {
    typename TauExpSum<T>::Term tm{detail::scalar_from<T>(detail::field(tj, "c")),
                                   times_from_json<T>(detail::field(tj, "p"), m)};
    tau.terms.push_back(std::move(tm));
  }
  return tau;
}

}  // namespace dakns
