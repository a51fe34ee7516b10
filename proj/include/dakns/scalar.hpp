#pragma once

#include <gmpxx.h>

#include <array>
#include <charconv>
#include <cmath>
#include <concepts>
#include <string>
#include <string_view>
#include <system_error>

#include "dakns/error.hpp"

namespace dakns {

using Rational = mpq_class;

enum class Mode { rational, binary_float };

inline std::string mode_name(Mode m) {
  return m == Mode::rational ? "rational" : "float";
}

inline Mode parse_mode(std::string_view s) {
  if (s == "rational") return Mode::rational;
  if (s == "float") return Mode::binary_float;
  throw input_error("unknown scalar mode '" + std::string(s) + "' (expected rational|float)");
}

template <class T>
struct scalar_traits;

namespace detail {

// Parses "[-]digits[.digits][e[-]digits]" into an exact rational.
inline Rational parse_decimal(std::string_view s) {
  std::string_view mant = s;
  long exp10 = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    mant = s.substr(0, e);
    auto ex = s.substr(e + 1);
    if (!ex.empty() && ex.front() == '+') ex.remove_prefix(1);
    auto [p, ec] = std::from_chars(ex.data(), ex.data() + ex.size(), exp10);
    if (ec != std::errc{} || p != ex.data() + ex.size())
      throw input_error("malformed number '" + std::string(s) + "'");
  }
  bool neg = false;
  if (!mant.empty() && (mant.front() == '-' || mant.front() == '+')) {
    neg = mant.front() == '-';
    mant.remove_prefix(1);
  }
  std::string digits;
  long frac = 0;
  bool seen_dot = false;
  for (char c : mant) {
    if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else if (c >= '0' && c <= '9') {
      digits.push_back(c);
      if (seen_dot) ++frac;
    } else {
      throw input_error("malformed number '" + std::string(s) + "'");
    }
  }
  if (digits.empty()) throw input_error("malformed number '" + std::string(s) + "'");
  mpz_class num(digits, 10);
  long shift = exp10 - frac;
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
  Rational r = shift >= 0 ? Rational(num * scale) : Rational(num, scale);
  r.canonicalize();
  return neg ? Rational(-r) : r;
}

}  // namespace detail

template <>
struct scalar_traits<Rational> {
  static constexpr Mode mode = Mode::rational;
  static constexpr bool exact = true;

  static Rational from_int(long v) { return Rational(v); }
  static Rational ratio(long p, long q) {
    Rational r{mpz_class(p), mpz_class(q)};
    r.canonicalize();
    return r;
  }

  static Rational parse(std::string_view s) {
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
      Rational num = detail::parse_decimal(s.substr(0, slash));
      Rational den = detail::parse_decimal(s.substr(slash + 1));
      if (sgn(den) == 0) throw input_error("zero denominator in '" + std::string(s) + "'");
      return Rational(num / den);
    }
    return detail::parse_decimal(s);
  }

  /// Always "p/q" in lowest terms, including integers ("3/1", "0/1").
  static std::string format(const Rational& v) {
    return v.get_num().get_str() + "/" + v.get_den().get_str();
  }

  static Rational abs(const Rational& v) { return Rational(::abs(v)); }
  static double to_double(const Rational& v) { return v.get_d(); }
  static bool is_zero(const Rational& v) { return sgn(v) == 0; }

  static Rational exp(const Rational& v) {
    if (sgn(v) == 0) return Rational(1);
    throw representation_error("exp(" + format(v) + ") is not rational");
  }
  static Rational from_double(double) {
    throw representation_error("cannot convert a float to an exact rational implicitly");
  }
};

template <>
struct scalar_traits<double> {
  static constexpr Mode mode = Mode::binary_float;
  static constexpr bool exact = false;

  static double from_int(long v) { return static_cast<double>(v); }
  static double ratio(long p, long q) { return static_cast<double>(p) / static_cast<double>(q); }

  static double parse(std::string_view s) {
    if (auto slash = s.find('/'); slash != std::string_view::npos)
      return parse(s.substr(0, slash)) / parse(s.substr(slash + 1));
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
      throw input_error("malformed number '" + std::string(s) + "'");
    return v;
  }

  /// Shortest decimal string that round-trips to the same double.
  static std::string format(double v) {
    std::array<char, 32> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), p);
  }

  static double abs(double v) { return std::fabs(v); }
  static double to_double(double v) { return v; }
  static bool is_zero(double v) { return v == 0.0; }
  static double exp(double v) { return std::exp(v); }
  static double from_double(double v) { return v; }
};

template <class T>
concept Scalar = requires { scalar_traits<T>::mode; };

template <Scalar T>
T parse_scalar(std::string_view s) {
  return scalar_traits<T>::parse(s);
}

template <Scalar T>
std::string format_scalar(const T& v) {
  return scalar_traits<T>::format(v);
}

template <Scalar T>
T abs_scalar(const T& v) {
  return scalar_traits<T>::abs(v);
}

template <Scalar T>
double to_double(const T& v) {
  return scalar_traits<T>::to_double(v);
}

/// Exact zero in rational mode; `r <= tol` in float mode.
template <Scalar T>
bool within_tolerance(const T& r, double tol) {
  if constexpr (scalar_traits<T>::exact)
    return scalar_traits<T>::is_zero(r);
  else
    return r <= tol;
}

/// Converts an exact rational into the target scalar type.
template <Scalar T>
T from_rational(const Rational& q) {
  if constexpr (std::same_as<T, Rational>)
    return q;
  else
    return q.get_d();
}

}  // namespace dakns
