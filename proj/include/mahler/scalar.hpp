#pragma once

// Scalar backends. Every algorithm in the library is a template over the
// scalar type; mixing backends is a compile error rather than a runtime one.
//
//   Rational (GMP mpq_class) - exact, no tolerance anywhere
//   double                   - binary floating point, absolute tolerance 1e-9

#include <gmpxx.h>

#include <cmath>
#include <concepts>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace mahler {

using Rational = mpq_class;

enum class Backend { exact, floating };

inline std::string_view backend_name(Backend b) { return b == Backend::exact ? "exact" : "float"; }

inline Backend parse_backend(std::string_view s) {
  if (s == "exact") return Backend::exact;
  if (s == "float") return Backend::floating;
  throw std::invalid_argument("unknown backend '" + std::string(s) + "' (expected exact|float)");
}

template <class S>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
  static constexpr bool is_exact = true;
  static constexpr Backend backend = Backend::exact;

  static int sign(const Rational& x) { return sgn(x); }
  static double to_double(const Rational& x) { return x.get_d(); }
  static Rational from_ratio(long num, long den) {
    Rational q(num, den);
    q.canonicalize();
    return q;
  }

  // Accepts "p/q", "p", and plain decimals such as "0.01" or "-1.25e-3".
  static Rational parse(std::string_view text) {
    std::string s(text);
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    if (s.find_first_of(".eE") == std::string::npos) {
      Rational q;
      if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal '" + s + "'");
      if (q.get_den() == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
      q.canonicalize();
      return q;
    }
    std::size_t epos = s.find_first_of("eE");
    long exponent = 0;
    std::string mant = s.substr(0, epos);
    if (epos != std::string::npos) exponent = std::stol(s.substr(epos + 1));
    bool negative = !mant.empty() && mant[0] == '-';
    if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) mant.erase(0, 1);
    std::size_t dot = mant.find('.');
    std::string digits = mant;
    if (dot != std::string::npos) {
      digits = mant.substr(0, dot) + mant.substr(dot + 1);
      exponent -= static_cast<long>(mant.size() - dot - 1);
    }
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("bad decimal literal '" + s + "'");
    mpz_class num(digits, 10);
    mpz_class scale = 1;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
    Rational q = exponent < 0 ? Rational(num, scale) : Rational(num * scale, 1);
    q.canonicalize();
    return negative ? Rational(-q) : q;
  }

  static std::string format(const Rational& x) { return x.get_str(10); }
};

template <>
struct scalar_traits<double> {
  static constexpr bool is_exact = false;
  static constexpr Backend backend = Backend::floating;
  // Feasibility and equality tolerance used by every float comparison.
  static constexpr double tolerance = 1e-9;

  static int sign(double x) { return x > tolerance ? 1 : (x < -tolerance ? -1 : 0); }
  static double to_double(double x) { return x; }
  static double from_ratio(long num, long den) { return static_cast<double>(num) / static_cast<double>(den); }
  static double parse(std::string_view text) {
    if (text.find('/') != std::string_view::npos) return scalar_traits<Rational>::parse(text).get_d();
    return std::stod(std::string(text));
  }
  static std::string format(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  }
};

template <class S>
concept Scalar = requires {
  { scalar_traits<S>::is_exact } -> std::convertible_to<bool>;
};

template <Scalar S>
inline constexpr bool is_exact_v = scalar_traits<S>::is_exact;

template <Scalar S>
int sign(const S& x) { return scalar_traits<S>::sign(x); }

template <Scalar S>
bool is_zero(const S& x) { return sign(x) == 0; }

// a <= b, with the backend's tolerance.
template <Scalar S>
bool leq(const S& a, const std::type_identity_t<S>& b) { return sign(S(a - b)) <= 0; }

template <Scalar S>
bool approx_equal(const S& a, const std::type_identity_t<S>& b) { return sign(S(a - b)) == 0; }

template <Scalar S>
double to_double(const S& x) { return scalar_traits<S>::to_double(x); }

template <Scalar S>
S ratio(long num, long den = 1) { return scalar_traits<S>::from_ratio(num, den); }

template <Scalar S>
S abs_value(const S& x) { return sign(x) < 0 ? S(-x) : x; }

template <Scalar S>
S factorial(int n) {
  S f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

template <Scalar S>
S power(const S& base, int e) {
  S r = 1;
  for (int k = 0; k < e; ++k) r *= base;
  return r;
}

// Square root rounded upwards. Exact for perfect-square rationals; otherwise a
// rational upper bound within 2^-64 of the true value.
inline Rational sqrt_upper(const Rational& x) {
  if (sgn(x) < 0) throw std::domain_error("sqrt of negative rational");
  if (sgn(x) == 0) return 0;
  mpz_class n = x.get_num(), d = x.get_den();
  if (mpz_perfect_square_p(n.get_mpz_t()) && mpz_perfect_square_p(d.get_mpz_t())) {
    mpz_class rn, rd;
    mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
    return Rational(rn, rd);
  }
  mpz_class scale = 1;
  scale <<= 128;
  mpz_class m = (n * scale) / d;
  mpz_class s;
  mpz_sqrt(s.get_mpz_t(), m.get_mpz_t());
  mpz_class den = 1;
  den <<= 64;
  Rational q(s + 1, den);
  q.canonicalize();
  return q;
}

inline double sqrt_upper(double x) { return std::sqrt(x); }

// Vectors are plain sequences of one scalar type; the ambient dimension is
// the sequence length.
template <Scalar S>
using Vector = std::vector<S>;

template <Scalar S>
S dot(const Vector<S>& a, const Vector<S>& b) {
  S s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

template <Scalar S>
Vector<S> operator+(const Vector<S>& a, const Vector<S>& b) {
  Vector<S> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

template <Scalar S>
Vector<S> operator-(const Vector<S>& a, const Vector<S>& b) {
  Vector<S> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

template <Scalar S>
Vector<S> operator-(const Vector<S>& a) {
  Vector<S> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  return r;
}

template <Scalar S>
Vector<S> scaled(const Vector<S>& a, const std::type_identity_t<S>& t) {
  Vector<S> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * t;
  return r;
}

template <Scalar S>
S norm_squared(const Vector<S>& a) { return dot(a, a); }

template <Scalar S>
S norm1(const Vector<S>& a) {
  S s = 0;
  for (const auto& x : a) s += abs_value(x);
  return s;
}

template <Scalar S>
double norm2(const Vector<S>& a) { return std::sqrt(to_double(norm_squared(a))); }

template <Scalar S>
bool approx_equal(const Vector<S>& a, const Vector<S>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!approx_equal(a[i], b[i])) return false;
  return true;
}

template <Scalar S>
bool is_zero(const Vector<S>& a) {
  for (const auto& x : a)
    if (!is_zero(x)) return false;
  return true;
}

template <Scalar S>
Vector<S> unit_vector(int n, int j) {
  Vector<S> e(n, S(0));
  e[j] = 1;
  return e;
}

template <Scalar S>
std::vector<double> to_double(const Vector<S>& a) {
  std::vector<double> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = to_double(a[i]);
  return r;
}

template <Scalar S>
std::string describe(const Vector<S>& v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << scalar_traits<S>::format(v[i]);
  os << ')';
  return os.str();
}

// Lexicographic order, tolerance-aware for the float backend.
template <Scalar S>
bool lex_less(const Vector<S>& a, const Vector<S>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    int s = sign(S(a[i] - b[i]));
    if (s != 0) return s < 0;
  }
  return false;
}

}  // namespace mahler
