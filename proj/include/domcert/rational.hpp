#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <string>

#include "domcert/error.hpp"

namespace domcert {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  return Rational(BigInt(num), BigInt(den));
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline std::string to_string(const Rational& r) { return r.str(); }

/// Parses "p", "p/q" or "-p/q".
inline Rational parse_rational(const std::string& text) {
  try {
    const auto slash = text.find('/');
    if (slash == std::string::npos) return Rational(BigInt(text));
    BigInt num(text.substr(0, slash));
    BigInt den(text.substr(slash + 1));
    if (den == 0) throw ParseError("zero denominator in " + text);
    return Rational(num, den);
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("not a rational number: " + text);
  }
}

inline Rational pow(const Rational& base, unsigned exponent) {
  Rational result = 1;
  Rational b = base;
  while (exponent != 0) {
    if (exponent & 1U) result *= b;
    exponent >>= 1;
    if (exponent != 0) b *= b;
  }
  return result;
}

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

/// Best rational approximation p/q of x with 1 <= q <= max_den
/// (continued fractions with a final semiconvergent check).
inline Rational rationalize(double x, std::int64_t max_den) {
  if (!std::isfinite(x)) throw BadParams("cannot rationalize a non-finite value");
  if (max_den < 1) throw BadParams("max denominator must be positive");
  const bool negative = x < 0;
  double y = std::fabs(x);
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double frac = y;
  for (int iter = 0; iter < 64; ++iter) {
    const double a_d = std::floor(frac);
    if (a_d > 9.0e15) break;
    const auto a = static_cast<std::int64_t>(a_d);
    const std::int64_t q2 = q0 + a * q1;
    if (q2 > max_den) {
      // Largest semiconvergent that still fits.
      const std::int64_t t = (max_den - q0) / q1;
      const std::int64_t ps = p0 + t * p1, qs = q0 + t * q1;
      const double err_semi = std::fabs(y - static_cast<double>(ps) / static_cast<double>(qs));
      const double err_conv = std::fabs(y - static_cast<double>(p1) / static_cast<double>(q1));
      if (err_semi < err_conv) {
        p1 = ps;
        q1 = qs;
      }
      break;
    }
    const std::int64_t p2 = p0 + a * p1;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double rem = frac - a_d;
    if (rem < 1e-18) break;
    frac = 1.0 / rem;
  }
  Rational r = make_rational(p1, q1);
  return negative ? Rational(-r) : r;
}

}  // namespace domcert
